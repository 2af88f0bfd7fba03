"""
Physical quantities and unit handling

Every value inside the toolkit is SI (m, A, A/m², A/m, W, Ω, Ω·m, m²).
Micrometers, millimeters and milliamperes only appear at the I/O boundary:
JSON files, CLI flags and CSV column names.
"""

import math
import re
from enum import Enum
from typing import Dict

from models.errors import QuantityError

# Semantic aliases, all SI
Length = float  # m
Current = float  # A
CurrentDensity = float  # A/m²
MagneticFieldH = float  # A/m
Power = float  # W
Resistance = float  # Ω
Resistivity = float  # Ω·m
Area = float  # m²

M = 1.0
MM = 1e-3
UM = 1e-6
A = 1.0
MA = 1e-3
MA_PER_UM2 = MA / (UM * UM)  # 1 mA/µm² = 1e9 A/m²


class QuantityKind(str, Enum):
    LENGTH = "length"
    CURRENT = "current"


UNIT_FACTORS: Dict[QuantityKind, Dict[str, float]] = {
    # micro sign (U+00B5) and Greek small mu (U+03BC) both spell micrometers
    QuantityKind.LENGTH: {"m": M, "mm": MM, "um": UM, "µm": UM, "μm": UM},
    QuantityKind.CURRENT: {"A": A, "mA": MA},
}

_QUANTITY_PATTERN = re.compile(
    r"^\s*(?P<number>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(?P<unit>[A-Za-zµμ]*)\s*$"
)


def um_to_m(value: float) -> Length:
    return value * UM


def m_to_um(value: Length) -> float:
    return value / UM


def ma_to_a(value: float) -> Current:
    return value * MA


def a_to_ma(value: Current) -> float:
    return value / MA


def parse_quantity(text: str, kind: QuantityKind, allow_negative: bool = False) -> float:
    """
    Parse a unit-suffixed quantity such as "280um" or "300mA" into SI.

    Args:
        text: Quantity text, number immediately followed (or space-separated) by a unit
        kind: Expected quantity kind; units of another kind are rejected
        allow_negative: Accept negative lengths (lateral offsets)

    Returns:
        Value in the canonical SI unit of ``kind``

    Raises:
        QuantityError: unknown unit, malformed number, missing unit, negative length
    """
    match = _QUANTITY_PATTERN.match(text or "")
    if not match:
        raise QuantityError(f"Malformed quantity: {text!r}")

    number = float(match.group("number"))
    unit = match.group("unit")

    if not math.isfinite(number):
        raise QuantityError(f"Quantity is not finite: {text!r}")

    if not unit:
        # zero is the same in every unit
        if number == 0.0:
            return 0.0
        expected = ", ".join(sorted(UNIT_FACTORS[kind]))
        raise QuantityError(f"Missing unit in {text!r} (expected one of: {expected})")

    factors = UNIT_FACTORS[kind]
    if unit not in factors:
        expected = ", ".join(sorted(factors))
        raise QuantityError(f"Unknown {kind.value} unit {unit!r} in {text!r} (expected one of: {expected})")

    if kind is QuantityKind.LENGTH and number < 0 and not allow_negative:
        raise QuantityError(f"Negative length: {text!r}")

    return number * factors[unit]
