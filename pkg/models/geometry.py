"""
Parametric planar spiral coil geometry

The spiral is described by its outer radius and track parameters; the inner
radius is always derived (R_min = R_max - (N-1)(w+s) - w). For square coils
every "radius" is a half-side, so the same radii recurrences apply.
"""

import logging
import math
from enum import Enum
from typing import Any, Dict, List

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.errors import GeometryError, UnsupportedCombinationError
from models.units import Area, Length, m_to_um, um_to_m

logger = logging.getLogger(__name__)


class CoilShape(str, Enum):
    ROUND = "round"
    SQUARE = "square"


class LengthMethod(str, Enum):
    """How the mean track length entering the resistance is computed"""

    CLOSED_FORM = "closed_form"
    CENTERLINE_SUM = "centerline_sum"


class TurnAnnulus(BaseModel):
    """One turn of the spiral, between its inner and outer radius"""

    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=1)
    inner_radius: Length = Field(gt=0)
    outer_radius: Length = Field(gt=0)

    @model_validator(mode="after")
    def _check_order(self) -> "TurnAnnulus":
        if not self.outer_radius > self.inner_radius:
            raise ValueError("outer_radius must exceed inner_radius")
        return self

    @property
    def width(self) -> Length:
        return self.outer_radius - self.inner_radius

    @property
    def centerline_radius(self) -> Length:
        return self.inner_radius + self.width / 2.0


class CoilGeometry(BaseModel):
    """
    Full parametric description of a planar spiral coil (SI units).

    outer_radius is the outer radius of the last turn (half-side for square coils).
    """

    model_config = ConfigDict(frozen=True)

    shape: CoilShape
    turns: int = Field(ge=1)
    outer_radius: Length = Field(gt=0, allow_inf_nan=False)
    track_width: Length = Field(gt=0, allow_inf_nan=False)
    track_spacing: Length = Field(ge=0, allow_inf_nan=False)
    track_thickness: Length = Field(gt=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check_inner_radius(self) -> "CoilGeometry":
        if self.inner_radius <= 0:
            raise ValueError(
                f"inner radius {self.inner_radius:.6g} m is not positive: "
                f"{self.turns} turns of {self.track_width:.6g} m + {self.track_spacing:.6g} m "
                f"do not fit in outer radius {self.outer_radius:.6g} m"
            )
        return self

    @property
    def pitch(self) -> Length:
        return self.track_width + self.track_spacing

    @property
    def inner_radius(self) -> Length:
        return self.outer_radius - (self.turns - 1) * self.pitch - self.track_width

    @classmethod
    def from_um(cls, shape: Any, turns: int, outer_radius_um: float, track_width_um: float,
                track_spacing_um: float, track_thickness_um: float) -> "CoilGeometry":
        return cls(
            shape=CoilShape(shape),
            turns=turns,
            outer_radius=um_to_m(outer_radius_um),
            track_width=um_to_m(track_width_um),
            track_spacing=um_to_m(track_spacing_um),
            track_thickness=um_to_m(track_thickness_um),
        )

    @classmethod
    def from_json_dict(cls, data: Dict[str, Any]) -> "CoilGeometry":
        """Build a coil from the JSON document format (lengths in µm)"""
        return cls.from_um(
            shape=str(data["shape"]).lower(),
            turns=data["turns"],
            outer_radius_um=float(data["outer_radius_um"]),
            track_width_um=float(data["track_width_um"]),
            track_spacing_um=float(data["track_spacing_um"]),
            track_thickness_um=float(data["track_thickness_um"]),
        )

    def to_json_dict(self) -> Dict[str, Any]:
        return {
            "shape": self.shape.value,
            "turns": self.turns,
            "outer_radius_um": m_to_um(self.outer_radius),
            "track_width_um": m_to_um(self.track_width),
            "track_spacing_um": m_to_um(self.track_spacing),
            "track_thickness_um": m_to_um(self.track_thickness),
        }

    def describe(self) -> str:
        return (
            f"{self.shape.value} N={self.turns} R_max={m_to_um(self.outer_radius):g}um "
            f"w={m_to_um(self.track_width):g}um s={m_to_um(self.track_spacing):g}um "
            f"t={m_to_um(self.track_thickness):g}um"
        )


def turn_annuli(coil: CoilGeometry) -> List[TurnAnnulus]:
    """Turns ordered innermost (n=1) to outermost (n=N)"""
    annuli = []
    for n in range(1, coil.turns + 1):
        inner = coil.outer_radius - (coil.turns - n) * coil.pitch - coil.track_width
        annuli.append(TurnAnnulus(index=n, inner_radius=inner, outer_radius=inner + coil.track_width))
    return annuli


def centerline_radii(coil: CoilGeometry) -> List[Length]:
    return [annulus.centerline_radius for annulus in turn_annuli(coil)]


def mean_track_length(coil: CoilGeometry, method: LengthMethod) -> Length:
    """
    Mean track length of the spiral.

    Args:
        coil: Coil geometry
        method: CLOSED_FORM (round coils only) or CENTERLINE_SUM
            (sum of turn centerline perimeters, 2πr round / 8a square)

    Returns:
        Track length in meters

    Raises:
        UnsupportedCombinationError: CLOSED_FORM on a square coil
        GeometryError: CLOSED_FORM gives a non-positive length
    """
    method = LengthMethod(method)
    n = coil.turns
    w = coil.track_width

    if method is LengthMethod.CLOSED_FORM:
        if coil.shape is not CoilShape.ROUND:
            raise UnsupportedCombinationError("closed-form track length only applies to round coils")
        length = math.pi * (2 * n * coil.outer_radius - n * w - coil.pitch * (n - 1) * (n + 2))
        if length <= 0:
            raise GeometryError(f"closed-form track length is not positive ({length:.6g} m) for {coil.describe()}")
        return length

    perimeter_factor = 2 * math.pi if coil.shape is CoilShape.ROUND else 8.0
    return sum(perimeter_factor * radius for radius in centerline_radii(coil))


def cross_section(coil: CoilGeometry) -> Area:
    return coil.track_width * coil.track_thickness
