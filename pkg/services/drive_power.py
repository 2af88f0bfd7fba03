"""
Current limits, Joule losses and magneto-electrical efficiency

The maximum current is set by the substrate/packaging through a maximum
admissible current density j_max; the Maximum Effective Magnetic Field
(M.E.M.F.) is the center field at that current.
"""

import logging
import math
from typing import Dict, Iterable, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.stats import linregress

from config import (
    COPPER_RESISTIVITY,
    FABRICATION_MIN_TRACK_WIDTH_UM,
    FAMILY_INNER_RADIUS_UM,
    REFERENCE_TURNS,
    SUBSTRATES,
)
from models.geometry import CoilGeometry, LengthMethod, cross_section, mean_track_length
from models.units import (
    MA_PER_UM2,
    Current,
    CurrentDensity,
    Length,
    MagneticFieldH,
    Power,
    Resistance,
    Resistivity,
    m_to_um,
    um_to_m,
)
from services.analytic_field import center_field, center_field_model

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["memf_A_per_m", "P_W", "ratio_A_per_m_per_W"]
SWEEP_EXTRA_COLUMNS = ["H_center_per_A", "w_um", "I_max_mA", "feasible"]


class SubstrateProfile(BaseModel):
    """Named thermal context with its maximum admissible current density"""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    j_max: CurrentDensity = Field(gt=0, allow_inf_nan=False)
    description: str = ""


class MaterialProps(BaseModel):
    model_config = ConfigDict(frozen=True)

    resistivity: Resistivity = Field(default=COPPER_RESISTIVITY, gt=0, allow_inf_nan=False)


class DriveReport(BaseModel):
    """Drive figures of one coil on one substrate"""

    model_config = ConfigDict(frozen=True)

    current_max: Current = Field(gt=0)
    memf: MagneticFieldH = Field(gt=0)
    resistance: Resistance = Field(gt=0)
    power_max: Power = Field(gt=0)
    efficiency_ratio: float = Field(gt=0)  # A/m per W
    track_length: Length = Field(gt=0)
    substrate: str
    length_method: LengthMethod
    memf_model: str

    @model_validator(mode="after")
    def _check_consistency(self) -> "DriveReport":
        if not math.isclose(self.efficiency_ratio, self.memf / self.power_max, rel_tol=1e-12):
            raise ValueError("efficiency_ratio must equal memf / power_max")
        return self

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "substrate": self.substrate,
                    "I_max_mA": self.current_max * 1e3,
                    "memf_A_per_m": self.memf,
                    "R_ohm": self.resistance,
                    "P_W": self.power_max,
                    "ratio_A_per_m_per_W": self.efficiency_ratio,
                    "length_m": self.track_length,
                }
            ]
        )


def builtin_substrates() -> Dict[str, SubstrateProfile]:
    return {
        name: SubstrateProfile(
            name=name,
            j_max=settings["j_max_mA_per_um2"] * MA_PER_UM2,
            description=settings.get("description", ""),
        )
        for name, settings in SUBSTRATES.items()
    }


def resolve_substrate(name: str, extra: Optional[Iterable[SubstrateProfile]] = None) -> SubstrateProfile:
    """
    Look a substrate up by name; profiles in ``extra`` override built-ins.

    Raises:
        ValueError: unknown substrate name
    """
    profiles = builtin_substrates()
    for profile in extra or ():
        profiles[profile.name] = profile
    if name not in profiles:
        raise ValueError(f"Unknown substrate {name!r} (known: {', '.join(sorted(profiles))})")
    return profiles[name]


def max_current(coil: CoilGeometry, substrate: SubstrateProfile) -> Current:
    return substrate.j_max * cross_section(coil)


def joule_loss_max(coil: CoilGeometry, substrate: SubstrateProfile, material: MaterialProps,
                   length_method: LengthMethod) -> Tuple[Resistance, Power]:
    """
    Track resistance and Joule losses at the maximum current, P = R·I_max².

    Raises:
        UnsupportedCombinationError, GeometryError: from mean_track_length
    """
    length = mean_track_length(coil, length_method)
    resistance = material.resistivity * length / cross_section(coil)
    current = max_current(coil, substrate)
    return resistance, resistance * current ** 2


def joule_power_from_density(coil: CoilGeometry, substrate: SubstrateProfile, material: MaterialProps,
                             length_method: LengthMethod) -> Power:
    """Same losses written as ρ·ℓ·j_max²·S"""
    length = mean_track_length(coil, length_method)
    return material.resistivity * length * substrate.j_max ** 2 * cross_section(coil)


def drive_report(coil: CoilGeometry, substrate: SubstrateProfile, material: MaterialProps,
                 length_method: LengthMethod) -> DriveReport:
    current = max_current(coil, substrate)
    memf = center_field(coil, current)
    resistance, power = joule_loss_max(coil, substrate, material, length_method)
    logger.debug(f"Drive report {coil.describe()} on {substrate.name}: I={current:.6g} A, P={power:.6g} W")

    return DriveReport(
        current_max=current,
        memf=memf,
        resistance=resistance,
        power_max=power,
        efficiency_ratio=memf / power,
        track_length=mean_track_length(coil, length_method),
        substrate=substrate.name,
        length_method=LengthMethod(length_method),
        memf_model=center_field_model(coil),
    )


def family_coil(template: CoilGeometry, turns: int, inner_radius: Length,
                thickness: Optional[Length] = None) -> CoilGeometry:
    """
    Member of the equal width/spacing family with fixed inner and outer radius.

    (2N-1)·w = R_max - R_min, s = w; shape, R_max and (unless given) the
    thickness come from the template.
    """
    width = (template.outer_radius - inner_radius) / (2 * turns - 1)
    return CoilGeometry(
        shape=template.shape,
        turns=turns,
        outer_radius=template.outer_radius,
        track_width=width,
        track_spacing=width,
        track_thickness=template.track_thickness if thickness is None else thickness,
    )


def turns_sweep(template: CoilGeometry, turns_values: Iterable[int], substrate: SubstrateProfile,
                material: MaterialProps, length_method: LengthMethod, normalize: bool = False,
                inner_radius: Optional[Length] = None,
                normalize_to: int = REFERENCE_TURNS) -> pd.DataFrame:
    """
    M.E.M.F., Joule losses and their ratio across the turn-count family.

    Args:
        template: Fixes shape, outer radius and track thickness
        turns_values: Turn counts to evaluate
        substrate: Thermal context giving j_max
        material: Track material
        length_method: Track length formula for the resistance
        normalize: Add ``*_norm`` columns divided by the ``normalize_to`` row
        inner_radius: Family inner radius (default FAMILY_INNER_RADIUS_UM)
        normalize_to: Turn count used as the normalization reference

    Returns:
        One row per N, ordered by N. Rows whose track is narrower than the
        fabrication floor are kept and flagged ``feasible = False``.

    Raises:
        ValueError: normalize requested but ``normalize_to`` is not swept
    """
    inner_radius = um_to_m(FAMILY_INNER_RADIUS_UM) if inner_radius is None else inner_radius
    min_width = um_to_m(FABRICATION_MIN_TRACK_WIDTH_UM)

    rows = []
    for turns in sorted(set(turns_values)):
        coil = family_coil(template, turns, inner_radius)
        report = drive_report(coil, substrate, material, length_method)
        feasible = coil.track_width >= min_width * (1 - 1e-12)
        if not feasible:
            logger.warning(f"N={turns}: track width {m_to_um(coil.track_width):.3g} um is below the fabrication floor")
        rows.append(
            {
                "N": turns,
                "memf_A_per_m": report.memf,
                "P_W": report.power_max,
                "ratio_A_per_m_per_W": report.efficiency_ratio,
                "H_center_per_A": center_field(coil, 1.0),
                "w_um": m_to_um(coil.track_width),
                "I_max_mA": report.current_max * 1e3,
                "feasible": feasible,
            }
        )

    frame = pd.DataFrame(rows, columns=["N"] + SWEEP_COLUMNS + SWEEP_EXTRA_COLUMNS)
    if normalize:
        reference = frame.loc[frame["N"] == normalize_to]
        if reference.empty:
            raise ValueError(f"cannot normalize: N={normalize_to} is not part of the sweep")
        for column in SWEEP_COLUMNS:
            frame[f"{column}_norm"] = frame[column] / reference[column].iloc[0]

    # N, the plotted columns and their _norm twins first; auxiliary columns last
    leading = ["N"] + SWEEP_COLUMNS + [f"{column}_norm" for column in SWEEP_COLUMNS if normalize]
    frame = frame[leading + SWEEP_EXTRA_COLUMNS]

    logger.info(f"Turns sweep: {len(frame)} rows on {substrate.name} ({LengthMethod(length_method).value})")
    return frame


def field_linearity(sweep: pd.DataFrame) -> Dict[str, float]:
    """
    Least-squares fit of the center field per ampere against N.

    Returns:
        slope (A/m per turn at 1 A), intercept and r_squared

    Raises:
        ValueError: fewer than 3 rows
    """
    if len(sweep) < 3:
        raise ValueError("linearity fit needs at least 3 turn counts")
    fit = linregress(sweep["N"].astype(float), sweep["H_center_per_A"])
    return {"slope": float(fit.slope), "intercept": float(fit.intercept), "r_squared": float(fit.rvalue ** 2)}
