"""
Closed-form magnetic field of planar spiral coils

- center field of one turn modelled as a uniform annular current sheet
- center field of the whole coil (sum over turns, closed form for round coils)
- on-axis field of round and square coils in the filament approximation,
  each turn taken at its centerline radius / half-side
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from models.field import FieldProfile, FieldSample
from models.geometry import CoilGeometry, CoilShape, TurnAnnulus, centerline_radii
from models.units import Current, Length, MagneticFieldH

logger = logging.getLogger(__name__)

MODEL_ANNULAR_SHEET = "annular_sheet"
MODEL_SQUARE_EXTENSION = "square_loop_sum (extension, not the annular-sheet formula)"
MODEL_ON_AXIS_ROUND = "filament_on_axis_round"
MODEL_ON_AXIS_SQUARE = "filament_on_axis_square"


def center_field_per_turn(annulus: TurnAnnulus, current: Current) -> MagneticFieldH:
    """Center field of a flat ring of uniform current density"""
    return current / (2.0 * annulus.width) * math.log(annulus.outer_radius / annulus.inner_radius)


def center_field_model(coil: CoilGeometry) -> str:
    return MODEL_ANNULAR_SHEET if coil.shape is CoilShape.ROUND else MODEL_SQUARE_EXTENSION


def center_field(coil: CoilGeometry, current: Current) -> MagneticFieldH:
    """
    Field at the coil center.

    Round coils use the closed-form sum over annular turns. Square coils have no
    annular formula; they fall back to the on-axis square-loop sum at d=0 and are
    tagged by center_field_model().
    """
    if coil.shape is CoilShape.SQUARE:
        logger.debug("Square coil center field uses the square-loop extension")
        return on_axis_field(coil, current, 0.0)

    n = coil.turns
    w = coil.track_width
    total = math.fsum(
        math.log1p(w / (coil.outer_radius - (n - k) * coil.pitch - w))
        for k in range(1, n + 1)
    )
    return current / (2.0 * w) * total


def _on_axis_round(radii: np.ndarray, current: Current, d: np.ndarray) -> np.ndarray:
    d2 = np.expand_dims(np.square(d), -1)
    r2 = np.square(radii)
    return current / 2.0 * np.sum(r2 / (d2 + r2) ** 1.5, axis=-1)


def _on_axis_square(radii: np.ndarray, current: Current, d: np.ndarray) -> np.ndarray:
    d2 = np.expand_dims(np.square(d), -1)
    r2 = np.square(radii)
    return 2.0 * current / math.pi * np.sum(r2 / ((d2 + r2) * np.sqrt(d2 + 2.0 * r2)), axis=-1)


def on_axis_field_array(coil: CoilGeometry, current: Current, distances) -> np.ndarray:
    """Vectorised on_axis_field over an array of distances"""
    radii = np.asarray(centerline_radii(coil))
    d = np.abs(np.asarray(distances, dtype=float))
    if coil.shape is CoilShape.ROUND:
        return _on_axis_round(radii, current, d)
    return _on_axis_square(radii, current, d)


def on_axis_field(coil: CoilGeometry, current: Current, d: Length) -> MagneticFieldH:
    """On-axis field at distance d (negative d is reflected, the field is even in d)"""
    return float(on_axis_field_array(coil, current, d))


def square_on_axis_field_literal(coil: CoilGeometry, current: Current, d: Length) -> MagneticFieldH:
    """Square-coil on-axis field written with sin(arctan(.)) instead of the simplified root"""
    total = 0.0
    for radius in centerline_radii(coil):
        rho2 = d * d + radius * radius
        total += radius / rho2 * math.sin(math.atan(radius / math.sqrt(rho2)))
    return 2.0 * current / math.pi * total


def on_axis_profile(coil: CoilGeometry, current: Current, d_start: Length, d_end: Length,
                    samples: int) -> FieldProfile:
    """
    Uniformly spaced on-axis samples between d_start and d_end (inclusive).

    Raises:
        ValueError: d_start < 0, d_start >= d_end or fewer than 2 samples
    """
    if d_start < 0 or not d_start < d_end:
        raise ValueError(f"invalid distance range [{d_start}, {d_end}]")
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")

    distances = np.linspace(d_start, d_end, samples)
    values = on_axis_field_array(coil, current, distances)
    model = MODEL_ON_AXIS_ROUND if coil.shape is CoilShape.ROUND else MODEL_ON_AXIS_SQUARE
    logger.info(f"On-axis profile: {samples} samples, {coil.describe()}, I={current:g} A")

    return FieldProfile(
        samples=tuple(FieldSample(d=float(d), h=float(h)) for d, h in zip(distances, values)),
        coil=coil,
        current=current,
        model=model,
    )


def shape_twin(coil: CoilGeometry, shape: CoilShape) -> CoilGeometry:
    """Same parameters, other shape (radii become half-sides and vice versa)"""
    data = coil.model_dump()
    data["shape"] = CoilShape(shape)
    return CoilGeometry(**data)


def round_square_crossover(coil: CoilGeometry, current: Current = 1.0, d_low: Length = 0.0,
                           d_high: Optional[Length] = None) -> Length:
    """
    Axial distance where the square twin starts to out-field the round twin.

    Close to the coil the round coil is stronger (π/(2√2) at the center); far away
    the larger square dipole moment wins.

    Raises:
        ValueError: no sign change inside [d_low, d_high]
    """
    round_coil = shape_twin(coil, CoilShape.ROUND)
    square_coil = shape_twin(coil, CoilShape.SQUARE)
    if d_high is None:
        d_high = 20.0 * coil.outer_radius

    def difference(d: float) -> float:
        return on_axis_field(round_coil, current, d) - on_axis_field(square_coil, current, d)

    low, high = difference(d_low), difference(d_high)
    if low * high > 0:
        raise ValueError(f"no round/square crossover in [{d_low:g}, {d_high:g}] m")

    crossover = brentq(difference, d_low, d_high, xtol=1e-12, rtol=1e-12)
    logger.info(f"Round/square crossover at d={crossover:.6g} m for {coil.describe()}")
    return crossover
