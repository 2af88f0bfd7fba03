"""
Analytic formulas versus the Biot-Savart oracle

Every check compares a closed-form result with an independent evaluation and
reports the largest relative error seen against its tolerance. The convergence
row reports |ratio - 4| / 4 for one doubling of the polygon resolution.
"""

import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from config import ORACLE_ANNULUS_FILAMENTS
from models.geometry import CoilGeometry, CoilShape, TurnAnnulus, turn_annuli
from models.units import Length
from services.analytic_field import (
    center_field,
    center_field_per_turn,
    on_axis_field,
    shape_twin,
    square_on_axis_field_literal,
)
from services.biot_savart import DiscretizationSpec, field_at

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["check", "max_rel_error", "tolerance", "passed"]

# on-axis sample points, in units of the outer radius
AXIS_POINTS = (0.0, 0.1, 0.5, 1.0, 5.0)

ANNULUS_SEGMENTS = 128
ROUND_ORACLE_SEGMENTS = 4096
CONVERGENCE_LADDER = (64, 128)

CheckRow = Tuple[str, float, float]


def _rel_error(value: float, reference: float) -> float:
    if reference == 0.0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def _axis_distances(coil: CoilGeometry) -> List[Length]:
    return [factor * coil.outer_radius for factor in AXIS_POINTS]


def _axial_oracle(coil: CoilGeometry, d: Length, spec: DiscretizationSpec) -> float:
    return float(field_at(coil, 1.0, (0.0, 0.0, d), spec)[2])


def _max_axis_error(coil: CoilGeometry, spec: DiscretizationSpec) -> float:
    return max(
        _rel_error(_axial_oracle(coil, d, spec), on_axis_field(coil, 1.0, d))
        for d in _axis_distances(coil)
    )


def check_center_sum(coil: CoilGeometry) -> CheckRow:
    """Closed-form center field against the sum of per-turn annular sheets"""
    round_coil = shape_twin(coil, CoilShape.ROUND)
    per_turn = math.fsum(center_field_per_turn(annulus, 1.0) for annulus in turn_annuli(round_coil))
    return "center_closed_form_vs_turn_sum", _rel_error(center_field(round_coil, 1.0), per_turn), 1e-12


def polygon_factor(segments: int) -> float:
    """Center field of a regular polygon inscribed in a circle, relative to the circle"""
    return segments / math.pi * math.tan(math.pi / segments)


def check_annulus_filaments(coil: CoilGeometry, filaments: int = ORACLE_ANNULUS_FILAMENTS) -> CheckRow:
    """
    One current sheet spanning the whole winding (R_min to R_max) split into
    concentric filaments, field at the center vs the annular-sheet formula.

    The sheet is wide next to its inner radius, so the filament count sets the
    error; the inscribed-polygon factor of each loop is divided out exactly.
    """
    round_coil = shape_twin(coil, CoilShape.ROUND)
    sheet = TurnAnnulus(index=1, inner_radius=round_coil.inner_radius, outer_radius=round_coil.outer_radius)
    single_turn = CoilGeometry(
        shape=CoilShape.ROUND,
        turns=1,
        outer_radius=sheet.outer_radius,
        track_width=sheet.width,
        track_spacing=round_coil.track_spacing,
        track_thickness=round_coil.track_thickness,
    )
    spec = DiscretizationSpec(segments_per_turn=ANNULUS_SEGMENTS, filaments_per_track_width=filaments)
    oracle = _axial_oracle(single_turn, 0.0, spec) / polygon_factor(ANNULUS_SEGMENTS)
    return "annulus_filaments_vs_sheet", _rel_error(oracle, center_field_per_turn(sheet, 1.0)), 1e-3


def check_square_axis(coil: CoilGeometry) -> CheckRow:
    square_coil = shape_twin(coil, CoilShape.SQUARE)
    spec = DiscretizationSpec(filaments_per_track_width=1)
    return "square_oracle_vs_axis_formula", _max_axis_error(square_coil, spec), 1e-9


def check_round_axis(coil: CoilGeometry) -> CheckRow:
    round_coil = shape_twin(coil, CoilShape.ROUND)
    spec = DiscretizationSpec(segments_per_turn=ROUND_ORACLE_SEGMENTS, filaments_per_track_width=1)
    return "round_oracle_4096_vs_axis_formula", _max_axis_error(round_coil, spec), 1e-5


def polygon_errors(coil: CoilGeometry, ladder: Sequence[int] = CONVERGENCE_LADDER) -> List[float]:
    """Center-field error of the round polygon oracle for each segments_per_turn in ladder"""
    round_coil = shape_twin(coil, CoilShape.ROUND)
    exact = on_axis_field(round_coil, 1.0, 0.0)
    return [
        _rel_error(_axial_oracle(round_coil, 0.0, DiscretizationSpec(segments_per_turn=segments)), exact)
        for segments in ladder
    ]


def check_convergence(coil: CoilGeometry) -> CheckRow:
    coarse, fine = polygon_errors(coil)
    ratio = coarse / fine
    logger.debug(f"Polygon error {coarse:.3e} -> {fine:.3e} (ratio {ratio:.4f})")
    return "polygon_convergence_order", abs(ratio - 4.0) / 4.0, 0.125


def check_square_literal(coil: CoilGeometry) -> CheckRow:
    square_coil = shape_twin(coil, CoilShape.SQUARE)
    error = max(
        _rel_error(square_on_axis_field_literal(square_coil, 1.0, d), on_axis_field(square_coil, 1.0, d))
        for d in _axis_distances(square_coil)
    )
    return "square_formula_literal_vs_simplified", error, 1e-12


def run_oracle_check(coil: CoilGeometry, annulus_filaments: int = ORACLE_ANNULUS_FILAMENTS) -> pd.DataFrame:
    """
    Run the whole equivalence suite on a coil (both shape twins are used).

    Args:
        coil: Coil whose parameters drive every check
        annulus_filaments: Filaments used to split the innermost turn

    Returns:
        DataFrame with columns check, max_rel_error, tolerance, passed
    """
    checks: List[Callable[[], CheckRow]] = [
        lambda: check_center_sum(coil),
        lambda: check_annulus_filaments(coil, annulus_filaments),
        lambda: check_square_axis(coil),
        lambda: check_round_axis(coil),
        lambda: check_convergence(coil),
        lambda: check_square_literal(coil),
    ]

    rows = []
    for check in checks:
        name, error, tolerance = check()
        passed = bool(np.isfinite(error) and error <= tolerance)
        if not passed:
            logger.warning(f"Oracle check {name} failed: {error:.3e} > {tolerance:.0e}")
        rows.append({"check": name, "max_rel_error": error, "tolerance": tolerance, "passed": passed})

    report = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    logger.info(f"Oracle check on {coil.describe()}: {int(report['passed'].sum())}/{len(report)} passed")
    return report
