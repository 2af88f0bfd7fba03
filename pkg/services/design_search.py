"""
Exhaustive constrained search over coil parameters
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config import (
    COIL_OUTER_RADIUS_UM,
    FABRICATION_MAX_THICKNESS_UM,
    FABRICATION_MIN_SPACING_UM,
    FABRICATION_MIN_TRACK_WIDTH_UM,
    FAMILY_INNER_RADIUS_UM,
    REFERENCE_TURNS,
    SEARCH_WORKERS,
)
from models.errors import EmptyResultError, GeometryError
from models.geometry import CoilGeometry, CoilShape, LengthMethod
from models.units import Length, m_to_um, um_to_m
from services.analytic_field import center_field
from services.drive_power import DriveReport, MaterialProps, SubstrateProfile, drive_report, family_coil

logger = logging.getLogger(__name__)

# widths/spacings equal to a bound within this relative slack are accepted
_BOUND_SLACK = 1e-9

Candidate = Tuple[int, Length, Length, Length]


class Objective(str, Enum):
    MAX_MEMF = "max_memf"
    MAX_EFFICIENCY_RATIO = "max_efficiency_ratio"
    MAX_FIELD_PER_AMPERE = "max_field_per_ampere"


class DesignConstraints(BaseModel):
    model_config = ConfigDict(frozen=True)

    min_track_width: Length = Field(default_factory=lambda: um_to_m(FABRICATION_MIN_TRACK_WIDTH_UM), gt=0)
    min_spacing: Length = Field(default_factory=lambda: um_to_m(FABRICATION_MIN_SPACING_UM), gt=0)
    max_thickness: Length = Field(default_factory=lambda: um_to_m(FABRICATION_MAX_THICKNESS_UM), gt=0)
    outer_radius: Length = Field(default_factory=lambda: um_to_m(COIL_OUTER_RADIUS_UM), gt=0)
    turns_min: int = Field(default=1, ge=1)
    turns_max: int = Field(default=REFERENCE_TURNS, ge=1)

    @model_validator(mode="after")
    def _check_turns_range(self) -> "DesignConstraints":
        if self.turns_min > self.turns_max:
            raise ValueError(f"empty turns range [{self.turns_min}, {self.turns_max}]")
        return self

    def check_candidate(self, turns: int, width: Length, spacing: Length, thickness: Length) -> None:
        """Raises ValueError when a grid value lies outside the constraints"""
        if not self.turns_min <= turns <= self.turns_max:
            raise ValueError(f"N={turns} outside [{self.turns_min}, {self.turns_max}]")
        if width < self.min_track_width * (1 - _BOUND_SLACK):
            raise ValueError(f"track width {m_to_um(width):g} um below {m_to_um(self.min_track_width):g} um")
        if spacing < self.min_spacing * (1 - _BOUND_SLACK):
            raise ValueError(f"spacing {m_to_um(spacing):g} um below {m_to_um(self.min_spacing):g} um")
        if thickness > self.max_thickness * (1 + _BOUND_SLACK):
            raise ValueError(f"thickness {m_to_um(thickness):g} um above {m_to_um(self.max_thickness):g} um")


class RankedDesign(BaseModel):
    model_config = ConfigDict(frozen=True)

    rank: int
    coil: CoilGeometry
    report: DriveReport
    objective_value: float


class SearchResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    objective: Objective
    ranked: Tuple[RankedDesign, ...]
    evaluated: int
    infeasible: int

    @property
    def best(self) -> RankedDesign:
        return self.ranked[0]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "rank": design.rank,
                    "N": design.coil.turns,
                    "w_um": m_to_um(design.coil.track_width),
                    "s_um": m_to_um(design.coil.track_spacing),
                    "t_um": m_to_um(design.coil.track_thickness),
                    "I_max_mA": design.report.current_max * 1e3,
                    "memf": design.report.memf,
                    "P_W": design.report.power_max,
                    "ratio": design.report.efficiency_ratio,
                }
                for design in self.ranked
            ],
            columns=["rank", "N", "w_um", "s_um", "t_um", "I_max_mA", "memf", "P_W", "ratio"],
        )


def objective_value(objective: Objective, coil: CoilGeometry, report: DriveReport) -> float:
    objective = Objective(objective)
    if objective is Objective.MAX_MEMF:
        return report.memf
    if objective is Objective.MAX_EFFICIENCY_RATIO:
        return report.efficiency_ratio
    return center_field(coil, 1.0)


def _evaluate(coil: Optional[CoilGeometry], substrate: SubstrateProfile, material: MaterialProps,
              length_method: LengthMethod) -> Optional[DriveReport]:
    if coil is None:
        return None
    try:
        return drive_report(coil, substrate, material, length_method)
    except GeometryError as e:
        logger.debug(f"Skipping {coil.describe()}: {e}")
        return None


def _build_coil(shape: CoilShape, outer_radius: Length, candidate: Candidate) -> Optional[CoilGeometry]:
    turns, width, spacing, thickness = candidate
    try:
        return CoilGeometry(shape=shape, turns=turns, outer_radius=outer_radius, track_width=width,
                            track_spacing=spacing, track_thickness=thickness)
    except ValidationError:
        return None


def rank_coils(coils: Sequence[Optional[CoilGeometry]], objective: Objective, substrate: SubstrateProfile,
               material: MaterialProps, length_method: LengthMethod = LengthMethod.CLOSED_FORM) -> SearchResult:
    """
    Evaluate candidate coils (None = geometrically infeasible) and rank them.

    Ranking is by objective descending, ties broken by smaller N, w, s, t.

    Raises:
        EmptyResultError: no feasible candidate
    """
    objective = Objective(objective)
    with ThreadPoolExecutor(max_workers=max(1, SEARCH_WORKERS)) as executor:
        reports = list(executor.map(lambda coil: _evaluate(coil, substrate, material, length_method), coils))

    scored = [
        (objective_value(objective, coil, report), coil, report)
        for coil, report in zip(coils, reports)
        if report is not None
    ]
    infeasible = len(coils) - len(scored)
    if not scored:
        raise EmptyResultError(f"no feasible design among {len(coils)} grid points")

    scored.sort(key=lambda item: (
        -item[0],
        item[1].turns,
        item[1].track_width,
        item[1].track_spacing,
        item[1].track_thickness,
    ))
    ranked = tuple(
        RankedDesign(rank=index, coil=coil, report=report, objective_value=value)
        for index, (value, coil, report) in enumerate(scored, start=1)
    )
    logger.info(
        f"Design search ({objective.value}): {len(coils)} points, {infeasible} infeasible, "
        f"best {ranked[0].coil.describe()}"
    )
    return SearchResult(objective=objective, ranked=ranked, evaluated=len(coils), infeasible=infeasible)


def grid_search(constraints: DesignConstraints, objective: Objective, substrate: SubstrateProfile,
                material: MaterialProps, turns_grid: Iterable[int], width_grid: Iterable[Length],
                spacing_grid: Iterable[Length], thickness_grid: Iterable[Length],
                length_method: LengthMethod = LengthMethod.CLOSED_FORM,
                shape: CoilShape = CoilShape.ROUND) -> SearchResult:
    """
    Exhaustive search over the Cartesian product of the grids.

    Points whose inner radius would not be positive are skipped and counted in
    ``SearchResult.infeasible``.

    Raises:
        ValueError: a grid value lies outside the constraints
        EmptyResultError: no feasible grid point
    """
    candidates = list(itertools.product(sorted(set(turns_grid)), sorted(set(width_grid)),
                                        sorted(set(spacing_grid)), sorted(set(thickness_grid))))
    for candidate in candidates:
        constraints.check_candidate(*candidate)

    coils = [_build_coil(CoilShape(shape), constraints.outer_radius, candidate) for candidate in candidates]
    return rank_coils(coils, objective, substrate, material, length_method)


def family_search(constraints: DesignConstraints, objective: Objective, substrate: SubstrateProfile,
                  material: MaterialProps, turns_grid: Iterable[int], thickness_grid: Iterable[Length],
                  inner_radius: Optional[Length] = None,
                  length_method: LengthMethod = LengthMethod.CLOSED_FORM,
                  shape: CoilShape = CoilShape.ROUND) -> SearchResult:
    """Search the w = s family with fixed inner and outer radius (w tied to N)"""
    inner_radius = um_to_m(FAMILY_INNER_RADIUS_UM) if inner_radius is None else inner_radius
    thicknesses = sorted(set(thickness_grid))
    template = CoilGeometry(shape=CoilShape(shape), turns=1, outer_radius=constraints.outer_radius,
                            track_width=constraints.outer_radius - inner_radius, track_spacing=0.0,
                            track_thickness=thicknesses[0])

    coils = []
    for turns, thickness in itertools.product(sorted(set(turns_grid)), thicknesses):
        coil = family_coil(template, turns, inner_radius, thickness)
        constraints.check_candidate(coil.turns, coil.track_width, coil.track_spacing, coil.track_thickness)
        coils.append(coil)
    return rank_coils(coils, objective, substrate, material, length_method)
