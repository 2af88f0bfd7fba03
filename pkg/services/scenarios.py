"""
Coil / actuated-device packaging configurations

S1, S2: coil on silicon, device on the other side of the wafer (S1) or on a
second stacked wafer (S2). K1, K2: the silicon stacks glued on Kapton, coil
sandwiched (current only bounded). K3: coil processed on Kapton, device on
the wafer. K4: coil and device both processed on the Kapton film.
"""

import logging
from enum import Enum
from typing import List, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from config import (
    KAPTON_FILM_UM,
    SCENARIO_KAPTON_CURRENT_MA,
    SCENARIO_SILICON_CURRENT_MA,
    WAFER_THICKNESS_UM,
)
from models.geometry import CoilGeometry
from models.units import Current, Length, MagneticFieldH, a_to_ma, m_to_um, ma_to_a, um_to_m
from services.analytic_field import on_axis_field
from services.drive_power import SubstrateProfile, max_current, resolve_substrate

logger = logging.getLogger(__name__)

SCENARIO_ORDER = ("S1", "S2", "K1", "K2", "K3", "K4")


class CurrentLimitKind(str, Enum):
    EXACT = "exact"
    UPPER_BOUND = "upper_bound"


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    substrate: SubstrateProfile
    separation: Length = Field(gt=0)
    drive_current: Current = Field(gt=0)
    current_limit_kind: CurrentLimitKind
    description: str = ""


class ScenarioResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    scenario_id: str
    current_max: Current
    separation: Length
    h_max: MagneticFieldH
    bound: bool
    note: str = ""

    @property
    def bound_symbol(self) -> str:
        return "<" if self.bound else "="


def builtin_scenarios() -> List[Scenario]:
    wafer = um_to_m(WAFER_THICKNESS_UM)
    film = um_to_m(KAPTON_FILM_UM)
    silicon = resolve_substrate("silicon_on_wafer")
    kapton = resolve_substrate("kapton")
    silicon_current = ma_to_a(SCENARIO_SILICON_CURRENT_MA)
    kapton_current = ma_to_a(SCENARIO_KAPTON_CURRENT_MA)

    return [
        Scenario(id="S1", substrate=silicon, separation=wafer, drive_current=silicon_current,
                 current_limit_kind=CurrentLimitKind.EXACT,
                 description="coil and device on opposite faces of one wafer"),
        Scenario(id="S2", substrate=silicon, separation=2 * wafer, drive_current=silicon_current,
                 current_limit_kind=CurrentLimitKind.EXACT,
                 description="coil wafer stacked on device wafer"),
        Scenario(id="K1", substrate=kapton, separation=2 * wafer, drive_current=kapton_current,
                 current_limit_kind=CurrentLimitKind.UPPER_BOUND,
                 description="S2 stack glued on Kapton, coil sandwiched"),
        Scenario(id="K2", substrate=kapton, separation=wafer, drive_current=kapton_current,
                 current_limit_kind=CurrentLimitKind.UPPER_BOUND,
                 description="S1 die glued on Kapton, coil sandwiched"),
        Scenario(id="K3", substrate=kapton, separation=wafer + film, drive_current=kapton_current,
                 current_limit_kind=CurrentLimitKind.EXACT,
                 description="coil processed on Kapton, device wafer on top"),
        Scenario(id="K4", substrate=kapton, separation=film, drive_current=kapton_current,
                 current_limit_kind=CurrentLimitKind.EXACT,
                 description="coil and device both processed on the Kapton film"),
    ]


def _drive_note(coil: CoilGeometry, scenario: Scenario) -> str:
    if scenario.substrate.name != "silicon_on_wafer":
        return ""
    # the adopted silicon drive exceeds the glued-TO220 limit of the same coil
    to220 = max_current(coil, resolve_substrate("silicon_to220_glued"))
    return (
        f"adopted drive {a_to_ma(scenario.drive_current):g} mA; "
        f"silicon_to220_glued limit for this coil is {a_to_ma(to220):.4g} mA"
    )


def evaluate_scenario(coil: CoilGeometry, scenario: Scenario) -> ScenarioResult:
    """On-axis field at the device for the scenario drive current"""
    h_max = on_axis_field(coil, scenario.drive_current, scenario.separation)
    return ScenarioResult(
        scenario_id=scenario.id,
        current_max=scenario.drive_current,
        separation=scenario.separation,
        h_max=h_max,
        bound=scenario.current_limit_kind is CurrentLimitKind.UPPER_BOUND,
        note=_drive_note(coil, scenario),
    )


def scenario_table(coil: CoilGeometry) -> List[ScenarioResult]:
    """All six configurations in S1, S2, K1, K2, K3, K4 order"""
    by_id = {scenario.id: scenario for scenario in builtin_scenarios()}
    results = [evaluate_scenario(coil, by_id[scenario_id]) for scenario_id in SCENARIO_ORDER]
    best = max(results, key=lambda result: result.h_max)
    logger.info(f"Scenario table for {coil.describe()}: strongest configuration {best.scenario_id}")
    return results


def scenario_frame(results: List[ScenarioResult]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "scenario": result.scenario_id,
                "I_max_mA": a_to_ma(result.current_max),
                "bound": result.bound_symbol,
                "d_um": m_to_um(result.separation),
                "H_A_per_m": result.h_max,
            }
            for result in results
        ]
    )


def render_scenario_table(results: List[ScenarioResult]) -> str:
    """Aligned text table: configuration, I_max, distance, H_max ("<" on bounded rows)"""
    header: Tuple[str, ...] = ("Configuration", "I_max (mA)", "Distance coil-device (um)", "H_max (A/m)")
    rows = []
    for result in results:
        prefix = "< " if result.bound else ""
        rows.append(
            (
                result.scenario_id,
                f"{prefix}{a_to_ma(result.current_max):.4g}",
                f"{m_to_um(result.separation):.4g}",
                f"{prefix}{result.h_max:.4g}",
            )
        )
    widths = [max(len(row[i]) for row in rows + [header]) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(width) for cell, width in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * width for width in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    notes = sorted({result.note for result in results if result.note})
    lines.extend(f"note: {note}" for note in notes)
    return "\n".join(lines)
