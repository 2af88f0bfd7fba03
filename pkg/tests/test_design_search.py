import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from models.errors import EmptyResultError
from services.design_search import DesignConstraints, Objective, family_search, grid_search
from services.drive_power import MaterialProps, SubstrateProfile, resolve_substrate

FAMILY_TURNS = list(range(5, 41, 5))
UM = 1e-6


@pytest.fixture
def constraints():
    return DesignConstraints()


@pytest.mark.parametrize(
    "objective, expected_turns",
    [
        (Objective.MAX_MEMF, 5),
        (Objective.MAX_EFFICIENCY_RATIO, 5),
        (Objective.MAX_FIELD_PER_AMPERE, 40),
    ],
)
def test_family_winners(constraints, to220, copper, objective, expected_turns):
    result = family_search(constraints, objective, to220, copper, FAMILY_TURNS, [10 * UM])
    assert result.best.coil.turns == expected_turns
    assert result.evaluated == len(FAMILY_TURNS)
    assert result.infeasible == 0
    values = [design.objective_value for design in result.ranked]
    assert values == sorted(values, reverse=True)


def test_ranking_independent_of_enumeration_order(constraints, to220, copper):
    shuffled = FAMILY_TURNS[:]
    random.Random(7).shuffle(shuffled)
    first = family_search(constraints, Objective.MAX_EFFICIENCY_RATIO, to220, copper, FAMILY_TURNS,
                          [10 * UM, 20 * UM])
    second = family_search(constraints, Objective.MAX_EFFICIENCY_RATIO, to220, copper, iter(shuffled),
                           (t for t in [20 * UM, 10 * UM]))
    assert first.to_frame().equals(second.to_frame())


def test_grid_search_counts_infeasible_points(constraints, to220, copper):
    result = grid_search(constraints, Objective.MAX_MEMF, to220, copper,
                         turns_grid=[10, 40], width_grid=[5 * UM, 10 * UM], spacing_grid=[5 * UM, 10 * UM],
                         thickness_grid=[10 * UM])
    # N=40 only fits with w = s = 5 um
    assert result.evaluated == 8
    assert result.infeasible == 3
    assert len(result.ranked) == 5
    assert [design.rank for design in result.ranked] == [1, 2, 3, 4, 5]
    frame = result.to_frame()
    assert frame.columns.tolist() == ["rank", "N", "w_um", "s_um", "t_um", "I_max_mA", "memf", "P_W", "ratio"]


def test_thicker_track_raises_memf(constraints, to220, copper):
    result = grid_search(constraints, Objective.MAX_MEMF, to220, copper, [20], [5 * UM], [5 * UM],
                         [10 * UM, 20 * UM])
    assert result.best.coil.track_thickness == pytest.approx(20 * UM)


def test_ties_prefer_fewer_turns(constraints, to220, copper):
    # the field per ampere does not depend on the thickness
    result = grid_search(constraints, Objective.MAX_FIELD_PER_AMPERE, to220, copper, [10], [5 * UM], [5 * UM],
                         [20 * UM, 10 * UM])
    assert [design.coil.track_thickness for design in result.ranked] == pytest.approx([10 * UM, 20 * UM])


@pytest.mark.parametrize(
    "turns, width, spacing, thickness",
    [
        ([41], [5 * UM], [5 * UM], [10 * UM]),
        ([10], [4 * UM], [5 * UM], [10 * UM]),
        ([10], [5 * UM], [4 * UM], [10 * UM]),
        ([10], [5 * UM], [5 * UM], [25 * UM]),
    ],
)
def test_grid_values_outside_constraints(constraints, to220, copper, turns, width, spacing, thickness):
    with pytest.raises(ValueError):
        grid_search(constraints, Objective.MAX_MEMF, to220, copper, turns, width, spacing, thickness)


def test_empty_result(constraints, to220, copper):
    with pytest.raises(EmptyResultError):
        grid_search(constraints, Objective.MAX_MEMF, to220, copper, [40], [10 * UM], [10 * UM], [10 * UM])


def test_constraints_validation():
    with pytest.raises(ValueError):
        DesignConstraints(turns_min=10, turns_max=5)
    with pytest.raises(ValueError):
        DesignConstraints(min_track_width=0.0)


def _design_keys(result):
    return [(d.coil.turns, d.coil.track_width, d.coil.track_spacing, d.coil.track_thickness) for d in result.ranked]


GRID = dict(turns_grid=[5, 10, 20, 40], width_grid=[5 * UM, 10 * UM], spacing_grid=[5 * UM, 10 * UM],
            thickness_grid=[10 * UM, 20 * UM])


@pytest.mark.parametrize("objective", list(Objective))
@pytest.mark.parametrize("alpha", [0.25, 3.0])
def test_scaled_objective_keeps_ranking(constraints, copper, objective, alpha):
    # scaling j_max scales M.E.M.F. by alpha and the efficiency ratio by 1/alpha
    base = SubstrateProfile(name="base", j_max=3.5e9)
    scaled = SubstrateProfile(name="scaled", j_max=alpha * 3.5e9)
    first = grid_search(constraints, objective, base, copper, **GRID)
    second = grid_search(constraints, objective, scaled, copper, **GRID)
    assert _design_keys(first) == _design_keys(second)


@given(
    st.lists(st.integers(min_value=1, max_value=24), min_size=1, max_size=5, unique=True),
    st.lists(st.sampled_from([5 * UM, 6 * UM, 8 * UM, 10 * UM]), min_size=1, max_size=3, unique=True),
    st.lists(st.sampled_from([5 * UM, 7 * UM, 10 * UM]), min_size=1, max_size=3, unique=True),
    st.lists(st.sampled_from([5 * UM, 10 * UM, 20 * UM]), min_size=1, max_size=2, unique=True),
)
def test_memf_winner_has_most_turns_in_its_track_group(turns, widths, spacings, thicknesses):
    result = grid_search(DesignConstraints(), Objective.MAX_MEMF, resolve_substrate("silicon_to220_glued"),
                         MaterialProps(), turns, widths, spacings, thicknesses)
    best = result.best.coil
    same_track = [
        design.coil.turns
        for design in result.ranked
        if (design.coil.track_width, design.coil.track_spacing, design.coil.track_thickness)
        == (best.track_width, best.track_spacing, best.track_thickness)
    ]
    assert best.turns == max(same_track)
