import math

import numpy as np
import pytest
from pydantic import ValidationError

from models.errors import SingularityError
from models.geometry import CoilShape, centerline_radii
from services.analytic_field import on_axis_field, shape_twin
from services.biot_savart import (
    DiscretizationSpec,
    FilamentPath,
    field_at,
    field_of_filaments,
    lateral_profile,
    segment_field,
    sensor_averaged_field,
    sensor_averaged_profile,
    spiral_to_filaments,
)
from tests.conftest import make_coil


def _axial(coil, d, spec=None, current=1.0):
    return field_at(coil, current, (0.0, 0.0, d), spec)[2]


def test_infinite_line_limit():
    rho = 1e-4
    xs = np.linspace(-1e4 * rho, 1e4 * rho, 201)
    line = FilamentPath(points=np.column_stack((xs, np.zeros_like(xs), np.zeros_like(xs))), current=2.0, closed=False)
    field = field_of_filaments([line], (0.0, rho, 0.0))
    assert field[2] == pytest.approx(2.0 / (2 * math.pi * rho), rel=1e-6)
    assert abs(field[0]) < 1e-9 * abs(field[2])
    assert abs(field[1]) < 1e-9 * abs(field[2])


def test_square_loop_center():
    a = 250e-6
    corners = [(a, -a, 0.0), (a, a, 0.0), (-a, a, 0.0), (-a, -a, 0.0)]
    loop = FilamentPath(points=corners, current=1.0)
    assert field_of_filaments([loop], (0.0, 0.0, 0.0))[2] == pytest.approx(math.sqrt(2) / (math.pi * a), rel=1e-12)


def test_reversed_segment_negates_field():
    a, b, p = (0.0, 0.0, 0.0), (1e-3, 2e-4, 0.0), (3e-4, 5e-4, 1e-4)
    np.testing.assert_allclose(segment_field(a, b, 1.0, p), -segment_field(b, a, 1.0, p), rtol=1e-14)


def test_segment_errors():
    with pytest.raises(ValueError):
        segment_field((0, 0, 0), (0, 0, 0), 1.0, (1, 1, 1))
    with pytest.raises(SingularityError):
        segment_field((0, 0, 0), (1e-3, 0, 0), 1.0, (5e-4, 0, 0))


@pytest.mark.parametrize(
    "points, closed",
    [
        ([(0, 0, 0)], True),
        ([(0, 0, 0), (0, 0, 0), (1, 0, 0)], False),
        ([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 0, 0)], True),
        ([(0, 0), (1, 0)], False),
    ],
)
def test_filament_path_validation(points, closed):
    with pytest.raises(ValidationError):
        FilamentPath(points=points, current=1.0, closed=closed)


@pytest.mark.parametrize("segments", [4, 0])
def test_discretization_bounds(segments):
    with pytest.raises(ValidationError):
        DiscretizationSpec(segments_per_turn=segments)


def test_square_filament_count(reference_square):
    filaments = spiral_to_filaments(reference_square, DiscretizationSpec(filaments_per_track_width=3))
    assert sum(len(f.segments()[0]) for f in filaments) == 4 * 40 * 3
    assert sum(f.current for f in filaments) == pytest.approx(40.0)


def test_single_filament_sits_on_centerline(reference_coil):
    filaments = spiral_to_filaments(reference_coil, DiscretizationSpec(segments_per_turn=64))
    radii = [float(np.hypot(*f.points[0][:2])) for f in filaments]
    np.testing.assert_allclose(radii, centerline_radii(reference_coil), rtol=1e-12)


@pytest.mark.parametrize("d", [0.0, 50e-6, 280e-6, 2e-3])
def test_square_oracle_matches_closed_form(reference_square, d):
    assert _axial(reference_square, d) == pytest.approx(on_axis_field(reference_square, 1.0, d), rel=1e-9)


@pytest.mark.parametrize("d", [0.0, 280e-6, 1e-3])
def test_round_oracle_matches_closed_form(reference_coil, d):
    spec = DiscretizationSpec(segments_per_turn=4096)
    assert _axial(reference_coil, d, spec) == pytest.approx(on_axis_field(reference_coil, 1.0, d), rel=1e-5)


def test_polygon_convergence_is_second_order(reference_coil):
    exact = on_axis_field(reference_coil, 1.0, 0.0)
    errors = []
    for n in (32, 64, 128):
        error = abs(_axial(reference_coil, 0.0, DiscretizationSpec(segments_per_turn=n)) - exact) / exact
        # inscribed n-gon: (n/pi) tan(pi/n) - 1
        assert error == pytest.approx(n / math.pi * math.tan(math.pi / n) - 1, rel=1e-6)
        errors.append(error)
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.5 <= coarse / fine <= 4.5


@pytest.mark.parametrize("x", [100e-6, 300e-6, 700e-6])
def test_axial_component_even_in_x(reference_square, x):
    plus = field_at(reference_square, 1.0, (x, 0.0, 1e-3))[2]
    minus = field_at(reference_square, 1.0, (-x, 0.0, 1e-3))[2]
    assert plus == pytest.approx(minus, rel=1e-12)


def test_round_axial_component_even_in_x(reference_coil):
    plus = field_at(reference_coil, 1.0, (400e-6, 0.0, 2e-3))[2]
    minus = field_at(reference_coil, 1.0, (-400e-6, 0.0, 2e-3))[2]
    assert plus == pytest.approx(minus, rel=1e-10)


def test_superposition(reference_coil):
    small = make_coil(turns=5, outer_um=200.0)
    both = spiral_to_filaments(reference_coil) + spiral_to_filaments(small)
    point = (150e-6, -80e-6, 300e-6)
    expected = field_at(reference_coil, 1.0, point) + field_at(small, 1.0, point)
    np.testing.assert_allclose(field_of_filaments(both, point), expected, rtol=1e-12, atol=1e-6)


def test_lateral_profiles(reference_coil):
    normalized = {}
    for d in (2e-3, 3e-3):
        profile = lateral_profile(reference_coil, 0.3, d, -1e-3, 1e-3, 41)
        assert profile.model == "biot_savart"
        values = np.array(profile.normalized())
        np.testing.assert_allclose(values, values[::-1], rtol=1e-9)
        center = len(values) // 2
        assert values[center] == pytest.approx(1.0, rel=1e-9)
        assert np.all(np.diff(values[center:]) < 0)
        normalized[d] = values

    # x = +0.5 mm is sample 30
    assert normalized[2e-3][30] >= 0.75
    assert normalized[2e-3][30] == pytest.approx(0.83, abs=0.03)
    assert np.all(normalized[3e-3][21:] > normalized[2e-3][21:])


def test_lateral_profile_frame(reference_coil):
    frame = lateral_profile(reference_coil, 0.3, 2e-3, -5e-4, 5e-4, 5).to_frame(include_normalized=True)
    assert frame.columns.tolist() == ["d_m", "x_m", "H_A_per_m", "H_norm"]
    assert len(frame) == 5


@pytest.mark.parametrize("d, start, end, samples", [(0.0, -1e-3, 1e-3, 11), (1e-3, 1e-3, -1e-3, 11),
                                                    (1e-3, -1e-3, 1e-3, 1)])
def test_lateral_argument_errors(reference_coil, d, start, end, samples):
    with pytest.raises(ValueError):
        lateral_profile(reference_coil, 1.0, d, start, end, samples)


def test_degenerate_window_equals_point_field(reference_coil):
    d = 500e-6
    averaged = sensor_averaged_field(reference_coil, 1.0, d, window_length=1e-9)
    assert averaged == pytest.approx(on_axis_field(reference_coil, 1.0, d), rel=1e-3)


def test_window_average_lies_between_end_values(reference_coil):
    d, window = 300e-6, 2e-3
    averaged = sensor_averaged_field(reference_coil, 0.3, d, window)
    assert on_axis_field(reference_coil, 0.3, d + window) < averaged < on_axis_field(reference_coil, 0.3, d)


def test_reference_sensor_average(reference_coil):
    averaged = sensor_averaged_field(reference_coil, 0.3, 2e-3)
    assert 0 < averaged < on_axis_field(reference_coil, 0.3, 2e-3)


def test_centered_window_is_reflected(reference_coil):
    centered = sensor_averaged_field(reference_coil, 1.0, 0.0, window_length=1e-3, centered=True)
    one_sided = sensor_averaged_field(reference_coil, 1.0, 0.0, window_length=5e-4)
    assert centered == pytest.approx(one_sided, rel=0.02)


def test_sensor_argument_errors(reference_coil):
    with pytest.raises(ValueError):
        sensor_averaged_field(reference_coil, 1.0, -1e-3)
    with pytest.raises(ValueError):
        sensor_averaged_field(reference_coil, 1.0, 1e-3, window_length=0.0)
    with pytest.raises(ValueError):
        sensor_averaged_field(reference_coil, 1.0, 1e-3, samples=32)


def test_sensor_profile_round_beats_square_only_close(reference_coil):
    square = shape_twin(reference_coil, CoilShape.SQUARE)
    round_profile = sensor_averaged_profile(reference_coil, 0.3, [0.0, 5e-3])
    square_profile = sensor_averaged_profile(square, 0.3, [0.0, 5e-3])
    assert round_profile.model == "biot_savart_sensor_average"
    assert round_profile.values[0] > 0
    assert round_profile.values[1] < round_profile.values[0]
    assert square_profile.values[1] > round_profile.values[1]


def test_lateral_profile_uniformity_note(reference_coil):
    profile = lateral_profile(reference_coil, 0.3, 2e-3, -1e-3, 1e-3, 41)
    (note,) = profile.notes
    ratio = profile.normalized()[30]
    assert f"{ratio:.4f}" in note
    assert profile.metadata()["notes"] == [note]

    # x = 0.5 mm outside the sampled range: nothing to report
    assert lateral_profile(reference_coil, 0.3, 2e-3, -2e-4, 2e-4, 5).notes == ()


def test_zero_current_profile_normalizes_to_nan(reference_coil):
    profile = lateral_profile(reference_coil, 0.0, 2e-3, -5e-4, 5e-4, 5)
    assert profile.reference_h == 0.0
    assert all(math.isnan(value) for value in profile.normalized())
    assert profile.notes == ()
