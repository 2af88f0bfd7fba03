"""
Biot-Savart oracle for planar spiral coils

Each turn is replaced by concentric closed filament loops (polygons for round
coils, exact squares for square coils) and the field is summed with the exact
finite straight-segment Biot-Savart formula. The result is independent of the
closed-form module and is used to validate it, and to reach off-axis points.
"""

import logging
import math
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import (
    DEFAULT_FILAMENTS_PER_TRACK,
    DEFAULT_SEGMENTS_PER_TURN,
    LATERAL_CHECK_OFFSET_UM,
    LATERAL_UNIFORMITY_TARGET,
    ORACLE_CHUNK_SEGMENTS,
    SENSOR_SAMPLES,
    SENSOR_WINDOW_UM,
    SINGULARITY_GUARD_M,
)
from models.errors import SingularityError
from models.field import FieldProfile, FieldSample
from models.geometry import CoilGeometry, CoilShape, turn_annuli
from models.units import Current, Length, MagneticFieldH, um_to_m

logger = logging.getLogger(__name__)

MODEL_BIOT_SAVART = "biot_savart"
MODEL_SENSOR_AVERAGE = "biot_savart_sensor_average"

SegmentChunk = Tuple[np.ndarray, np.ndarray, np.ndarray]


class DiscretizationSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    segments_per_turn: int = Field(default=DEFAULT_SEGMENTS_PER_TURN, ge=8)
    filaments_per_track_width: int = Field(default=DEFAULT_FILAMENTS_PER_TRACK, ge=1)


class FilamentPath(BaseModel):
    """Polyline of 3-D points (m) carrying a current; closure is implied by ``closed``"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: np.ndarray
    current: Current
    closed: bool = True

    @field_validator("points", mode="before")
    @classmethod
    def _as_point_array(cls, value) -> np.ndarray:
        points = np.array(value, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {points.shape}")
        points.setflags(write=False)
        return points

    @model_validator(mode="after")
    def _check_points(self) -> "FilamentPath":
        if len(self.points) < 2:
            raise ValueError("a filament needs at least 2 points")
        steps = np.diff(self.points, axis=0)
        if np.any(np.all(steps == 0.0, axis=1)):
            raise ValueError("consecutive filament points must be distinct")
        if self.closed and np.array_equal(self.points[0], self.points[-1]):
            raise ValueError("closed filaments must not repeat the first point")
        if not math.isfinite(self.current):
            raise ValueError("filament current must be finite")
        return self

    def segments(self) -> Tuple[np.ndarray, np.ndarray]:
        """Start and end points of every straight segment"""
        starts = self.points
        if self.closed:
            ends = np.roll(self.points, -1, axis=0)
        else:
            starts, ends = self.points[:-1], self.points[1:]
        return starts, ends


def _segments_field(starts: np.ndarray, ends: np.ndarray, currents: np.ndarray,
                    point: np.ndarray) -> np.ndarray:
    r1 = starts - point
    r2 = ends - point
    direction = ends - starts

    # distance from the point to each closed segment
    length2 = np.einsum("ij,ij->i", direction, direction)
    t = np.clip(-np.einsum("ij,ij->i", r1, direction) / length2, 0.0, 1.0)
    closest = r1 + t[:, None] * direction
    distance = np.sqrt(np.einsum("ij,ij->i", closest, closest))
    if np.any(distance < SINGULARITY_GUARD_M):
        index = int(np.argmin(distance))
        raise SingularityError(
            f"field point {point.tolist()} is within {SINGULARITY_GUARD_M:g} m of segment "
            f"{starts[index].tolist()} -> {ends[index].tolist()}"
        )

    n1 = np.sqrt(np.einsum("ij,ij->i", r1, r1))
    n2 = np.sqrt(np.einsum("ij,ij->i", r2, r2))
    dot = np.einsum("ij,ij->i", r1, r2)
    factor = currents / (4.0 * math.pi) * (n1 + n2) / (n1 * n2 * (n1 * n2 + dot))
    return np.sum(np.cross(r1, r2) * factor[:, None], axis=0)


def segment_field(a: Sequence[float], b: Sequence[float], current: Current,
                  point: Sequence[float]) -> np.ndarray:
    """
    H vector (A/m) of a straight filament from a to b at point.

    Raises:
        ValueError: a == b
        SingularityError: point within the singularity guard of the segment
    """
    start = np.asarray(a, dtype=float).reshape(1, 3)
    end = np.asarray(b, dtype=float).reshape(1, 3)
    if np.array_equal(start, end):
        raise ValueError("segment end points must differ")
    return _segments_field(start, end, np.array([float(current)]), np.asarray(point, dtype=float))


def _filament_radii(inner: Length, outer: Length, count: int) -> np.ndarray:
    # midpoints of `count` equal strips across the track
    return inner + (np.arange(count) + 0.5) * (outer - inner) / count


def iter_filaments(coil: CoilGeometry, spec: Optional[DiscretizationSpec] = None,
                   current: Current = 1.0) -> Iterator[FilamentPath]:
    """Lazily yield the filament loops of a coil, innermost turn first"""
    spec = spec or DiscretizationSpec()
    count = spec.filaments_per_track_width
    filament_current = current / count

    if coil.shape is CoilShape.ROUND:
        angles = 2.0 * math.pi * np.arange(spec.segments_per_turn) / spec.segments_per_turn
        unit = np.column_stack((np.cos(angles), np.sin(angles), np.zeros_like(angles)))
    else:
        # counter-clockwise seen from +z, like the round polygons
        unit = np.array([[1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [-1.0, 1.0, 0.0], [-1.0, -1.0, 0.0]])

    for annulus in turn_annuli(coil):
        for radius in _filament_radii(annulus.inner_radius, annulus.outer_radius, count):
            yield FilamentPath(points=unit * radius, current=filament_current, closed=True)


def spiral_to_filaments(coil: CoilGeometry, spec: Optional[DiscretizationSpec] = None,
                        current: Current = 1.0) -> List[FilamentPath]:
    """Concentric closed loops replacing the spiral, each carrying current/filaments_per_track_width"""
    return list(iter_filaments(coil, spec, current))


def _segment_chunks(filaments: Iterable[FilamentPath], chunk_segments: int) -> Iterator[SegmentChunk]:
    iterator = iter(filaments)
    while True:
        batch = []
        size = 0
        for filament in iterator:
            batch.append(filament)
            size += len(filament.points)
            if size >= chunk_segments:
                break
        if not batch:
            return
        starts, ends, currents = [], [], []
        for filament in batch:
            seg_starts, seg_ends = filament.segments()
            starts.append(seg_starts)
            ends.append(seg_ends)
            currents.append(np.full(len(seg_starts), filament.current))
        yield np.concatenate(starts), np.concatenate(ends), np.concatenate(currents)


def field_of_filaments(filaments: Iterable[FilamentPath], point: Sequence[float],
                       chunk_segments: int = ORACLE_CHUNK_SEGMENTS) -> np.ndarray:
    """
    Sum of segment fields over all filaments at one point.

    Chunks are reduced in filament order, so the result is bit-reproducible.
    """
    target = np.asarray(point, dtype=float)
    total = np.zeros(3)
    for starts, ends, currents in _segment_chunks(filaments, chunk_segments):
        total = total + _segments_field(starts, ends, currents, target)
    return total


def field_at(coil: CoilGeometry, current: Current, point: Sequence[float],
             spec: Optional[DiscretizationSpec] = None) -> np.ndarray:
    """H vector of the coil at a point (coil in the z=0 plane, centered on the z axis)"""
    return field_of_filaments(iter_filaments(coil, spec, current), point)


def _axial_field_at_points(coil: CoilGeometry, current: Current, points: np.ndarray,
                           spec: Optional[DiscretizationSpec]) -> np.ndarray:
    chunks = list(_segment_chunks(iter_filaments(coil, spec, current), ORACLE_CHUNK_SEGMENTS))
    values = np.empty(len(points))
    for i, point in enumerate(points):
        total = np.zeros(3)
        for starts, ends, currents in chunks:
            total = total + _segments_field(starts, ends, currents, point)
        values[i] = total[2]
    return values


def lateral_profile(coil: CoilGeometry, current: Current, d: Length, x_start: Length, x_end: Length,
                    samples: int, spec: Optional[DiscretizationSpec] = None) -> FieldProfile:
    """
    Axial field along a lateral line y=0 at height d, normalized to the x=0 value.

    Raises:
        ValueError: d <= 0, empty x range or fewer than 2 samples
    """
    if not d > 0:
        raise ValueError(f"lateral profile needs d > 0, got {d}")
    if not x_start < x_end:
        raise ValueError(f"invalid lateral range [{x_start}, {x_end}]")
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")

    offsets = np.linspace(x_start, x_end, samples)
    points = np.column_stack((offsets, np.zeros_like(offsets), np.full_like(offsets, d)))
    points = np.vstack((points, [[0.0, 0.0, d]]))
    values = _axial_field_at_points(coil, current, points, spec)
    logger.info(f"Lateral profile at d={d:g} m: {samples} samples, {coil.describe()}")

    return FieldProfile(
        samples=tuple(FieldSample(d=d, x=float(x), h=float(h)) for x, h in zip(offsets, values[:-1])),
        coil=coil,
        current=current,
        model=MODEL_BIOT_SAVART,
        reference_h=float(values[-1]),
        notes=_uniformity_notes(offsets, values[:-1], float(values[-1])),
    )


def _uniformity_notes(offsets: np.ndarray, values: np.ndarray, reference_h: MagneticFieldH) -> Tuple[str, ...]:
    """H/H(x=0) at the lateral check offset, when it lies inside the sampled range"""
    offset = um_to_m(LATERAL_CHECK_OFFSET_UM)
    if reference_h == 0.0 or not offsets[0] <= offset <= offsets[-1]:
        return ()
    ratio = float(np.interp(offset, offsets, values)) / reference_h
    deviation = abs(1.0 - ratio)
    verdict = "within" if deviation <= LATERAL_UNIFORMITY_TARGET else "outside"
    return (
        f"H/H(x=0) at x={LATERAL_CHECK_OFFSET_UM:g}um: {ratio:.4f} "
        f"(deviation {deviation:.1%}, {verdict} the {LATERAL_UNIFORMITY_TARGET:.0%} uniformity target)",
    )


def _window_positions(d: Length, window_length: Length, samples: int, centered: bool) -> np.ndarray:
    start = d - window_length / 2.0 if centered else d
    return np.abs(np.linspace(start, start + window_length, samples))


def sensor_averaged_field(coil: CoilGeometry, current: Current, d: Length,
                          window_length: Optional[Length] = None,
                          spec: Optional[DiscretizationSpec] = None,
                          samples: int = SENSOR_SAMPLES, centered: bool = False) -> MagneticFieldH:
    """
    Mean axial field over a sensor of length window_length lying on the coil axis.

    The window starts at d and extends away from the coil, or is centered on d
    when ``centered`` is set.

    Raises:
        ValueError: d < 0, window_length <= 0 or fewer than 64 samples
    """
    window_length = um_to_m(SENSOR_WINDOW_UM) if window_length is None else window_length
    if d < 0:
        raise ValueError(f"sensor distance must be >= 0, got {d}")
    if not window_length > 0:
        raise ValueError(f"window_length must be > 0, got {window_length}")
    if samples < 64:
        raise ValueError(f"sensor averaging needs at least 64 samples, got {samples}")

    z = _window_positions(d, window_length, samples, centered)
    points = np.column_stack((np.zeros_like(z), np.zeros_like(z), z))
    return float(np.mean(_axial_field_at_points(coil, current, points, spec)))


def sensor_averaged_profile(coil: CoilGeometry, current: Current, distances: Sequence[Length],
                            window_length: Optional[Length] = None,
                            spec: Optional[DiscretizationSpec] = None,
                            samples: int = SENSOR_SAMPLES, centered: bool = False) -> FieldProfile:
    """Sensor-averaged field at a series of standoff distances"""
    window_length = um_to_m(SENSOR_WINDOW_UM) if window_length is None else window_length
    values = [
        sensor_averaged_field(coil, current, d, window_length, spec, samples, centered)
        for d in distances
    ]
    return FieldProfile(
        samples=tuple(FieldSample(d=float(d), h=h) for d, h in zip(distances, values)),
        coil=coil,
        current=current,
        model=MODEL_SENSOR_AVERAGE,
        notes=(f"window_length_m={window_length:g}", f"centered={centered}"),
    )
