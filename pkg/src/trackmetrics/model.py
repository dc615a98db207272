"""Shared domain types, detection-log validation and zone lookup.

All coordinates are image pixels with the origin at the top-left corner and
y growing downward. Timestamps are integer milliseconds since the epoch;
every threshold expressed in seconds is converted with an exact ``* 1000``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BoundingBox",
    "DetectionRecord",
    "ZonePolygon",
    "Rect",
    "GatePair",
    "ZoneConfig",
    "Trajectory",
    "AnalysisConfig",
    "PERSON",
    "validate_and_sort",
    "zone_of",
    "points_in_polygon",
    "trajectories_from_records",
]

PERSON = "person"


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    @property
    def is_valid(self) -> bool:
        vals = (self.x, self.y, self.w, self.h)
        return all(math.isfinite(v) for v in vals) and self.w > 0 and self.h > 0

    @property
    def centroid(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def diagonal(self) -> float:
        return math.hypot(self.w, self.h)


@dataclass(frozen=True)
class DetectionRecord:
    timestamp: int
    camera_id: str
    track_id: int
    bbox: BoundingBox
    category: str = PERSON

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.camera_id, self.track_id, self.timestamp)


@dataclass(frozen=True)
class ZonePolygon:
    zone_id: str
    vertices: tuple[tuple[float, float], ...]
    name: str = ""
    priority: int = 0

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise ValueError(f"zone {self.zone_id!r} needs at least 3 vertices")
        object.__setattr__(self, "vertices", verts)

    def contains(self, points) -> np.ndarray:
        return points_in_polygon(points, self.vertices)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle given as left/top corner plus size."""

    x: float
    y: float
    w: float
    h: float

    @property
    def degenerate(self) -> bool:
        vals = (self.x, self.y, self.w, self.h)
        return not all(math.isfinite(v) for v in vals) or self.w <= 0 or self.h <= 0

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    def overlaps(self, other: "Rect") -> bool:
        return (
            self.x < other.x + other.w
            and other.x < self.x + self.w
            and self.y < other.y + other.h
            and other.y < self.y + self.h
        )


@dataclass(frozen=True)
class GatePair:
    start_zone: Rect
    finish_zone: Rect
    camera_id: str = ""

    def __post_init__(self):
        if self.start_zone.degenerate or self.finish_zone.degenerate:
            raise ValueError("gate rectangles must have positive width and height")
        if self.start_zone.overlaps(self.finish_zone):
            raise ValueError("start and finish gate rectangles overlap")


@dataclass(frozen=True)
class ZoneConfig:
    """Zones for one camera: ZOI polygons plus an optional Start/Finish gate pair.

    ``dwell_zones`` names the polygons used for dwell analysis; when empty,
    every polygon is treated as a zone of interest.
    """

    camera_id: str
    zones: tuple[ZonePolygon, ...] = ()
    gates: GatePair | None = None
    dwell_zones: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zones", tuple(self.zones))
        object.__setattr__(self, "dwell_zones", tuple(self.dwell_zones))
        ids = [z.zone_id for z in self.zones]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate zone ids for camera {self.camera_id!r}")
        prios = [z.priority for z in self.zones]
        if len(set(prios)) != len(prios):
            raise ValueError(f"zone priorities must be unique for camera {self.camera_id!r}")
        unknown = set(self.dwell_zones) - set(ids)
        if unknown:
            raise ValueError(f"dwell zones not defined: {sorted(unknown)}")

    @property
    def zois(self) -> tuple[ZonePolygon, ...]:
        if not self.dwell_zones:
            return self.zones
        by_id = {z.zone_id: z for z in self.zones}
        return tuple(by_id[z] for z in self.dwell_zones)


class Trajectory:
    """Time-ordered anchor-point samples of one (possibly stitched) track."""

    __slots__ = ("track_id", "timestamps", "points")

    def __init__(self, track_id: int, timestamps, points):
        ts = np.asarray(timestamps, dtype=np.float64).reshape(-1)
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        if len(ts) == 0:
            raise ValueError("trajectory needs at least one sample")
        if len(ts) != len(pts):
            raise ValueError("timestamps and points differ in length")
        if np.any(np.diff(ts) <= 0):
            raise ValueError(f"track {track_id}: timestamps must be strictly increasing")
        self.track_id = int(track_id)
        self.timestamps = ts
        self.points = pts

    def __len__(self) -> int:
        return len(self.timestamps)

    def __repr__(self) -> str:
        return f"Trajectory(track_id={self.track_id}, n={len(self)})"

    @property
    def samples(self) -> list[tuple[float, tuple[float, float]]]:
        return [(t, (p[0], p[1])) for t, p in zip(self.timestamps, self.points)]

    @property
    def start_ts(self) -> float:
        return float(self.timestamps[0])

    @property
    def end_ts(self) -> float:
        return float(self.timestamps[-1])


@dataclass(frozen=True)
class AnalysisConfig:
    stability_threshold: float = 0.15
    stabilization_time: float = 2.0
    min_dwell: float = 60.0
    max_dwell: float = 7200.0
    track_loss_gap: float = 3.0
    gate_tolerance: float = 0.05
    max_crossing_time: float = 10.0
    resample_points: int = 20
    segment_length: int = 8
    segment_overlap: int = 2
    stitch_max_gap: float = 2.0
    stitch_max_distance: float = 75.0
    frechet_cell_budget: int = 10_000
    dbscan_min_pts: int = 3
    dbscan_eps: float | str = "auto"
    eps_percentile: float = 15.0
    histogram_bin_width: float = 60.0

    def __post_init__(self):
        positive = (
            "stability_threshold", "stabilization_time", "min_dwell", "max_dwell",
            "track_loss_gap", "max_crossing_time", "resample_points", "segment_length",
            "stitch_max_gap", "stitch_max_distance", "frechet_cell_budget",
            "dbscan_min_pts", "eps_percentile", "histogram_bin_width",
        )
        for name in positive:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive number, got {v!r}")
        if self.gate_tolerance < 0:
            raise ValueError("gate_tolerance must be non-negative")
        if self.resample_points < 2:
            raise ValueError("resample_points must be at least 2")
        if not 0 <= self.segment_overlap < self.segment_length:
            raise ValueError("segment_overlap must be in [0, segment_length)")
        if self.min_dwell >= self.max_dwell:
            raise ValueError("min_dwell must be below max_dwell")
        if self.eps_percentile > 100:
            raise ValueError("eps_percentile must be at most 100")
        eps = self.dbscan_eps
        if isinstance(eps, str):
            if eps != "auto":
                raise ValueError(f"dbscan_eps must be a number or 'auto', got {eps!r}")
        elif not (math.isfinite(eps) and eps >= 0):
            raise ValueError("dbscan_eps must be non-negative")

    @classmethod
    def from_mapping(cls, values: dict) -> "AnalysisConfig":
        """Override defaults field by field; unknown keys are rejected."""
        known = {f.name: f for f in fields(cls)}
        unknown = set(values) - set(known)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return replace(cls(), **values)

    def ms(self, name: str) -> int:
        """A seconds-valued threshold in integer milliseconds."""
        return int(round(getattr(self, name) * 1000))


def validate_and_sort(
    records: Iterable[DetectionRecord],
    diagnostics: list[str] | None = None,
) -> list[DetectionRecord]:
    """Keep valid person records, sorted by (camera, track, timestamp).

    Records with a non-finite or non-positive box, or a negative timestamp
    or track id, are dropped and described in ``diagnostics`` when a list is
    given. Duplicate (camera, track, timestamp) keys keep the last occurrence.
    """
    latest: dict[tuple[str, int, int], DetectionRecord] = {}
    for i, rec in enumerate(records):
        if rec.category != PERSON:
            continue
        problem = None
        if not rec.bbox.is_valid:
            problem = f"invalid box {rec.bbox}"
        elif rec.timestamp < 0:
            problem = f"negative timestamp {rec.timestamp}"
        elif rec.track_id < 0:
            problem = f"negative track id {rec.track_id}"
        if problem is not None:
            if diagnostics is not None:
                diagnostics.append(f"record {i}: {problem}")
            continue
        latest[rec.key] = rec
    return [latest[k] for k in sorted(latest)]


def points_in_polygon(points, vertices: Sequence[Sequence[float]]) -> np.ndarray:
    """Crossing-number test with the boundary counted as inside.

    ``points`` is an ``(n, 2)`` array-like (or a single point); returns a
    boolean array of length ``n``.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    px, py = pts[:, 0], pts[:, 1]
    v = np.asarray(vertices, dtype=np.float64)
    x0, y0 = v[:, 0], v[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)

    inside = np.zeros(len(pts), dtype=bool)
    on_edge = np.zeros(len(pts), dtype=bool)
    for ax, ay, bx, by in zip(x0, y0, x1, y1):
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        scale = max(abs(bx - ax), abs(by - ay), 1.0)
        within = (
            (np.minimum(ax, bx) <= px) & (px <= np.maximum(ax, bx))
            & (np.minimum(ay, by) <= py) & (py <= np.maximum(ay, by))
        )
        on_edge |= within & (np.abs(cross) <= 1e-12 * scale * scale)

        straddles = (ay > py) != (by > py)
        if not np.any(straddles):
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            x_hit = ax + (py - ay) * (bx - ax) / (by - ay)
        inside ^= straddles & (px < x_hit)
    return inside | on_edge


def zone_of(point, zones: Sequence[ZonePolygon]) -> str | None:
    """Id of the highest-priority zone containing ``point``, else ``None``.

    ``priority`` is a rank: the smallest value wins. Boundary points count
    as inside.
    """
    best = None
    for zone in zones:
        if points_in_polygon(point, zone.vertices)[0]:
            if best is None or zone.priority < best.priority:
                best = zone
    return None if best is None else best.zone_id


def zones_of(points, zones: Sequence[ZonePolygon]) -> list[str | None]:
    """Vectorized :func:`zone_of` over an ``(n, 2)`` point array."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    out: list[str | None] = [None] * len(pts)
    best_prio = np.full(len(pts), np.inf)
    for zone in zones:
        hit = points_in_polygon(pts, zone.vertices) & (zone.priority < best_prio)
        best_prio[hit] = zone.priority
        for i in np.flatnonzero(hit):
            out[i] = zone.zone_id
    return out


def group_tracks(records: Sequence[DetectionRecord]) -> dict[tuple[str, int], list[DetectionRecord]]:
    """Split validated, sorted records into per-(camera, track) lists."""
    groups: dict[tuple[str, int], list[DetectionRecord]] = {}
    for rec in records:
        groups.setdefault((rec.camera_id, rec.track_id), []).append(rec)
    return groups


def trajectories_from_records(records: Sequence[DetectionRecord]) -> list[Trajectory]:
    """Anchor-point trajectories for validated records of one camera."""
    from .geometry import anchor_point

    out = []
    for (_, track), recs in group_tracks(records).items():
        ts = [r.timestamp for r in recs]
        pts = [anchor_point(r.bbox) for r in recs]
        out.append(Trajectory(track, ts, pts))
    return out
