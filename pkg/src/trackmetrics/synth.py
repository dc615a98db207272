"""Seeded synthetic detection streams with scripted ground truth.

A generator spec is a JSON object::

    {
      "seed": 7,
      "camera": "cam1",
      "start_ms": 1746187200000,
      "fps": 5,
      "box": {"w": 40, "h": 100},
      "spacing_s": 5,
      "window_s": null,
      "tracks": null,
      "noise": {"jitter_px": 0, "dropout": 0},
      "zones": { ...zone document... },
      "scripts": [
        {"kind": "dwell", "duration": 90, "count": 1},
        {"kind": "entry", "crossing_time": 4, "count": 5},
        {"kind": "exit", "crossing_time": 4, "count": 5},
        {"kind": "pass_through", "path": [[x, y], ...], "count": 10},
        {"kind": "fragmented", "path": [[x, y], ...], "pieces": 2, "gap_s": 1, "offset_px": 20}
      ]
    }

Tracks are laid out one after another, ``spacing_s`` apart, unless
``window_s`` is set, in which case each track starts at a uniformly random
offset within that window. ``tracks`` truncates the expanded script list.
Positions are foot (anchor) points; boxes hang above them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import circle_rect_distance
from .io import ConfigError, csv_text, parse_zone_config
from .model import BoundingBox, DetectionRecord, Rect, ZoneConfig

__all__ = [
    "SCRIPT_KINDS",
    "Script",
    "SyntheticSpec",
    "Label",
    "parse_synthetic_spec",
    "generate",
    "labels_csv",
]

SCRIPT_KINDS = ("pass_through", "dwell", "entry", "exit", "fragmented")
DEFAULT_START_MS = 1_746_187_200_000  # 2025-05-02T12:00:00Z

# a walking step must clearly break the stability rule
_WALK_STEP_FRACTION = 0.3


@dataclass(frozen=True)
class Script:
    kind: str
    params: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int
    zones: ZoneConfig
    scripts: tuple[Script, ...]
    camera: str = "cam1"
    start_ms: int = DEFAULT_START_MS
    fps: float = 5.0
    box_w: float = 40.0
    box_h: float = 100.0
    spacing_s: float = 5.0
    window_s: float | None = None
    tracks: int | None = None
    jitter_px: float = 0.0
    dropout: float = 0.0


@dataclass(frozen=True)
class Label:
    track: int
    kind: str
    value: float
    group: str = ""


def parse_synthetic_spec(doc: dict) -> SyntheticSpec:
    """Validate a decoded generator spec; raises ``ValueError`` on problems."""
    if not isinstance(doc, dict):
        raise ValueError("spec must be a JSON object")
    if "seed" not in doc:
        raise ValueError("spec needs a seed")
    seed = doc["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ValueError("seed must be an integer")
    camera = str(doc.get("camera", doc.get("zones", {}).get("camera", "cam1")))
    zone_doc = dict(doc.get("zones", {}))
    zone_doc.setdefault("camera", camera)
    zones = parse_zone_config(zone_doc)

    scripts = []
    for i, raw in enumerate(doc.get("scripts", [])):
        kind = raw.get("kind")
        if kind not in SCRIPT_KINDS:
            raise ValueError(f"script {i}: unknown kind {kind!r}")
        count = raw.get("count", 1)
        if not isinstance(count, int) or count < 0:
            raise ValueError(f"script {i}: count must be a non-negative integer")
        params = {k: v for k, v in raw.items() if k not in ("kind", "count")}
        _check_script(kind, params, zones, i)
        group = str(params.pop("group", f"script{i}"))
        scripts.extend(
            Script(kind, dict(params, _index=k, _count=count, _group=group)) for k in range(count)
        )

    box = doc.get("box", {})
    noise = doc.get("noise", {})
    spec = SyntheticSpec(
        seed=seed,
        zones=zones,
        scripts=tuple(scripts),
        camera=camera,
        start_ms=int(doc.get("start_ms", DEFAULT_START_MS)),
        fps=float(doc.get("fps", 5.0)),
        box_w=float(box.get("w", 40.0)),
        box_h=float(box.get("h", 100.0)),
        spacing_s=float(doc.get("spacing_s", 5.0)),
        window_s=None if doc.get("window_s") is None else float(doc["window_s"]),
        tracks=None if doc.get("tracks") is None else int(doc["tracks"]),
        jitter_px=float(noise.get("jitter_px", 0.0)),
        dropout=float(noise.get("dropout", 0.0)),
    )
    if spec.fps <= 0 or spec.box_w <= 0 or spec.box_h <= 0:
        raise ValueError("fps and box size must be positive")
    if not 0 <= spec.dropout < 1:
        raise ValueError("dropout must be in [0, 1)")
    if spec.jitter_px < 0 or spec.spacing_s < 0:
        raise ValueError("jitter and spacing must be non-negative")
    if spec.tracks is not None and spec.tracks < 0:
        raise ValueError("tracks must be non-negative")
    return spec


def _check_script(kind: str, params: dict, zones: ZoneConfig, i: int) -> None:
    if kind == "dwell":
        if not params.get("duration", 0) > 0:
            raise ValueError(f"script {i}: dwell needs a positive duration")
        if not zones.zois and "seat" not in params:
            raise ValueError(f"script {i}: dwell needs a zone or an explicit seat")
    elif kind in ("entry", "exit"):
        if zones.gates is None:
            raise ValueError(f"script {i}: {kind} needs a gate pair in the zones")
        if not params.get("crossing_time", 4.0) > 0:
            raise ValueError(f"script {i}: crossing_time must be positive")
    else:
        path = params.get("path")
        if not path or len(path) < 2:
            raise ValueError(f"script {i}: {kind} needs a path of at least 2 points")
        if kind == "fragmented" and int(params.get("pieces", 2)) < 1:
            raise ValueError(f"script {i}: pieces must be at least 1")


class _Builder:
    """Accumulates one camera's detections and labels in track order."""

    def __init__(self, spec: SyntheticSpec):
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)
        self.dt_ms = 1000.0 / spec.fps
        self.records: list[DetectionRecord] = []
        self.labels: list[Label] = []
        self.next_id = 1
        self.cursor_ms = float(spec.start_ms)

    def new_id(self) -> int:
        tid = self.next_id
        self.next_id += 1
        return tid

    def start_time(self) -> float:
        if self.spec.window_s is not None:
            return float(round(self.spec.start_ms + self.rng.uniform(0.0, self.spec.window_s * 1000.0)))
        return float(round(self.cursor_ms))

    def emit(self, track: int, times_ms, feet) -> None:
        times = np.round(np.asarray(times_ms, dtype=np.float64)).astype(np.int64)
        feet = np.asarray(feet, dtype=np.float64).reshape(-1, 2)
        keep = np.ones(len(times), dtype=bool)
        if self.spec.dropout > 0 and len(times) > 2:
            keep[1:-1] = self.rng.random(len(times) - 2) >= self.spec.dropout
        if self.spec.jitter_px > 0:
            feet = feet + self.rng.uniform(-self.spec.jitter_px, self.spec.jitter_px, feet.shape)
        w, h = self.spec.box_w, self.spec.box_h
        for t, (fx, fy) in zip(times[keep], feet[keep]):
            box = BoundingBox(float(fx - w / 2.0), float(fy - h), w, h)
            self.records.append(DetectionRecord(int(t), self.spec.camera, track, box))
        if self.spec.window_s is None:
            self.cursor_ms = max(self.cursor_ms, float(times[-1]) + self.spec.spacing_s * 1000.0)


def _frame_times(t0: float, dt: float, span: float) -> np.ndarray:
    """Frames from ``t0`` every ``dt`` up to and including ``t0 + span``."""
    k = int(math.floor(span / dt + 1e-9))
    times = t0 + dt * np.arange(k + 1)
    if span - k * dt > 1e-6:
        times = np.append(times, t0 + span)
    return times


def _walk(a, b, step: float) -> np.ndarray:
    """Points from ``a`` to ``b`` (both included) in equal steps no shorter than ``step``."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    dist = float(np.hypot(*(b - a)))
    k = max(1, int(dist // step))
    f = np.linspace(0.0, 1.0, k + 1)[:, None]
    return a + f * (b - a)


def _seat_and_approach(zones: ZoneConfig, params: dict, step: float):
    if "seat" in params:
        seat = np.asarray(params["seat"], float)
    else:
        zid = params.get("zone")
        zoi = next((z for z in zones.zois if z.zone_id == zid), zones.zois[0]) if zid else zones.zois[0]
        verts = np.asarray(zoi.vertices)
        seat = verts.mean(axis=0)
        if not zoi.contains(seat)[0]:
            raise ValueError(f"zone {zoi.zone_id!r}: vertex mean lies outside; give an explicit seat")
    if "approach_from" in params:
        origin = np.asarray(params["approach_from"], float)
    else:
        origin = seat + np.array([0.0, 6.0 * step])
    return seat, origin


def _dwell(b: _Builder, script: Script) -> None:
    spec = b.spec
    step = _WALK_STEP_FRACTION * max(spec.box_w, spec.box_h)
    seat, origin = _seat_and_approach(spec.zones, script.params, step)
    duration_ms = float(script.get("duration")) * 1000.0
    dt = b.dt_ms

    walk_in = _walk(origin, seat, step)
    walk_out = _walk(seat, origin, step)[1:]
    t0 = b.start_time()
    t_in = t0 + dt * np.arange(len(walk_in))
    t_arrive = t_in[-1]
    t_stay = _frame_times(t_arrive, dt, duration_ms)[1:]
    t_leave = t_stay[-1] + dt * np.arange(1, len(walk_out) + 1)

    times = np.concatenate([t_in, t_stay, t_leave])
    feet = np.concatenate([walk_in, np.repeat(seat[None], len(t_stay), axis=0), walk_out])
    tid = b.new_id()
    b.emit(tid, times, feet)
    b.labels.append(Label(tid, "dwell", float(script.get("duration"))))


def _contact_fraction(a: np.ndarray, c: np.ndarray, rect: Rect, radius: float) -> float:
    """Smallest f in [0, 1] with the point a + f (c - a) within ``radius`` of ``rect``."""
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = (lo + hi) / 2.0
        p = a + mid * (c - a)
        if circle_rect_distance(p[0], p[1], rect) <= radius:
            hi = mid
        else:
            lo = mid
    return hi


def _crossing(b: _Builder, script: Script) -> None:
    spec = b.spec
    gates = spec.zones.gates
    src, dst = (gates.start_zone, gates.finish_zone)
    if script.kind == "exit":
        src, dst = dst, src
    half = np.array([0.0, spec.box_h / 2.0])
    c_src, c_dst = np.asarray(src.center), np.asarray(dst.center)
    radius = float(script.get("gate_tolerance", 0.05)) * math.hypot(spec.box_w, spec.box_h)

    total = float(np.hypot(*(c_dst - c_src)))
    f_touch = _contact_fraction(c_src, c_dst, dst, radius)
    f_touch = min(1.0, f_touch + 0.25 / total)
    crossing_ms = float(script.get("crossing_time", 4.0)) * 1000.0
    speed = f_touch / crossing_ms  # path fraction per ms

    t0 = b.start_time()
    times = _frame_times(t0, b.dt_ms, crossing_ms)
    t_full = 1.0 / speed
    if t_full > crossing_ms:
        tail = _frame_times(t0 + crossing_ms, b.dt_ms, t_full - crossing_ms)[1:]
        times = np.concatenate([times, tail])
    frac = np.minimum((times - t0) * speed, 1.0)
    centroids = c_src + frac[:, None] * (c_dst - c_src)

    tid = b.new_id()
    b.emit(tid, times, centroids + half)
    b.labels.append(Label(tid, script.kind, float(script.get("crossing_time", 4.0))))


def _path_walk(b: _Builder, path: np.ndarray, speed: float, t0: float):
    seg = np.hypot(*np.diff(path, axis=0).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    span = cum[-1] / speed * 1000.0
    times = _frame_times(t0, b.dt_ms, span)
    s = (times - t0) / 1000.0 * speed
    pts = np.column_stack([np.interp(s, cum, path[:, 0]), np.interp(s, cum, path[:, 1])])
    return times, pts


def _lateral(path: np.ndarray) -> np.ndarray:
    d = path[1] - path[0]
    n = np.array([-d[1], d[0]])
    return n / np.hypot(*n)


def _pass_through(b: _Builder, script: Script) -> None:
    path = np.asarray(script.get("path"), float)
    spread = float(script.get("spread_px", 10.0))
    index, count = script.get("_index"), script.get("_count")
    offset = spread * (index / (count - 1) - 0.5) if count > 1 else 0.0
    speed = float(script.get("speed", 80.0)) * (1.0 + 0.2 * (b.rng.random() - 0.5))
    times, pts = _path_walk(b, path + offset * _lateral(path), speed, b.start_time())
    tid = b.new_id()
    b.emit(tid, times, pts)
    b.labels.append(Label(tid, "pass_through", offset, script.get("_group")))


def _fragmented(b: _Builder, script: Script) -> None:
    path = np.asarray(script.get("path"), float)
    pieces = int(script.get("pieces", 2))
    gap_ms = float(script.get("gap_s", 1.0)) * 1000.0
    offset = float(script.get("offset_px", 20.0))
    speed = float(script.get("speed", 80.0))
    times, pts = _path_walk(b, path, speed, b.start_time())
    bounds = np.linspace(0, len(times), pieces + 1).round().astype(int)

    ids = []
    shift_t, shift_p = 0.0, np.zeros(2)
    prev_t = prev_p = None
    for k in range(pieces):
        sl = slice(bounds[k], bounds[k + 1])
        t, p = times[sl].copy(), pts[sl].copy()
        if len(t) == 0:
            continue
        if prev_t is not None:
            direction = p[0] - prev_p
            norm = float(np.hypot(*direction))
            u = direction / norm if norm > 0 else np.array([1.0, 0.0])
            shift_t = prev_t + gap_ms - t[0]
            shift_p = prev_p + offset * u - p[0]
        t, p = t + shift_t, p + shift_p
        tid = b.new_id()
        ids.append(tid)
        b.emit(tid, t, p)
        prev_t, prev_p = t[-1], p[-1]
    b.labels.append(Label(ids[0], "fragmented", float(len(ids)), ";".join(map(str, ids))))


def generate(spec: SyntheticSpec) -> tuple[list[DetectionRecord], list[Label]]:
    """Build the detection stream and its ground-truth labels."""
    b = _Builder(spec)
    scripts = list(spec.scripts)
    if spec.tracks is not None:
        scripts = scripts[: spec.tracks]

    for script in scripts:
        if script.kind == "dwell":
            _dwell(b, script)
        elif script.kind in ("entry", "exit"):
            _crossing(b, script)
        elif script.kind == "pass_through":
            _pass_through(b, script)
        else:
            _fragmented(b, script)

    records = sorted(b.records, key=lambda r: (r.timestamp, r.track_id))
    return records, b.labels


def labels_csv(labels: list[Label]) -> str:
    return csv_text(("track", "kind", "value", "group"), [
        (l.track, l.kind, repr(l.value) if not l.value.is_integer() else int(l.value), l.group)
        for l in labels
    ])


def load_spec(path) -> SyntheticSpec:
    from .io import _load_json

    try:
        return parse_synthetic_spec(_load_json(path, error=ConfigError))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(path, f"invalid generator spec: {exc}") from None
