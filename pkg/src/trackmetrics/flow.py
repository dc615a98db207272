"""Directional entry/exit classification between Start and Finish gates."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Sequence

import numpy as np

from .geometry import gate_contains_many
from .model import AnalysisConfig, DetectionRecord, GatePair, group_tracks
from .timeutil import local_date

__all__ = [
    "Direction",
    "FlowEvent",
    "DailyFlowCounts",
    "classify_crossing",
    "classify_all",
    "count_daily_flows",
]


class Direction(str, Enum):
    ENTRY = "entry"
    EXIT = "exit"
    UNCERTAIN = "uncertain"


@dataclass(frozen=True)
class FlowEvent:
    track_id: int
    direction: Direction
    first_zone_ts: int
    second_zone_ts: int
    camera_id: str = ""

    @property
    def duration(self) -> float:
        return (self.second_zone_ts - self.first_zone_ts) / 1000.0


@dataclass(frozen=True)
class DailyFlowCounts:
    date: date
    camera_id: str
    entries: int = 0
    exits: int = 0
    uncertain: int = 0


def _first_touch(ts: np.ndarray, hits: np.ndarray) -> int | None:
    idx = np.flatnonzero(hits)
    return None if len(idx) == 0 else int(ts[idx[0]])


def classify_crossing(
    records: Sequence[DetectionRecord],
    gates: GatePair,
    cfg: AnalysisConfig = AnalysisConfig(),
) -> FlowEvent | None:
    """Classify one time-sorted track by which gate it touched first.

    Start then Finish is an entry, Finish then Start an exit. When the two
    first touches are more than ``cfg.max_crossing_time`` apart the event
    is uncertain. Tracks that never touch both gates, or touch both first
    in the same detection, give ``None``. Later re-touches are ignored.
    """
    if not records:
        return None
    ts = np.array([r.timestamp for r in records], dtype=np.int64)
    boxes = np.array([(r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h) for r in records])
    t_start = _first_touch(ts, gate_contains_many(boxes, gates.start_zone, cfg.gate_tolerance))
    t_finish = _first_touch(ts, gate_contains_many(boxes, gates.finish_zone, cfg.gate_tolerance))
    if t_start is None or t_finish is None or t_start == t_finish:
        return None
    if t_start < t_finish:
        first, second, direction = t_start, t_finish, Direction.ENTRY
    else:
        first, second, direction = t_finish, t_start, Direction.EXIT
    if second - first > cfg.ms("max_crossing_time"):
        direction = Direction.UNCERTAIN
    return FlowEvent(records[0].track_id, direction, first, second, records[0].camera_id)


def classify_all(
    records: Sequence[DetectionRecord],
    gates: GatePair,
    cfg: AnalysisConfig = AnalysisConfig(),
) -> list[FlowEvent]:
    """At most one flow event per track of validated, sorted records."""
    events = []
    for recs in group_tracks(records).values():
        ev = classify_crossing(recs, gates, cfg)
        if ev is not None:
            events.append(ev)
    events.sort(key=lambda e: (e.camera_id, e.first_zone_ts, e.track_id))
    return events


def count_daily_flows(
    events: Sequence[FlowEvent],
    camera: str,
    tz_offset_hours: float = 0.0,
) -> list[DailyFlowCounts]:
    """Entry, exit and uncertain counts per local day of the first gate touch."""
    tallies: dict[date, dict[Direction, int]] = {}
    for ev in events:
        day = local_date(ev.first_zone_ts, tz_offset_hours)
        row = tallies.setdefault(day, dict.fromkeys(Direction, 0))
        row[ev.direction] += 1
    return [
        DailyFlowCounts(d, camera, t[Direction.ENTRY], t[Direction.EXIT], t[Direction.UNCERTAIN])
        for d, t in sorted(tallies.items())
    ]
