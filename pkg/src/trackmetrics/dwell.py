"""Stationary-stay detection inside zones of interest.

A detection is *stable* when its box moved less than the stability
threshold relative to the previous detection of the same track. A stay is a
maximal chain of consecutive in-zone detections joined by stable steps; it
becomes a dwell event once it has lasted the stabilization time and is kept
if it reaches the minimum dwell. The clock starts at the first detection of
the chain, and stays longer than the cap are truncated and flagged.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

import numpy as np

from .geometry import anchor_points
from .model import AnalysisConfig, BoundingBox, DetectionRecord, ZonePolygon
from .timeutil import local_date

__all__ = [
    "StabilityVerdict",
    "DwellEvent",
    "DailySummary",
    "stability_check",
    "extract_dwell_events",
    "daily_summary",
    "daily_summaries",
    "dwell_histogram",
]


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    max_relative_change: float


@dataclass(frozen=True)
class DwellEvent:
    track_id: int
    zone_id: str
    start_ts: int
    end_ts: int
    duration: float
    capped: bool = False
    camera_id: str = ""


@dataclass(frozen=True)
class DailySummary:
    date: date
    n: int
    mean: float
    median: float
    sd: float


def _relative_changes(prev: np.ndarray, curr: np.ndarray) -> np.ndarray:
    """Per-step max of |dx|/w, |dy|/h, |dw|/w, |dh|/h against the previous box."""
    px, py, pw, ph = prev.T
    cx, cy, cw, ch = curr.T
    return np.max(
        np.stack([
            np.abs(cx - px) / pw,
            np.abs(cy - py) / ph,
            np.abs(cw - pw) / pw,
            np.abs(ch - ph) / ph,
        ]),
        axis=0,
    )


def stability_check(prev: BoundingBox, curr: BoundingBox, threshold: float = 0.15) -> StabilityVerdict:
    """Compare a detection with the previous one of the same track.

    Position deltas are normalized by the previous box size (x by width,
    y by height) so the rule does not depend on where in the image the
    box sits. Stable means the largest normalized change is below
    ``threshold``.
    """
    change = max(
        abs(curr.x - prev.x) / prev.w,
        abs(curr.y - prev.y) / prev.h,
        abs(curr.w - prev.w) / prev.w,
        abs(curr.h - prev.h) / prev.h,
    )
    return StabilityVerdict(change < threshold, change)


def _boxes(records: Sequence[DetectionRecord]) -> np.ndarray:
    return np.array([(r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h) for r in records], dtype=np.float64)


def extract_dwell_events(
    records: Sequence[DetectionRecord],
    zoi: ZonePolygon,
    cfg: AnalysisConfig = AnalysisConfig(),
) -> list[DwellEvent]:
    """Dwell events of one track in one zone of interest.

    ``records`` must be time-sorted detections of a single track on one
    camera. A gap longer than ``cfg.track_loss_gap`` between detections
    breaks the current stay.
    """
    if len(records) < 2:
        return []
    ts = np.array([r.timestamp for r in records], dtype=np.int64)
    boxes = _boxes(records)
    inside = zoi.contains(anchor_points(boxes))

    steady = _relative_changes(boxes[:-1], boxes[1:]) < cfg.stability_threshold
    linked = steady & inside[:-1] & inside[1:] & (np.diff(ts) <= cfg.ms("track_loss_gap"))

    # runs of linked steps: step k joins detections k and k+1
    edges = np.diff(np.concatenate([[0], linked.astype(np.int8), [0]]))
    run_starts = np.flatnonzero(edges == 1)
    run_ends = np.flatnonzero(edges == -1)

    min_ms = max(cfg.ms("min_dwell"), cfg.ms("stabilization_time"))
    max_ms = cfg.ms("max_dwell")
    track, camera = records[0].track_id, records[0].camera_id
    events = []
    for a, b in zip(run_starts, run_ends):
        start, end = int(ts[a]), int(ts[b])
        span = end - start
        if span < min_ms:
            continue
        capped = span > max_ms
        if capped:
            span = max_ms
        events.append(DwellEvent(track, zoi.zone_id, start, start + span, span / 1000.0, capped, camera))
    return events


def extract_all_dwell_events(
    records: Sequence[DetectionRecord],
    zois: Iterable[ZonePolygon],
    cfg: AnalysisConfig = AnalysisConfig(),
) -> list[DwellEvent]:
    """Dwell events for every track of validated, sorted records."""
    from .model import group_tracks

    zois = list(zois)
    events = []
    for recs in group_tracks(records).values():
        for zoi in zois:
            events.extend(extract_dwell_events(recs, zoi, cfg))
    events.sort(key=lambda e: (e.camera_id, e.start_ts, e.track_id, e.zone_id))
    return events


def daily_summary(events: Sequence[DwellEvent], day: date) -> DailySummary | None:
    """Count, mean, median and sample SD of dwell durations (seconds).

    Returns ``None`` for an empty list, since no row is reported for a
    day without events.
    """
    durations = [e.duration for e in events]
    if not durations:
        return None
    sd = statistics.stdev(durations) if len(durations) > 1 else 0.0
    return DailySummary(day, len(durations), statistics.fmean(durations), statistics.median(durations), sd)


def daily_summaries(events: Sequence[DwellEvent], tz_offset_hours: float = 0.0) -> list[DailySummary]:
    """One summary row per local calendar day, assigned by event start."""
    by_day: dict[date, list[DwellEvent]] = {}
    for e in events:
        by_day.setdefault(local_date(e.start_ts, tz_offset_hours), []).append(e)
    return [daily_summary(by_day[d], d) for d in sorted(by_day)]


def dwell_histogram(events: Sequence[DwellEvent], bin_width: float = 60.0) -> list[tuple[float, int]]:
    """Counts of durations in ``[k*w, (k+1)*w)`` bins.

    Bins run from the first to the last non-empty bin; empty bins between
    them are kept with a zero count.
    """
    if not (bin_width > 0 and math.isfinite(bin_width)):
        raise ValueError(f"bin width must be positive, got {bin_width}")
    if not events:
        return []
    idx = np.floor(np.array([e.duration for e in events]) / bin_width).astype(np.int64)
    lo, hi = idx.min(), idx.max()
    counts = np.bincount(idx - lo, minlength=hi - lo + 1)
    return [(float((lo + k) * bin_width), int(c)) for k, c in enumerate(counts)]
