"""Movement patterns: track stitching, zone transitions and trajectory clusters."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .geometry import DistanceMethod, pairwise_distances, resample
from .model import AnalysisConfig, Trajectory, ZonePolygon, zones_of

__all__ = [
    "Merge",
    "StitchPlan",
    "TransitionMatrix",
    "Segment",
    "SegmentSet",
    "ClusterResult",
    "NOISE",
    "stitch_tracks",
    "zone_sequence",
    "transition_matrix",
    "exposure_index",
    "load_index",
    "load_ratio",
    "segment_trajectory",
    "resolve_eps",
    "dbscan",
    "cluster",
]

NOISE = -1


@dataclass(frozen=True)
class Merge:
    absorbed: int
    surviving: int
    gap_s: float
    gap_px: float


@dataclass(frozen=True)
class StitchPlan:
    merges: tuple[Merge, ...] = ()

    def __len__(self) -> int:
        return len(self.merges)


def stitch_tracks(
    trajectories: Sequence[Trajectory],
    cfg: AnalysisConfig = AnalysisConfig(),
) -> tuple[list[Trajectory], StitchPlan]:
    """Join fragments where one track ends and another starts close by.

    A pair (A, B) qualifies when B starts strictly after A ends, within
    ``stitch_max_gap`` seconds, and B's first point lies within
    ``stitch_max_distance`` pixels of A's last point. Pairs are accepted
    greedily, nearest in space first, each track having at most one
    successor and one predecessor. Chains merge into the id of their first
    fragment.
    """
    by_id = {t.track_id: t for t in trajectories}
    if len(by_id) != len(trajectories):
        raise ValueError("duplicate track ids")
    gap_ms = cfg.stitch_max_gap * 1000.0
    ids = sorted(by_id)

    candidates = []
    for a in ids:
        ta = by_id[a]
        for b in ids:
            if a == b:
                continue
            tb = by_id[b]
            gap = tb.start_ts - ta.end_ts
            if not 0 < gap <= gap_ms:
                continue
            dist = float(np.hypot(*(tb.points[0] - ta.points[-1])))
            if dist <= cfg.stitch_max_distance:
                candidates.append((dist, gap, a, b))
    candidates.sort()

    succ: dict[int, tuple[int, float, float]] = {}
    has_pred: set[int] = set()
    for dist, gap, a, b in candidates:
        if a in succ or b in has_pred:
            continue
        succ[a] = (b, gap / 1000.0, dist)
        has_pred.add(b)

    merged, merges = [], []
    for head in ids:
        if head in has_pred:
            continue
        chain = [by_id[head]]
        cur = head
        while cur in succ:
            nxt, gap_s, gap_px = succ[cur]
            merges.append(Merge(nxt, head, gap_s, gap_px))
            chain.append(by_id[nxt])
            cur = nxt
        if len(chain) == 1:
            merged.append(chain[0])
        else:
            merged.append(Trajectory(
                head,
                np.concatenate([t.timestamps for t in chain]),
                np.concatenate([t.points for t in chain]),
            ))
    return merged, StitchPlan(tuple(merges))


def zone_sequence(traj: Trajectory, zones: Sequence[ZonePolygon]) -> list[str]:
    """Zones visited in order, repeats collapsed, out-of-zone samples dropped."""
    seq: list[str] = []
    for z in zones_of(traj.points, zones):
        if z is not None and (not seq or seq[-1] != z):
            seq.append(z)
    return seq


@dataclass(frozen=True)
class TransitionMatrix:
    zone_ids: tuple[str, ...]
    counts: np.ndarray
    probabilities: np.ndarray

    def probability(self, src: str, dst: str) -> float:
        i, j = self.zone_ids.index(src), self.zone_ids.index(dst)
        return float(self.probabilities[i, j])


def transition_matrix(
    sequences: Sequence[Sequence[str]],
    zones: Sequence[ZonePolygon] | Sequence[str],
) -> TransitionMatrix:
    """Next-distinct-zone tallies and their row-normalized probabilities.

    ``zones`` fixes the row/column order and may be polygons or plain ids.
    Self-transitions are not counted; rows without outgoing transitions
    stay all zero.
    """
    zone_ids = tuple(z.zone_id if isinstance(z, ZonePolygon) else str(z) for z in zones)
    index = {z: i for i, z in enumerate(zone_ids)}
    k = len(zone_ids)
    counts = np.zeros((k, k), dtype=np.int64)
    for seq in sequences:
        for src, dst in zip(seq, seq[1:]):
            if src not in index or dst not in index:
                raise ValueError(f"unknown zone in transition {src!r} -> {dst!r}")
            if src != dst:
                counts[index[src], index[dst]] += 1
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        probs = np.where(totals > 0, counts / np.where(totals == 0, 1, totals), 0.0)
    return TransitionMatrix(zone_ids, counts, probs)


def exposure_index(m: TransitionMatrix) -> dict[str, float]:
    """Per zone, the sum of incoming transition probabilities."""
    col = m.probabilities.sum(axis=0)
    return {z: float(v) for z, v in zip(m.zone_ids, col)}


def load_index(arrivals: float, mean_service: float) -> float:
    """Arrivals times mean service time, in person-seconds."""
    if arrivals < 0 or mean_service < 0:
        raise ValueError("arrivals and mean service time must be non-negative")
    return float(arrivals) * float(mean_service)


def load_ratio(peak: tuple[float, float], baseline: tuple[float, float]) -> float:
    """Load of ``(arrivals, mean_service)`` relative to a baseline pair."""
    base = load_index(*baseline)
    if base == 0:
        raise ZeroDivisionError("baseline load is zero")
    return load_index(*peak) / base


@dataclass(frozen=True)
class Segment:
    start_index: int
    points: np.ndarray

    @property
    def end_index(self) -> int:
        return self.start_index + len(self.points) - 1


@dataclass(frozen=True)
class SegmentSet:
    parent_track: int
    segments: tuple[Segment, ...] = field(default_factory=tuple)


def segment_starts(n: int, length: int, overlap: int) -> list[int]:
    if length >= n:
        return [0]
    stride = length - overlap
    starts = list(range(0, n - length + 1, stride))
    if starts[-1] + length < n:
        starts.append(n - length)
    return starts


def segment_trajectory(traj: Trajectory, cfg: AnalysisConfig = AnalysisConfig()) -> SegmentSet:
    """Overlapping fixed-length windows over a resampled trajectory.

    Windows advance by ``segment_length - segment_overlap`` points; a last
    window that would run past the end is shifted back to finish on the
    final point. A trajectory shorter than one window is a single segment.
    """
    n = len(traj)
    length = min(cfg.segment_length, n)
    segs = tuple(
        Segment(s, traj.points[s:s + length].copy())
        for s in segment_starts(n, cfg.segment_length, cfg.segment_overlap)
    )
    return SegmentSet(traj.track_id, segs)


@dataclass
class ClusterResult:
    labels: np.ndarray
    ids: list
    eps: float
    method: DistanceMethod | None = None
    cluster_sizes: dict[int, int] = field(default_factory=dict)
    medoids: dict[int, int] = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        return len(self.cluster_sizes)

    @property
    def n_noise(self) -> int:
        return int(np.sum(self.labels == NOISE))

    def assignments(self) -> list[tuple[object, int]]:
        return list(zip(self.ids, (int(v) for v in self.labels)))


def resolve_eps(distances: np.ndarray, cfg: AnalysisConfig = AnalysisConfig()) -> float:
    """Numeric eps, taking a percentile of nonzero distances in auto mode.

    With no nonzero distance every positive eps gives the same result, so
    1.0 is returned.
    """
    if cfg.dbscan_eps != "auto":
        return float(cfg.dbscan_eps)
    iu = np.triu_indices(len(distances), 1)
    vals = distances[iu]
    vals = vals[vals > 0]
    if len(vals) == 0:
        return 1.0
    return float(np.percentile(vals, cfg.eps_percentile))


def dbscan(distances: np.ndarray, eps: float, min_pts: int, ids: Sequence | None = None) -> np.ndarray:
    """DBSCAN over a precomputed distance matrix.

    A point's neighbourhood holds every point within ``eps`` including
    itself; core points have at least ``min_pts`` neighbours. Core points
    linked through eps-neighbourhoods form clusters. Border points join the
    cluster of their nearest core neighbour (ties go to the smallest id),
    which makes the partition independent of input order. Labels are
    numbered by the smallest id in each cluster; noise is ``-1``.
    """
    D = np.asarray(distances, dtype=np.float64)
    n = len(D)
    ids = list(range(n)) if ids is None else list(ids)
    labels = np.full(n, NOISE, dtype=np.int64)
    if n == 0 or eps <= 0:
        return labels

    nbr = D <= eps
    core = nbr.sum(axis=1) >= min_pts
    core_idx = np.flatnonzero(core)
    if len(core_idx) == 0:
        return labels

    _, comp = connected_components(nbr[np.ix_(core_idx, core_idx)], directed=False)
    labels[core_idx] = comp

    order = sorted(range(n), key=lambda i: ids[i])
    for i in order:
        if core[i]:
            continue
        cand = [j for j in core_idx if nbr[i, j]]
        if cand:
            best = min(cand, key=lambda j: (D[i, j], ids[j]))
            labels[i] = labels[best]

    return _canonical_labels(labels, ids)


def _canonical_labels(labels: np.ndarray, ids: Sequence) -> np.ndarray:
    first: dict[int, object] = {}
    for lab, key in zip(labels, ids):
        if lab != NOISE and (lab not in first or key < first[lab]):
            first[lab] = key
    rename = {lab: k for k, lab in enumerate(sorted(first, key=lambda l: first[l]))}
    return np.array([rename.get(int(l), NOISE) for l in labels], dtype=np.int64)


def medoids(distances: np.ndarray, labels: np.ndarray, ids: Sequence) -> dict[int, object]:
    """Per cluster, the member id with the smallest summed distance to its cluster."""
    out = {}
    for lab in sorted(set(int(l) for l in labels) - {NOISE}):
        members = np.flatnonzero(labels == lab)
        sums = distances[np.ix_(members, members)].sum(axis=1)
        best = min(range(len(members)), key=lambda k: (sums[k], ids[members[k]]))
        out[lab] = ids[members[best]]
    return out


def cluster(
    items,
    cfg: AnalysisConfig = AnalysisConfig(),
    ids: Sequence | None = None,
    distances: np.ndarray | None = None,
) -> ClusterResult:
    """Density clusters of equal-length point lists.

    Pairwise distances use Fréchet within the cell budget and Hausdorff
    beyond it; a precomputed matrix may be supplied instead.
    """
    n = len(items)
    ids = list(range(n)) if ids is None else list(ids)
    method = None
    if distances is None:
        distances, method = pairwise_distances(items, cfg)
    eps = resolve_eps(distances, cfg) if n else 0.0
    labels = dbscan(distances, eps, cfg.dbscan_min_pts, ids)
    sizes = {int(l): int(c) for l, c in zip(*np.unique(labels[labels != NOISE], return_counts=True))}
    return ClusterResult(labels, ids, eps, method, sizes, medoids(distances, labels, ids))


def cluster_trajectories(
    trajectories: Sequence[Trajectory],
    cfg: AnalysisConfig = AnalysisConfig(),
) -> tuple[ClusterResult, list[Trajectory]]:
    """Resample whole trajectories and cluster them by track id."""
    res = [resample(t, cfg.resample_points) for t in trajectories]
    result = cluster([t.points for t in res], cfg, ids=[t.track_id for t in res])
    return result, res


def cluster_segments(
    trajectories: Sequence[Trajectory],
    cfg: AnalysisConfig = AnalysisConfig(),
) -> tuple[ClusterResult, dict[tuple[int, int], Segment]]:
    """Cluster the overlapping windows of every resampled trajectory.

    Items are identified by ``(track_id, start_index)``.
    """
    segments: dict[tuple[int, int], Segment] = {}
    for t in trajectories:
        r = resample(t, cfg.resample_points)
        for seg in segment_trajectory(r, cfg).segments:
            segments[(t.track_id, seg.start_index)] = seg
    keys = list(segments)
    result = cluster([segments[k].points for k in keys], cfg, ids=keys)
    return result, segments
