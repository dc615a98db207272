"""End-to-end analyses from files to report tables.

Each ``run_*`` function reads its inputs, performs the analysis and returns
a :class:`~trackmetrics.io.ReportSet`; nothing is written until the caller
commits it, so a failure never leaves partial reports behind.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .dwell import daily_summaries, dwell_histogram, extract_all_dwell_events
from .flow import classify_all, count_daily_flows
from .io import ConfigError, ReportSet, fmt, read_analysis_config, read_detections, read_zone_configs
from .model import AnalysisConfig, DetectionRecord, ZoneConfig, trajectories_from_records, validate_and_sort
from .patterns import cluster_segments, cluster_trajectories, exposure_index, stitch_tracks, transition_matrix, zone_sequence
from .timeutil import local_date

log = logging.getLogger(__name__)

__all__ = ["Inputs", "load_inputs", "run_dwell", "run_flow", "run_patterns"]


@dataclass
class Inputs:
    records: list[DetectionRecord]
    zones: ZoneConfig
    cfg: AnalysisConfig
    diagnostics: list[str] = field(default_factory=list)


def _select_camera(configs: list[ZoneConfig], camera: str | None, path) -> ZoneConfig:
    if camera is not None:
        for c in configs:
            if c.camera_id == camera:
                return c
        raise ConfigError(path, f"no zone document for camera {camera!r}")
    if len(configs) != 1:
        raise ConfigError(path, f"{len(configs)} zone documents; choose one with --camera")
    return configs[0]


def load_inputs(input_path, zones_path, config_path=None, camera: str | None = None) -> Inputs:
    """Read zones, config and detections; keep valid person records of one camera."""
    zones = _select_camera(read_zone_configs(zones_path), camera, zones_path)
    cfg = read_analysis_config(config_path)
    diagnostics: list[str] = []
    records = validate_and_sort(read_detections(input_path), diagnostics)
    if zones.camera_id:
        records = [r for r in records if r.camera_id == zones.camera_id]
    for msg in diagnostics:
        log.warning("%s: %s", input_path, msg)
    return Inputs(records, zones, cfg, diagnostics)


def _ms(v: float) -> str:
    return fmt(v, 3)


def run_dwell(input_path, zones_path, config_path=None, camera=None, tz_offset_hours=0.0) -> ReportSet:
    inp = load_inputs(input_path, zones_path, config_path, camera)
    if not inp.zones.zois:
        raise ConfigError(zones_path, "no zone polygons for dwell analysis")
    events = extract_all_dwell_events(inp.records, inp.zones.zois, inp.cfg)
    width = inp.cfg.histogram_bin_width

    reports = ReportSet()
    reports.add_csv("dwell_summary.csv", ("Date", "N", "Mean", "Median", "SD"), [
        (s.date.isoformat(), s.n, fmt(s.mean), fmt(s.median), fmt(s.sd))
        for s in daily_summaries(events, tz_offset_hours)
    ])
    reports.add_csv(
        "dwell_events.csv",
        ("date", "camera", "track_id", "zone_id", "start_ts", "end_ts", "duration_s", "capped"),
        [
            (local_date(e.start_ts, tz_offset_hours).isoformat(), e.camera_id, e.track_id, e.zone_id,
             e.start_ts, e.end_ts, _ms(e.duration), int(e.capped))
            for e in events
        ],
    )
    reports.add_csv("dwell_histogram.csv", ("bin_start_s", "count"), [
        (fmt(b, 0), c) for b, c in dwell_histogram(events, width)
    ])
    by_day: dict = {}
    for e in events:
        by_day.setdefault(local_date(e.start_ts, tz_offset_hours), []).append(e)
    reports.add_csv("dwell_histogram_by_day.csv", ("date", "bin_start_s", "count"), [
        (d.isoformat(), fmt(b, 0), c)
        for d in sorted(by_day)
        for b, c in dwell_histogram(by_day[d], width)
    ])
    return reports


def run_flow(input_path, zones_path, config_path=None, camera=None, tz_offset_hours=0.0) -> ReportSet:
    inp = load_inputs(input_path, zones_path, config_path, camera)
    if inp.zones.gates is None:
        raise ConfigError(zones_path, f"camera {inp.zones.camera_id!r} has no start/finish gate pair")
    events = classify_all(inp.records, inp.zones.gates, inp.cfg)

    reports = ReportSet()
    reports.add_csv("flow_daily.csv", ("date", "camera", "entries", "exits", "uncertain"), [
        (c.date.isoformat(), c.camera_id, c.entries, c.exits, c.uncertain)
        for c in count_daily_flows(events, inp.zones.camera_id, tz_offset_hours)
    ])
    reports.add_csv(
        "flow_events.csv",
        ("camera", "track_id", "direction", "first_zone_ts", "second_zone_ts", "duration_s"),
        [
            (e.camera_id, e.track_id, e.direction.value, e.first_zone_ts, e.second_zone_ts, _ms(e.duration))
            for e in events
        ],
    )
    return reports


def _points(pts) -> list[list[float]]:
    return [[round(float(x), 3), round(float(y), 3)] for x, y in pts]


def run_patterns(input_path, zones_path, config_path=None, camera=None, tz_offset_hours=0.0) -> ReportSet:
    inp = load_inputs(input_path, zones_path, config_path, camera)
    cfg = inp.cfg
    trajectories, plan = stitch_tracks(trajectories_from_records(inp.records), cfg)

    zone_list = inp.zones.zones
    sequences = [zone_sequence(t, zone_list) for t in trajectories]
    matrix = transition_matrix(sequences, zone_list)
    exposure = exposure_index(matrix)

    full, resampled = cluster_trajectories(trajectories, cfg)
    by_track = {t.track_id: t for t in resampled}
    parts, segments = cluster_segments(trajectories, cfg)

    reports = ReportSet()
    reports.add_csv("stitch_plan.csv", ("absorbed", "surviving", "gap_s", "gap_px"), [
        (m.absorbed, m.surviving, _ms(m.gap_s), fmt(m.gap_px, 3)) for m in plan.merges
    ])
    reports.add_csv("zone_sequences.csv", ("track_id", "sequence"), [
        (t.track_id, " ".join(s)) for t, s in zip(trajectories, sequences)
    ])
    ids = list(matrix.zone_ids)
    reports.add_csv("transition_counts.csv", ["from"] + ids, [
        [z] + [int(v) for v in row] for z, row in zip(ids, matrix.counts)
    ])
    reports.add_csv("transition_matrix.csv", ["from"] + ids, [
        [z] + [fmt(v, 6) for v in row] for z, row in zip(ids, matrix.probabilities)
    ])
    reports.add_csv("exposure_index.csv", ("zone_id", "exposure"), [
        (z, fmt(v, 6)) for z, v in exposure.items()
    ])
    reports.add_csv("clusters_full.csv", ("track_id", "cluster"), full.assignments())
    reports.add_json("medoids_full.json", {
        "eps": full.eps,
        "method": full.method.value if full.method else None,
        "noise": full.n_noise,
        "clusters": [
            {"label": lab, "size": full.cluster_sizes[lab], "medoid_track": tid,
             "points": _points(by_track[tid].points)}
            for lab, tid in full.medoids.items()
        ],
    })
    reports.add_csv("clusters_segments.csv", ("track_id", "segment_start", "cluster"), [
        (tid, start, lab) for (tid, start), lab in parts.assignments()
    ])
    reports.add_json("medoids_segments.json", {
        "eps": parts.eps,
        "method": parts.method.value if parts.method else None,
        "noise": parts.n_noise,
        "clusters": [
            {"label": lab, "size": parts.cluster_sizes[lab], "medoid_track": key[0],
             "segment_start": key[1], "points": _points(segments[key].points)}
            for lab, key in parts.medoids.items()
        ],
    })
    return reports
