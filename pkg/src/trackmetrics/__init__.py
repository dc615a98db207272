"""Privacy-preserving behavioral metrics from anonymized person-detection logs.

Dwell times inside zones of interest, directional entry/exit flows through
Start/Finish gates, and movement patterns (zone transitions and trajectory
clusters), computed from timestamps, local track ids and bounding boxes only.
"""

from .dwell import (
    DailySummary,
    DwellEvent,
    StabilityVerdict,
    daily_summaries,
    daily_summary,
    dwell_histogram,
    extract_all_dwell_events,
    extract_dwell_events,
    stability_check,
)
from .flow import DailyFlowCounts, Direction, FlowEvent, classify_all, classify_crossing, count_daily_flows
from .geometry import (
    DistanceMethod,
    DistanceResult,
    anchor_point,
    discrete_frechet,
    gate_contains,
    hausdorff,
    pairwise_distances,
    resample,
    trajectory_distance,
)
from .model import (
    AnalysisConfig,
    BoundingBox,
    DetectionRecord,
    GatePair,
    Rect,
    Trajectory,
    ZoneConfig,
    ZonePolygon,
    trajectories_from_records,
    validate_and_sort,
    zone_of,
)
from .patterns import (
    NOISE,
    ClusterResult,
    SegmentSet,
    StitchPlan,
    TransitionMatrix,
    cluster,
    dbscan,
    exposure_index,
    load_index,
    load_ratio,
    segment_trajectory,
    stitch_tracks,
    transition_matrix,
    zone_sequence,
)

__all__ = [
    "DailySummary",
    "DwellEvent",
    "StabilityVerdict",
    "daily_summaries",
    "daily_summary",
    "dwell_histogram",
    "extract_all_dwell_events",
    "extract_dwell_events",
    "stability_check",
    "DailyFlowCounts",
    "Direction",
    "FlowEvent",
    "classify_all",
    "classify_crossing",
    "count_daily_flows",
    "DistanceMethod",
    "DistanceResult",
    "anchor_point",
    "discrete_frechet",
    "gate_contains",
    "hausdorff",
    "pairwise_distances",
    "resample",
    "trajectory_distance",
    "AnalysisConfig",
    "BoundingBox",
    "DetectionRecord",
    "GatePair",
    "Rect",
    "Trajectory",
    "ZoneConfig",
    "ZonePolygon",
    "trajectories_from_records",
    "validate_and_sort",
    "zone_of",
    "NOISE",
    "ClusterResult",
    "SegmentSet",
    "StitchPlan",
    "TransitionMatrix",
    "cluster",
    "dbscan",
    "exposure_index",
    "load_index",
    "load_ratio",
    "segment_trajectory",
    "stitch_tracks",
    "transition_matrix",
    "zone_sequence",
]

__version__ = "0.1.0"
