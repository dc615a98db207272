"""
Zone transitions and trajectory clusters
========================================

Three corridors through the venue, one walker split into fragments by
the tracker, then the transition matrix and both clusterings.
"""

# %%
import numpy as np

from trackmetrics.model import AnalysisConfig, trajectories_from_records, validate_and_sort
from trackmetrics.patterns import (
    cluster_segments,
    cluster_trajectories,
    stitch_tracks,
    transition_matrix,
    zone_sequence,
)
from trackmetrics.synth import generate, parse_synthetic_spec
from venue import VENUE

spec = parse_synthetic_spec({
    "seed": 9,
    "zones": VENUE,
    "noise": {"jitter_px": 1.0},
    "scripts": [
        {"kind": "pass_through", "path": [[560, 450], [1180, 450]], "count": 15},
        {"kind": "pass_through", "path": [[300, 690], [700, 200]], "count": 10},
        {"kind": "pass_through", "path": [[1150, 680], [750, 300], [450, 500]], "count": 8},
        {"kind": "fragmented", "path": [[560, 600], [1180, 600]], "pieces": 3, "gap_s": 1},
    ],
})
records, _ = generate(spec)
cfg = AnalysisConfig()

trajectories, plan = stitch_tracks(trajectories_from_records(validate_and_sort(records)), cfg)
for m in plan.merges:
    print(f"track {m.absorbed} joins {m.surviving}: {m.gap_s:.1f} s later, {m.gap_px:.1f} px away")

# %%
zones = spec.zones.zones
matrix = transition_matrix([zone_sequence(t, zones) for t in trajectories], zones)
np.set_printoptions(precision=2, suppress=True)
print(matrix.zone_ids)
print(matrix.probabilities)

# %%
full, _ = cluster_trajectories(trajectories, cfg)
print(f"full trajectories: eps={full.eps:.1f}, clusters={full.cluster_sizes}, noise={full.n_noise}")
print("medoid tracks:", full.medoids)

parts, _ = cluster_segments(trajectories, cfg)
print(f"segments: {len(parts.ids)} windows, {parts.n_clusters} clusters, noise={parts.n_noise}")
