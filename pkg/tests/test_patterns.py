import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import naive_dbscan, partition
from trackmetrics.model import AnalysisConfig, Trajectory, ZonePolygon
from trackmetrics.patterns import (
    NOISE,
    cluster,
    dbscan,
    exposure_index,
    load_index,
    load_ratio,
    resolve_eps,
    segment_starts,
    segment_trajectory,
    stitch_tracks,
    transition_matrix,
    zone_sequence,
)


def _line(track, t0_s, t1_s, p0, p1, n=6):
    ts = np.linspace(t0_s * 1000, t1_s * 1000, n)
    pts = np.linspace(p0, p1, n)
    return Trajectory(track, ts, pts)


def test_stitch_merges_close_fragment():
    a = _line(1, 0, 10.0, (0, 100), (100, 100))
    b = _line(2, 10.5, 20, (110, 105), (200, 105))
    merged, plan = stitch_tracks([a, b])
    assert len(merged) == 1 and len(plan) == 1
    m = plan.merges[0]
    assert (m.absorbed, m.surviving, m.gap_s) == (2, 1, 0.5)
    assert m.gap_px == pytest.approx(math.hypot(10, 5)) and m.gap_px == pytest.approx(11.18, abs=0.005)
    assert len(merged[0]) == 12 and merged[0].track_id == 1


def test_stitch_rejects_long_gap():
    a = _line(1, 0, 10.0, (0, 100), (100, 100))
    b = _line(2, 15.0, 20, (110, 105), (200, 105))
    merged, plan = stitch_tracks([a, b])
    assert len(merged) == 2 and len(plan) == 0


def test_stitch_rejects_far_start():
    a = _line(1, 0, 10.0, (0, 100), (100, 100))
    b = _line(2, 10.5, 20, (300, 100), (400, 100))
    assert len(stitch_tracks([a, b])[1]) == 0


def test_stitch_requires_strict_precedence():
    a = _line(1, 0, 10.0, (0, 100), (100, 100))
    b = _line(2, 10.0, 20, (101, 100), (200, 100))
    assert len(stitch_tracks([a, b])[1]) == 0


def test_stitch_nearest_first_and_one_to_one():
    a = _line(1, 0, 10.0, (0, 100), (100, 100))
    near = _line(2, 10.5, 20, (105, 100), (200, 100))
    far = _line(3, 10.2, 20, (130, 100), (200, 140))
    merged, plan = stitch_tracks([far, a, near])
    assert [(m.absorbed, m.surviving) for m in plan.merges] == [(2, 1)]
    assert sorted(t.track_id for t in merged) == [1, 3]


def test_stitch_chains_transitively():
    a = _line(1, 0, 10, (0, 0), (100, 0))
    b = _line(2, 11, 20, (110, 0), (200, 0))
    c = _line(3, 21, 30, (210, 0), (300, 0))
    merged, plan = stitch_tracks([c, b, a])
    assert len(merged) == 1 and [(m.absorbed, m.surviving) for m in plan.merges] == [(2, 1), (3, 1)]
    assert np.all(np.diff(merged[0].timestamps) > 0)


def test_stitch_properties_random():
    rng = np.random.default_rng(12)
    for _ in range(40):
        trajs = []
        for k in range(int(rng.integers(1, 12))):
            t0 = rng.uniform(0, 30)
            dur = rng.uniform(0.5, 8)
            p0 = rng.uniform(0, 300, 2)
            trajs.append(_line(k, t0, t0 + dur, p0, p0 + rng.normal(0, 40, 2), int(rng.integers(1, 6))))
        merged, plan = stitch_tracks(trajs)
        assert sum(len(t) for t in merged) == sum(len(t) for t in trajs)
        assert len(merged) == len(trajs) - len(plan)
        absorbed = [m.absorbed for m in plan.merges]
        assert len(absorbed) == len(set(absorbed))
        for t in merged:
            assert np.all(np.diff(t.timestamps) > 0)


A = ZonePolygon("A", ((0, 0), (10, 0), (10, 10), (0, 10)), priority=1)
B = ZonePolygon("B", ((20, 0), (30, 0), (30, 10), (20, 10)), priority=2)
C = ZonePolygon("C", ((40, 0), (50, 0), (50, 10), (40, 10)), priority=3)


def _traj(points):
    return Trajectory(1, np.arange(len(points)) * 1000.0, points)


def test_zone_sequence_examples():
    a, b, c, out = (5, 5), (25, 5), (45, 5), (15, 5)
    assert zone_sequence(_traj([a, a, b, b, c]), [A, B, C]) == ["A", "B", "C"]
    assert zone_sequence(_traj([a, out, a, b]), [A, B, C]) == ["A", "B"]
    assert zone_sequence(_traj([out, out]), [A, B, C]) == []


def test_transition_matrix_examples():
    m = transition_matrix([["A", "B"], ["A", "B"], ["A", "C"], ["B", "C"]], [A, B, C])
    assert m.probability("A", "B") == pytest.approx(2 / 3)
    assert m.probability("A", "C") == pytest.approx(1 / 3)
    assert m.probability("B", "C") == 1
    assert m.counts.tolist() == [[0, 2, 1], [0, 0, 1], [0, 0, 0]]
    z = transition_matrix([["A"]], [A, B, C])
    assert not z.probabilities.any() and not z.counts.any()


def test_transition_matrix_skips_self_loops_and_rejects_unknown():
    m = transition_matrix([["A", "A", "B"]], ["A", "B"])
    assert m.counts.tolist() == [[0, 1], [0, 0]]
    with pytest.raises(ValueError):
        transition_matrix([["A", "Z"]], ["A", "B"])


seq_sets = st.lists(st.lists(st.sampled_from("ABCDE"), max_size=12), max_size=20)


@given(seq_sets)
def test_transition_rows_stochastic_and_exposure_total(seqs):
    m = transition_matrix(seqs, list("ABCDE"))
    nonzero = m.counts.sum(axis=1) > 0
    assert np.all(np.abs(m.probabilities[nonzero].sum(axis=1) - 1) <= 1e-9)
    assert np.all(m.probabilities[~nonzero] == 0)
    assert np.all((m.probabilities >= 0) & (m.probabilities <= 1))
    assert np.all(np.diag(m.probabilities) == 0)
    assert abs(sum(exposure_index(m).values()) - nonzero.sum()) <= 1e-9


def test_exposure_examples():
    # incoming 0.73 from X and 0.40 from Y
    seqs = [["X", "Z"]] * 73 + [["X", "W"]] * 27 + [["Y", "Z"]] * 40 + [["Y", "W"]] * 60
    m = transition_matrix(seqs, ["X", "Y", "Z", "W"])
    ex = exposure_index(m)
    assert ex["Z"] == pytest.approx(1.13) and ex["X"] == 0


def test_load_index():
    assert load_index(600, 1530) == 918_000
    assert load_index(0, 1234.5) == 0
    assert load_ratio((600, 1528.3), (150, 931.6)) == pytest.approx(6.56, abs=0.01)
    with pytest.raises(ValueError):
        load_index(-1, 10)


def _resampled(n):
    return Trajectory(5, np.arange(n) * 100.0, np.c_[np.arange(n), np.zeros(n)])


def test_segments_examples():
    cfg = AnalysisConfig()
    segs = segment_trajectory(_resampled(20), cfg).segments
    assert [(s.start_index + 1, s.end_index + 1) for s in segs] == [(1, 8), (7, 14), (13, 20)]
    assert all(len(s.points) == 8 for s in segs)
    assert len(segment_trajectory(_resampled(8), cfg).segments) == 1
    segs = segment_trajectory(_resampled(10), cfg).segments
    assert [(s.start_index + 1, s.end_index + 1) for s in segs] == [(1, 8), (3, 10)]
    (only,) = segment_trajectory(_resampled(5), cfg).segments
    assert len(only.points) == 5


def test_segment_windows_cover_structurally():
    for n in range(2, 41):
        for length in range(2, n + 1):
            for overlap in range(0, length):
                starts = segment_starts(n, length, overlap)
                covered = set()
                for s in starts:
                    covered.update(range(s, s + length))
                assert starts[0] == 0 and starts[-1] + length == n
                assert covered == set(range(n))
                shared = [a + length - b for a, b in zip(starts, starts[1:])]
                assert all(v == overlap for v in shared[:-1])
                if shared:
                    assert shared[-1] >= overlap


def _cfg(**kw):
    return AnalysisConfig(**kw)


def test_cluster_identical_plus_outlier():
    base = np.c_[np.linspace(0, 100, 20), np.zeros(20)]
    items = [base] * 4 + [base + [0, 500]]
    res = cluster(items, _cfg(dbscan_eps=10.0))
    assert res.cluster_sizes == {0: 4} and res.labels[-1] == NOISE
    want = naive_dbscan(res_distances(items), 10.0, 3)
    assert partition(res.labels) == want


def res_distances(items):
    from trackmetrics.geometry import pairwise_distances

    return pairwise_distances(items)[0]


def test_cluster_all_identical_auto_eps():
    base = np.c_[np.linspace(0, 100, 20), np.zeros(20)]
    res = cluster([base] * 5, _cfg(), ids=[9, 4, 7, 5, 6])
    assert res.n_clusters == 1 and res.n_noise == 0
    assert res.medoids == {0: 4}


def test_eps_zero_all_noise():
    base = np.c_[np.linspace(0, 100, 20), np.zeros(20)]
    res = cluster([base] * 5, _cfg(dbscan_eps=0.0))
    assert res.n_noise == 5 and res.n_clusters == 0


def test_fewer_items_than_min_pts():
    base = np.c_[np.linspace(0, 100, 20), np.zeros(20)]
    assert cluster([base, base], _cfg(dbscan_eps=5.0)).n_noise == 2
    assert cluster([], _cfg()).labels.size == 0


def test_auto_eps_percentile():
    D = np.array([[0, 1, 2, 0], [1, 0, 3, 4], [2, 3, 0, 5], [0, 4, 5, 0]], float)
    assert resolve_eps(D, _cfg()) == pytest.approx(np.percentile([1, 2, 3, 4, 5], 15))


def _random_instance(rng):
    k = int(rng.integers(1, 26))
    centers = rng.uniform(0, 200, size=(int(rng.integers(1, 4)), 2))
    items = []
    for _ in range(k):
        c = centers[rng.integers(len(centers))]
        path = np.linspace(c, c + rng.normal(50, 10, 2), 20) + rng.normal(0, rng.uniform(1, 15), (20, 2))
        items.append(path)
    return items


def test_dbscan_matches_naive_oracle():
    rng = np.random.default_rng(21)
    for _ in range(100):
        items = _random_instance(rng)
        D = res_distances(items)
        eps = float(rng.choice([resolve_eps(D, _cfg()), rng.uniform(1, 60)]))
        min_pts = int(rng.integers(1, 5))
        labels = dbscan(D, eps, min_pts)
        assert partition(labels) == naive_dbscan(D.tolist(), eps, min_pts)


def test_dbscan_core_points_match_sklearn():
    sklearn_cluster = pytest.importorskip("sklearn.cluster")
    rng = np.random.default_rng(22)
    for _ in range(50):
        items = _random_instance(rng)
        D = res_distances(items)
        eps = resolve_eps(D, _cfg())
        ref = sklearn_cluster.DBSCAN(eps=eps, min_samples=3, metric="precomputed").fit(D)
        core = np.zeros(len(D), bool)
        core[ref.core_sample_indices_] = True
        ours = dbscan(D, eps, 3)
        assert set(np.flatnonzero(ours == NOISE)) == set(np.flatnonzero(ref.labels_ == -1))
        assert partition(ours[core], np.flatnonzero(core)) == partition(ref.labels_[core], np.flatnonzero(core))


def test_dbscan_permutation_invariant():
    rng = np.random.default_rng(23)
    for _ in range(30):
        items = _random_instance(rng)
        ids = list(range(len(items)))
        base = cluster(items, _cfg(), ids=ids)
        perm = rng.permutation(len(items))
        shuffled = cluster([items[i] for i in perm], _cfg(), ids=[ids[i] for i in perm])
        assert partition(base.labels, ids) == partition(shuffled.labels, shuffled.ids)
        assert base.medoids.values() and set(base.medoids.values()) == set(shuffled.medoids.values()) \
            or not base.medoids


def test_medoid_belongs_to_cluster():
    rng = np.random.default_rng(24)
    for _ in range(20):
        items = _random_instance(rng)
        res = cluster(items, _cfg())
        for lab, mid in res.medoids.items():
            assert res.labels[mid] == lab
            members = np.flatnonzero(res.labels == lab)
            D = res_distances(items)
            sums = D[np.ix_(members, members)].sum(axis=1)
            assert D[mid, members].sum() == pytest.approx(sums.min())
