import pytest

from conftest import VENUE
from trackmetrics.dwell import extract_all_dwell_events
from trackmetrics.flow import Direction, classify_all
from trackmetrics.model import group_tracks, validate_and_sort
from trackmetrics.synth import generate, labels_csv, parse_synthetic_spec

CORRIDOR = [[560, 450], [1180, 450]]


def spec(*scripts, **kw):
    return parse_synthetic_spec(dict({"seed": 3, "zones": VENUE, "scripts": list(scripts)}, **kw))


def test_seed_determinism():
    s = spec({"kind": "pass_through", "path": CORRIDOR, "count": 4},
             noise={"jitter_px": 2, "dropout": 0.1}, window_s=60)
    assert generate(s) == generate(s)
    other = parse_synthetic_spec({"seed": 4, "zones": VENUE, "window_s": 60, "noise": {"jitter_px": 2},
                                  "scripts": [{"kind": "pass_through", "path": CORRIDOR, "count": 4}]})
    assert generate(other)[0] != generate(s)[0]


def test_zero_tracks():
    records, labels = generate(spec({"kind": "dwell", "duration": 90}, tracks=0))
    assert records == [] and labels == []
    assert labels_csv(labels) == "track,kind,value,group\n"


def test_dwell_label_and_recovery():
    records, labels = generate(spec({"kind": "dwell", "duration": 90}))
    assert labels_csv(labels).splitlines()[1] == "1,dwell,90,"
    zones = parse_synthetic_spec({"seed": 0, "zones": VENUE}).zones
    (event,) = extract_all_dwell_events(validate_and_sort(records), zones.zois)
    assert event.duration == 90.0 and event.track_id == 1


@pytest.mark.parametrize("seconds", [0.6, 4, 9.9, 10, 10.1, 12])
def test_crossing_labels_recovered(seconds):
    s = spec({"kind": "entry", "crossing_time": seconds}, {"kind": "exit", "crossing_time": seconds})
    records, labels = generate(s)
    events = classify_all(validate_and_sort(records), s.zones.gates)
    assert [e.duration for e in events] == pytest.approx([seconds, seconds], abs=1e-3)
    expected = [Direction.ENTRY, Direction.EXIT] if seconds <= 10 else [Direction.UNCERTAIN] * 2
    assert [e.direction for e in events] == expected


def test_fragmented_pieces():
    records, labels = generate(spec({"kind": "fragmented", "path": CORRIDOR, "pieces": 3, "gap_s": 1}))
    tracks = {k[1]: v for k, v in group_tracks(records).items()}
    assert sorted(tracks) == [1, 2, 3]
    assert labels[0].group == "1;2;3" and labels[0].value == 3
    for a, b in ((1, 2), (2, 3)):
        assert tracks[b][0].timestamp - tracks[a][-1].timestamp == 1000


@pytest.mark.parametrize("doc", [
    {"zones": VENUE, "scripts": []},
    {"seed": "x", "zones": VENUE},
    {"seed": 1, "zones": VENUE, "scripts": [{"kind": "teleport"}]},
    {"seed": 1, "zones": VENUE, "scripts": [{"kind": "dwell", "duration": -5}]},
    {"seed": 1, "zones": {"camera": "c"}, "scripts": [{"kind": "entry"}]},
    {"seed": 1, "zones": VENUE, "noise": {"dropout": 1.0}},
])
def test_invalid_specs(doc):
    with pytest.raises(ValueError):
        parse_synthetic_spec(doc)
