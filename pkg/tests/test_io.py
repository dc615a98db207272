import json

import pytest

from conftest import rec
from trackmetrics.io import (
    ConfigError,
    InputError,
    ReportSet,
    read_analysis_config,
    read_detections,
    read_zone_configs,
    write_detections,
    zone_config_to_dict,
)

HEADER = "ts_ms,camera,track,x,y,w,h,category\n"


@pytest.mark.parametrize("name", ["log.csv", "log.tsv", "log.jsonl"])
def test_detection_round_trip(tmp_path, name):
    recs = [rec(1000, 1.5, 2, track=3), rec(2000, 4, 5.25, w=30, category="bag")]
    path = tmp_path / name
    write_detections(path, recs)
    assert read_detections(path) == recs


def test_csv_bad_value_reports_line(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text(HEADER + "1000,cam1,1,0,0,40,100,person\n2000,cam1,1,zero,0,40,100,person\n")
    with pytest.raises(InputError) as exc:
        read_detections(p)
    assert exc.value.line == 3 and str(p) in str(exc.value)


def test_csv_missing_column(tmp_path):
    p = tmp_path / "log.csv"
    p.write_text("ts_ms,camera,track,x,y,w,h\n1,c,1,0,0,1,1\n")
    with pytest.raises(InputError, match="category"):
        read_detections(p)


def test_jsonl_errors_and_blank_lines(tmp_path):
    p = tmp_path / "log.jsonl"
    good = json.dumps({"ts_ms": 1, "camera": "c", "track": 1, "x": 0, "y": 0, "w": 1, "h": 1,
                       "category": "person"})
    p.write_text(good + "\n\n" + good + "\n{oops\n")
    with pytest.raises(InputError) as exc:
        read_detections(p)
    assert exc.value.line == 4
    p.write_text(good.replace('"ts_ms": 1', '"ts_ms": 1.5') + "\n")
    with pytest.raises(InputError, match=":1:"):
        read_detections(p)


def test_empty_files(tmp_path):
    (tmp_path / "a.csv").write_text("")
    (tmp_path / "b.jsonl").write_text("")
    assert read_detections(tmp_path / "a.csv") == []
    assert read_detections(tmp_path / "b.jsonl") == []


def test_missing_file(tmp_path):
    with pytest.raises(InputError, match="nope.csv"):
        read_detections(tmp_path / "nope.csv")


def test_zone_config_round_trip(zones_file, venue):
    (cfg,) = read_zone_configs(zones_file)
    assert cfg == venue
    assert [z.zone_id for z in cfg.zois] == ["seating"]
    again = zone_config_to_dict(cfg)
    assert read_zone_configs(_dump(zones_file.parent / "z2.json", [again, dict(again, camera="cam2")]))[1].camera_id == "cam2"


def _dump(path, obj):
    path.write_text(json.dumps(obj))
    return path


def test_zone_config_errors(tmp_path, venue_doc):
    venue_doc["zones"][1]["priority"] = 1
    with pytest.raises(ConfigError, match="document 0"):
        read_zone_configs(_dump(tmp_path / "z.json", venue_doc))
    with pytest.raises(ConfigError):
        read_zone_configs(_dump(tmp_path / "z.json", [1, 2]))
    (tmp_path / "bad.json").write_text("{\n  'x': 1\n}")
    with pytest.raises(InputError) as exc:
        read_zone_configs(tmp_path / "bad.json")
    assert exc.value.line == 2


def test_overlapping_gates_rejected(tmp_path, venue_doc):
    venue_doc["gates"]["finish"] = {"x": 950, "y": 80, "w": 80, "h": 200}
    with pytest.raises(ConfigError):
        read_zone_configs(_dump(tmp_path / "z.json", venue_doc))


def test_analysis_config(tmp_path):
    assert read_analysis_config().min_dwell == 60
    cfg = read_analysis_config(_dump(tmp_path / "c.json", {"min_dwell": 30, "dbscan_eps": 12.5}))
    assert (cfg.min_dwell, cfg.dbscan_eps, cfg.max_dwell) == (30, 12.5, 7200)
    for bad in ({"min_dwel": 1}, {"min_dwell": -1}, [1]):
        with pytest.raises(ConfigError):
            read_analysis_config(_dump(tmp_path / "c.json", bad))
    with pytest.raises(ConfigError, match="missing.json"):
        read_analysis_config(tmp_path / "missing.json")


def test_report_set_commit(tmp_path):
    rs = ReportSet()
    rs.add_csv("a.csv", ("x", "y"), [(1, "a,b")])
    rs.add_json("b.json", {"z": 1, "a": [1.5]})
    rs.commit(tmp_path / "out")
    assert (tmp_path / "out" / "a.csv").read_text() == 'x,y\n1,"a,b"\n'
    assert json.loads((tmp_path / "out" / "b.json").read_text()) == {"a": [1.5], "z": 1}
    assert sorted(p.name for p in (tmp_path / "out").iterdir()) == ["a.csv", "b.json"]
