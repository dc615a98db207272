"""Readers for detection logs and zone/analysis configs; plain-text report writers.

Detection logs carry one record per line with fields ``ts_ms, camera,
track, x, y, w, h, category``, either as CSV (``.csv``/``.tsv``, header
row required) or as JSON lines (any other extension).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .model import AnalysisConfig, BoundingBox, DetectionRecord, GatePair, Rect, ZoneConfig, ZonePolygon

__all__ = [
    "InputError",
    "ConfigError",
    "DETECTION_FIELDS",
    "read_detections",
    "iter_detections",
    "write_detections",
    "read_zone_configs",
    "parse_zone_config",
    "zone_config_to_dict",
    "read_analysis_config",
    "csv_text",
    "ReportSet",
]

DETECTION_FIELDS = ("ts_ms", "camera", "track", "x", "y", "w", "h", "category")


class InputError(Exception):
    """An input file is missing or cannot be parsed."""

    def __init__(self, path, message: str, line: int | None = None):
        self.path = str(path)
        self.line = line
        where = self.path if line is None else f"{self.path}:{line}"
        super().__init__(f"{where}: {message}")


class ConfigError(Exception):
    """A config or zone document is readable but invalid."""

    def __init__(self, path, message: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")


def _record_from_fields(row: dict, path, line: int) -> DetectionRecord:
    missing = [f for f in DETECTION_FIELDS if f not in row or row[f] is None]
    if missing:
        raise InputError(path, f"missing fields {missing}", line)
    try:
        ts = row["ts_ms"]
        track = row["track"]
        if isinstance(ts, float) or isinstance(track, float):
            raise ValueError("ts_ms and track must be integers")
        box = BoundingBox(*(float(row[k]) for k in ("x", "y", "w", "h")))
        return DetectionRecord(int(ts), str(row["camera"]), int(track), box, str(row["category"]))
    except (TypeError, ValueError) as exc:
        raise InputError(path, f"bad value: {exc}", line) from None


def _is_csv(path: Path) -> bool:
    return path.suffix.lower() in (".csv", ".tsv")


def iter_detections(path) -> Iterator[DetectionRecord]:
    """Stream detection records from a CSV or JSON-lines file."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise InputError(path, f"cannot read ({exc.strerror})") from None
    with fh:
        if _is_csv(path):
            delim = "\t" if path.suffix.lower() == ".tsv" else ","
            reader = csv.DictReader(fh, delimiter=delim)
            if reader.fieldnames is None:
                return
            missing = set(DETECTION_FIELDS) - set(reader.fieldnames)
            if missing:
                raise InputError(path, f"header lacks columns {sorted(missing)}", 1)
            for row in reader:
                yield _record_from_fields(row, path, reader.line_num)
        else:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise InputError(path, f"invalid JSON ({exc.msg})", lineno) from None
                if not isinstance(row, dict):
                    raise InputError(path, "record is not an object", lineno)
                yield _record_from_fields(row, path, lineno)


def read_detections(path) -> list[DetectionRecord]:
    return list(iter_detections(path))


def _fmt_num(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() else repr(float(v))


def write_detections(path, records: Iterable[DetectionRecord]) -> None:
    """Write records as CSV or JSON lines depending on the extension."""
    path = Path(path)
    rows = [
        (r.timestamp, r.camera_id, r.track_id, r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h, r.category)
        for r in records
    ]
    if _is_csv(path):
        text = csv_text(DETECTION_FIELDS, [
            (t, c, k, _fmt_num(x), _fmt_num(y), _fmt_num(w), _fmt_num(h), cat)
            for t, c, k, x, y, w, h, cat in rows
        ], delimiter="\t" if path.suffix.lower() == ".tsv" else ",")
    else:
        text = "".join(
            json.dumps(dict(zip(DETECTION_FIELDS, row)), separators=(",", ":")) + "\n"
            for row in rows
        )
    path.write_text(text, encoding="utf-8")


def _load_json(path, error=InputError):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise error(path, f"cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        if error is InputError:
            raise InputError(path, f"invalid JSON ({exc.msg})", exc.lineno) from None
        raise error(path, f"invalid JSON at line {exc.lineno} ({exc.msg})") from None


def _rect(value) -> Rect:
    if isinstance(value, dict):
        return Rect(*(float(value[k]) for k in ("x", "y", "w", "h")))
    x, y, w, h = value
    return Rect(float(x), float(y), float(w), float(h))


def parse_zone_config(doc: dict) -> ZoneConfig:
    """Build a :class:`ZoneConfig` from a decoded zone document."""
    camera = str(doc.get("camera", ""))
    zones = tuple(
        ZonePolygon(
            zone_id=str(z["id"]),
            name=str(z.get("name", z["id"])),
            priority=int(z.get("priority", i)),
            vertices=tuple(tuple(v) for v in z["vertices"]),
        )
        for i, z in enumerate(doc.get("zones", []))
    )
    gates = None
    if doc.get("gates") is not None:
        g = doc["gates"]
        gates = GatePair(_rect(g["start"]), _rect(g["finish"]), camera)
    return ZoneConfig(camera, zones, gates, tuple(str(z) for z in doc.get("dwell_zones", [])))


def zone_config_to_dict(cfg: ZoneConfig) -> dict:
    doc: dict = {
        "camera": cfg.camera_id,
        "zones": [
            {"id": z.zone_id, "name": z.name, "priority": z.priority,
             "vertices": [list(v) for v in z.vertices]}
            for z in cfg.zones
        ],
    }
    if cfg.gates is not None:
        doc["gates"] = {
            key: {"x": r.x, "y": r.y, "w": r.w, "h": r.h}
            for key, r in (("start", cfg.gates.start_zone), ("finish", cfg.gates.finish_zone))
        }
    if cfg.dwell_zones:
        doc["dwell_zones"] = list(cfg.dwell_zones)
    return doc


def read_zone_configs(path) -> list[ZoneConfig]:
    """Zone documents from a JSON file holding one document or a list of them."""
    data = _load_json(path)
    docs = data if isinstance(data, list) else [data]
    out = []
    for i, doc in enumerate(docs):
        if not isinstance(doc, dict):
            raise ConfigError(path, f"zone document {i} is not an object")
        try:
            out.append(parse_zone_config(doc))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(path, f"zone document {i}: {exc}") from None
    return out


def read_analysis_config(path=None) -> AnalysisConfig:
    """Defaults, overridden field by field from a JSON object when ``path`` is given."""
    if path is None:
        return AnalysisConfig()
    data = _load_json(path, error=ConfigError)
    if not isinstance(data, dict):
        raise ConfigError(path, "config must be a JSON object")
    try:
        return AnalysisConfig.from_mapping(data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from None


def csv_text(header: Sequence[str], rows: Iterable[Sequence], delimiter: str = ",") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


class ReportSet:
    """Report files collected in memory and written together.

    Nothing touches the output directory until :meth:`commit`, which stages
    every file in a temporary directory and then moves them into place.
    """

    def __init__(self):
        self.files: dict[str, str] = {}

    def add_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
        self.files[name] = csv_text(header, rows)

    def add_json(self, name: str, obj) -> None:
        self.files[name] = json.dumps(obj, indent=2, sort_keys=True) + "\n"

    def commit(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with tempfile.TemporaryDirectory(dir=out, prefix=".staging-") as tmp:
            for name, text in self.files.items():
                (Path(tmp) / name).write_text(text, encoding="utf-8")
            written = []
            for name in self.files:
                dest = out / name
                os.replace(Path(tmp) / name, dest)
                written.append(dest)
        return written


def fmt(v: float, digits: int = 1) -> str:
    """Fixed-point text for report tables."""
    if not math.isfinite(v):
        return "nan"
    return f"{v:.{digits}f}"
