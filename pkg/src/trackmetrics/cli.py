"""Command line entry point: ``trackmetrics {dwell,flow,patterns,synth}``.

Exit codes: 0 success, 1 usage error, 2 input parse error, 3 config error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .io import ConfigError, InputError, ReportSet, write_detections
from .synth import generate, labels_csv, load_spec

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CONFIG = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _analysis_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="detection log (.csv/.tsv or JSON lines)")
    p.add_argument("--zones", required=True, help="zone document(s) as JSON")
    p.add_argument("--config", help="JSON object overriding analysis defaults")
    p.add_argument("--out", required=True, help="output directory for report tables")
    p.add_argument("--camera", help="camera to analyze when the zones file lists several")
    p.add_argument("--timezone-offset", type=float, default=0.0, metavar="HOURS",
                   help="local time offset from UTC used for day boundaries")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trackmetrics", description=__doc__.splitlines()[0])
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress per-record warnings")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("dwell", "dwell events, daily summary and histograms"),
        ("flow", "entry/exit classification and daily counts"),
        ("patterns", "stitching, zone transitions and trajectory clusters"),
    ):
        _analysis_args(sub.add_parser(name, help=help_text))
    synth = sub.add_parser("synth", help="generate a synthetic detection log with labels")
    synth.add_argument("--spec", required=True, help="generator spec (JSON)")
    synth.add_argument("--out", required=True, help="detection log to write (.csv or .jsonl)")
    synth.add_argument("--labels", help="ground-truth label CSV (default: <out>.labels.csv)")
    return parser


_RUNNERS = {
    "dwell": pipeline.run_dwell,
    "flow": pipeline.run_flow,
    "patterns": pipeline.run_patterns,
}


def _synth(args) -> None:
    spec = load_spec(args.spec)
    records, labels = generate(spec)
    out = Path(args.out)
    labels_path = Path(args.labels) if args.labels else out.with_name(out.stem + ".labels.csv")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_detections(out, records)
    labels_path.write_text(labels_csv(labels), encoding="utf-8")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.WARNING,
        format="warning: %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "synth":
            _synth(args)
        else:
            run = _RUNNERS[args.command]
            reports: ReportSet = run(args.input, args.zones, args.config, args.camera, args.timezone_offset)
            reports.commit(args.out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
