"""Command-line front end: ``rdds-score evaluate`` and ``rdds-score synth``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config
from .errors import ConfigError, RddsError
from .ingest import discover_runs, ingest_run, run_filename, write_run_csv, write_run_json
from .report import evaluate, render_json, render_table, write_series
from .scenario_synth import synthesize_with_truth


def _cmd_evaluate(args) -> int:
    config = load_config(args.config)
    paths = discover_runs(args.runs, args.format)
    if not paths:
        raise ConfigError(f"no .{args.format} run files found in {', '.join(map(str, args.runs))}")
    runs = [ingest_run(p, args.format) for p in paths]
    report = evaluate(config, runs, strict=True if args.strict else None, jobs=args.jobs)
    text = render_json(report)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.emit_series:
        for run in runs:
            write_series(run, config, args.emit_series)
    if not args.quiet and args.out:
        sys.stdout.write(render_table(report))
    return 0


def _cmd_synth(args) -> int:
    config = load_config(args.spec)
    if not config.synth:
        raise ConfigError("synth: spec file has no synth entries")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = set()
    for scenario_id, spec in config.synth:
        scenario = config.scenario(scenario_id)
        run, truth = synthesize_with_truth(spec, config.footprint, scenario)
        name = run_filename(run, args.format)
        if name in written:
            raise ConfigError(f"synth: duplicate run {run.run_id!r} in scenario {scenario_id!r}")
        written.add(name)
        if args.format == "csv":
            write_run_csv(run, out / name)
        else:
            write_run_json(run, out / name)
        sidecar = out / f"{scenario_id}__{run.run_id}.truth.json"
        sidecar.write_text(json.dumps(truth.to_dict(), indent=2) + "\n", encoding="utf-8")
    if not args.quiet:
        print(f"wrote {len(written)} run(s) to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rdds-score", description="Score road departure warning / road keeping assist test runs.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="score trajectory logs against a scenario config")
    ev.add_argument("--config", required=True, help="JSON or YAML evaluation config")
    ev.add_argument("--runs", required=True, nargs="+", help="run files and/or directories")
    ev.add_argument("--out", help="report path (JSON); stdout when omitted")
    ev.add_argument("--strict", action="store_true", help="also require the maximum excursion to stay short of each fail line")
    ev.add_argument("--emit-series", metavar="DIR", help="write per-run lateral position series CSVs")
    ev.add_argument("--format", choices=("csv", "json"), default="csv", help="run file format (default csv)")
    ev.add_argument("--jobs", type=int, default=1, help="worker processes for extraction")
    ev.add_argument("-q", "--quiet", action="store_true", help="do not print the summary table")
    ev.set_defaults(func=_cmd_evaluate)

    sy = sub.add_parser("synth", help="generate synthetic departure runs with ground-truth sidecars")
    sy.add_argument("--spec", required=True, help="config file with a 'synth' list")
    sy.add_argument("--out", required=True, help="output directory")
    sy.add_argument("--format", choices=("csv", "json"), default="csv")
    sy.add_argument("-q", "--quiet", action="store_true")
    sy.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RddsError as exc:
        print(f"error[{exc.kind}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
