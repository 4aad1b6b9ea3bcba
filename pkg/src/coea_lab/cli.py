"""Command-line front end.

    coea-lab <subcommand> --config <path> [--jobs N] [--seed S] [--out DIR]

Subcommands: run, sweep-chi, scale-n, ea-vs-coea, oracles, summarize.
`run` needs a full experiment spec JSON; the canned subcommands build
desk-scale specs and accept a partial spec JSON as overrides. For
`summarize`, --config is the results.csv to summarize. For `oracles`,
--config is an oracle grid JSON (defaults to the shipped grid).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigurationError
from .experiments import (
    ExperimentSpec,
    chi_sweep_spec,
    ea_failure_spec,
    ea_vs_coea_specs,
    restart_spec,
    run_experiment,
    scaling_spec,
    summarize,
)
from .oracles import default_grid, failed_rows, run_oracle_grid, write_oracle_report


def _add_common(p: argparse.ArgumentParser, config_required: bool = False):
    p.add_argument("--config", required=config_required,
                   help="JSON config (full spec for `run`, overrides otherwise)")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--seed", type=int, default=None, help="override master seed")
    p.add_argument("--out", default=None, help="override output directory")
    p.add_argument("--telemetry", choices=["off", "summary", "full"], default=None)


def _load_overrides(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _apply_overrides(spec: ExperimentSpec, args, overrides: dict) -> ExperimentSpec:
    d = spec.to_dict()
    d.update(overrides)
    if args.seed is not None:
        d["master_seed"] = args.seed
    if args.out is not None:
        d["output_dir"] = args.out
    if args.telemetry is not None:
        d["telemetry"] = args.telemetry
    return ExperimentSpec.from_dict(d)


def _finish(spec: ExperimentSpec, jobs: int) -> int:
    out = run_experiment(spec, jobs=jobs)
    print(f"{spec.name}: wrote {out / 'results.csv'} and {out / 'summary.json'}")
    return 0


def _cmd_run(args) -> int:
    spec = ExperimentSpec.from_json(args.config)
    spec = _apply_overrides(spec, args, {})
    return _finish(spec, args.jobs)


def _cmd_sweep_chi(args) -> int:
    spec = chi_sweep_spec(output_dir=args.out or "out/chi-sweep")
    return _finish(_apply_overrides(spec, args, _load_overrides(args.config)), args.jobs)


def _cmd_scale_n(args) -> int:
    spec = scaling_spec(output_dir=args.out or "out/scaling")
    return _finish(_apply_overrides(spec, args, _load_overrides(args.config)), args.jobs)


def _cmd_ea_vs_coea(args) -> int:
    base = args.out or "out/ea-vs-coea"
    ea, coea = ea_vs_coea_specs(output_dir=base)
    overrides = _load_overrides(args.config)
    ea_args = argparse.Namespace(**{**vars(args), "out": str(Path(base) / "ea")})
    coea_args = argparse.Namespace(**{**vars(args), "out": str(Path(base) / "coea")})
    rc = _finish(_apply_overrides(ea, ea_args, overrides), args.jobs)
    rc |= _finish(_apply_overrides(coea, coea_args, overrides), args.jobs)
    ea_summary = json.loads((Path(base) / "ea" / "summary.json").read_text())
    coea_summary = json.loads((Path(base) / "coea" / "summary.json").read_text())
    comparison = {
        "ea_success_rate": ea_summary["configurations"][0]["success_rate"],
        "coea_success_rate": coea_summary["configurations"][0]["success_rate"],
    }
    with open(Path(base) / "comparison.json", "w", encoding="utf-8") as fh:
        json.dump(comparison, fh, indent=2, sort_keys=True)
    print(f"ea-vs-coea: {comparison}")
    return rc


def _cmd_ea_failure(args) -> int:
    spec = ea_failure_spec(output_dir=args.out or "out/ea-failure")
    return _finish(_apply_overrides(spec, args, _load_overrides(args.config)), args.jobs)


def _cmd_restart(args) -> int:
    spec = restart_spec(output_dir=args.out or "out/restart")
    return _finish(_apply_overrides(spec, args, _load_overrides(args.config)), args.jobs)


def _cmd_oracles(args) -> int:
    grid = _load_overrides(args.config) if args.config else default_grid()
    rows = run_oracle_grid(grid)
    out_dir = Path(args.out or "out/oracles")
    out_dir.mkdir(parents=True, exist_ok=True)
    report = out_dir / "oracle_report.csv"
    write_oracle_report(rows, report)
    bad = failed_rows(rows)
    print(f"oracles: {len(rows)} checks, {len(bad)} non-vacuous failures -> {report}")
    return 1 if bad else 0


def _cmd_summarize(args) -> int:
    if not args.config:
        raise ConfigurationError("summarize needs --config <results.csv>")
    out_dir = Path(args.out) if args.out else Path(args.config).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    out_file = out_dir / "summary.json"
    summarize(args.config, out_file)
    print(f"summarize: wrote {out_file}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coea-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    handlers = {
        "run": (_cmd_run, "execute an experiment spec JSON", True),
        "sweep-chi": (_cmd_sweep_chi, "desk-scale mutation-rate sweep", False),
        "scale-n": (_cmd_scale_n, "desk-scale runtime scaling in n = lambda", False),
        "ea-vs-coea": (_cmd_ea_vs_coea, "plain EA and CoEA on the same grid", False),
        "ea-failure": (_cmd_ea_failure, "plain EA timeout experiment", False),
        "restart": (_cmd_restart, "all-zeros init with periodic restarts", False),
        "oracles": (_cmd_oracles, "evaluate lemma bound checks on a grid", False),
        "summarize": (_cmd_summarize, "recompute summary.json from a results.csv", False),
    }
    for name, (fn, help_text, config_required) in handlers.items():
        p = sub.add_parser(name, help=help_text)
        _add_common(p, config_required=config_required)
        p.set_defaults(handler=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
