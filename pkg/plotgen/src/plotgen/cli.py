"""Standalone figure generator:

    plotgen --kind {chi_sweep|scaling} --in results.csv --out fig.svg
            [--ref-coeff 6] [--log-y]
"""

from __future__ import annotations

import argparse
import sys

from .figures import CHI_SWEEP, SCALING, PlotRequest, plot
from .results import SchemaError


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plotgen", description=__doc__)
    p.add_argument("--kind", required=True, choices=[CHI_SWEEP, SCALING])
    p.add_argument("--in", dest="input", required=True, help="results.csv path")
    p.add_argument("--out", dest="output", required=True, help="figure path (.svg/.pdf/.png)")
    p.add_argument("--ref-coeff", type=float, default=6.0,
                   help="reference curve coefficient (0 disables the curve)")
    p.add_argument("--log-y", action="store_true", help="log-scale runtime axis")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    req = PlotRequest(kind=args.kind, input=args.input, output=args.output,
                      reference_coeff=args.ref_coeff, log_y=args.log_y)
    try:
        info = plot(req)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    drawn = info.boxes or info.points
    print(f"plotgen: wrote {args.output} "
          f"({drawn} groups drawn, {info.no_hit_groups} without hits)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
