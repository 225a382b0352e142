"""Command-line interface: ``seqtopo {features,dist,tree,plot,pathhom}``.

Exit codes: 0 success, 1 usage or configuration error, 2 input error,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
from typing import Dict, List, Optional

from . import __version__
from .pipeline import (
    ConfigError,
    InputError,
    RunConfig,
    read_config_pairs,
    run_dist,
    run_per_sequence,
    run_plot,
    run_tree,
)

EXIT_OK, EXIT_CONFIG, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value settings file; flags override it")
    p.add_argument("-o", "--out", dest="output", help="output directory (default: out)")


def _sequence_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("inputs", nargs="*", help="FASTA or plain-text sequence files")
    p.add_argument("--alphabet", help="symbols, e.g. ACGT")
    p.add_argument("--ambiguity", help="skip or reject symbols outside the alphabet")
    p.add_argument("--dmax", help="top simplex dimension (default 3)")
    p.add_argument("--fields", help="comma-separated coefficient fields: q, gf2")
    p.add_argument("--threads", help="worker processes (0 = all cores)")
    p.add_argument("--no-cache", dest="cache", action="store_const", const="false", help="bypass the feature cache")
    p.add_argument("--fail-fast", dest="fail_fast", action="store_const", const="true", help="stop at the first bad sequence")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seqtopo", description="Topological features and trees for symbol sequences.")
    parser.add_argument("--version", action="version", version=f"seqtopo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("features", help="barcodes, Betti curves and spectral-gap curves per sequence")
    _common(p)
    _sequence_options(p)
    p.add_argument("--function", help="ell, ell1, count or freq (default ell)")
    p.add_argument("--value-cap", dest="value_cap", help="ell/ell1 values above this become inf; curve grid end (default 64)")
    p.add_argument("--freq-step", dest="freq_step", help="grid step for freq, e.g. 1/1024")
    p.add_argument("--dims", help="comma-separated curve dimensions (default 0,1,2,3)")
    p.add_argument("--write-table", dest="write_table", action="store_const", const="true", help="also write table.csv")

    p = sub.add_parser("dist", help="distance matrix from feature curves")
    _common(p)
    p.add_argument("--features", default=None, help="feature directory (default OUT/features)")
    p.add_argument("--metric", help="manhattan, euclidean, chebyshev or minkowski(p)")
    p.add_argument("--families", help="comma-separated curve families (default spectral_gap_dim1)")

    p = sub.add_parser("tree", help="UPGMA tree from a distance matrix")
    _common(p)
    p.add_argument("--matrix", default=None, help="distance CSV (default OUT/distances.csv)")
    p.add_argument("--linkage", help="average, single or complete")
    p.add_argument("--no-svg", dest="svg", action="store_false", help="skip the SVG dendrogram")

    p = sub.add_parser("plot", help="SVG plots of barcodes and curves")
    _common(p)
    p.add_argument("--features", default=None, help="feature directory (default OUT/features)")
    p.add_argument("--plots", default=None, help="where to write plots (default: next to the features)")

    p = sub.add_parser("pathhom", help="persistent path homology of count or frequency filtrations")
    _common(p)
    _sequence_options(p)
    p.add_argument("--function", help="count or freq (default count)")
    return parser


_SETTINGS = (
    "output", "alphabet", "ambiguity", "dmax", "fields", "threads", "cache", "fail_fast",
    "function", "value_cap", "freq_step", "dims", "write_table", "metric", "families", "linkage",
)


def make_config(args: argparse.Namespace) -> RunConfig:
    """Config file first, then flags on top, then validation."""
    pairs = read_config_pairs(args.config)
    config = RunConfig().update(pairs)
    flags: Dict[str, str] = {k: getattr(args, k) for k in _SETTINGS if getattr(args, k, None) is not None}
    if getattr(args, "inputs", None):
        flags["inputs"] = ",".join(args.inputs)
    if args.command == "pathhom" and "function" not in flags and "function" not in pairs:
        flags["function"] = "count"
    config.update(flags)
    config.validate()
    if args.command == "pathhom" and config.function not in ("count", "freq"):
        raise ConfigError(f"path homology needs the count or freq function, not {config.function}")
    return config


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = make_config(args)
    out = config.output
    if args.command in ("features", "pathhom"):
        kind, subdir = ("features", "features") if args.command == "features" else ("pathhom", "pathhom")
        report = run_per_sequence(config, kind, subdir)
        for sid, err in report.failures.items():
            print(f"seqtopo: {sid}: {err}", file=sys.stderr)
        print(f"wrote {len(report.written)} sequence(s) to {out}/{subdir}")
        return EXIT_INPUT if report.failures else EXIT_OK
    if args.command == "dist":
        D = run_dist(config, args.features or f"{out}/features")
        print(f"wrote {len(D.ids)}x{len(D.ids)} matrix to {out}/distances.csv")
        return EXIT_OK
    if args.command == "tree":
        print(run_tree(config, args.matrix or f"{out}/distances.csv", svg=args.svg))
        return EXIT_OK
    written = run_plot(args.features or f"{out}/features", args.plots)
    print(f"wrote {len(written)} plot(s)")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"seqtopo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, FileNotFoundError) as exc:
        print(f"seqtopo: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # invariant violations and bugs
        print(f"seqtopo: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
