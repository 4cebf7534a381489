"""Command line front end.

    obameter simulate --out DIR [--manifest FILE] [overrides]
    obameter analyze DIR [--consensus-n N] [--consensus-t T]
                         [--filters SET] [--tprime T] [--cpc FILE]
    obameter filter DIR [--filters SET] [--tprime T]
    obameter validate DIR [--spurious-levels L ...] [--dropout D]
    obameter report DIR

Exit codes: 0 success, 2 configuration problems, 3 corpus data problems,
1 any other tool error. Diagnostics go to stderr, results to stdout.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .corpus import ExperimentStore
from .errors import ConfigurationError, CorpusDataError, ObameterError
from .experiment import (
    ExperimentManifest,
    analyze,
    digest,
    filter_attrition,
    load_manifest,
    simulate,
    validate,
)
from .persona import ConsensusConfig
from .pipeline import FILTER_SETS, FilterConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obameter",
        description="Detect and quantify behaviourally targeted ads.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="build a world and run all sessions")
    sim.add_argument("--out", required=True, help="corpus directory to write")
    sim.add_argument("--manifest", help="manifest JSON (default: built-in)")
    sim.add_argument("--seed", type=int, help="override the manifest seed")
    sim.add_argument("--budget", type=int, help="override the visit budget")
    sim.add_argument("--mean-interval", type=float, help="override the mean gap (s)")
    sim.add_argument("--repetitions", type=int, help="override the repetitions")
    sim.add_argument("--personas", type=int, help="override the default roster size")
    sim.set_defaults(func=_cmd_simulate)

    ana = sub.add_parser("analyze", help="score a corpus into report.json/csv")
    ana.add_argument("dir", help="corpus directory")
    ana.add_argument("--consensus-n", type=int, help="corroborating sources required")
    ana.add_argument("--consensus-t", type=float, help="consensus similarity threshold")
    ana.add_argument("--filters", choices=sorted(FILTER_SETS), help="filter set to apply")
    ana.add_argument("--tprime", type=float, help="audience similarity threshold")
    ana.add_argument("--cpc", help="JSON file mapping persona id to ad price")
    ana.set_defaults(func=_cmd_analyze)

    fil = sub.add_parser("filter", help="print per-session filter attrition")
    fil.add_argument("dir", help="corpus directory")
    fil.add_argument("--filters", choices=sorted(FILTER_SETS))
    fil.add_argument("--tprime", type=float)
    fil.set_defaults(func=_cmd_filter)

    val = sub.add_parser("validate", help="score detection against ground truth")
    val.add_argument("dir", help="corpus directory (needs world.json)")
    val.add_argument(
        "--spurious-levels", type=float, nargs="+",
        default=[0.0, 0.02, 0.05, 0.1, 0.2, 0.4],
        help="spurious tag rates to sweep",
    )
    val.add_argument("--dropout", type=float, help="fixed dropout rate")
    val.set_defaults(func=_cmd_validate)

    rep = sub.add_parser("report", help="print a digest of the stored reports")
    rep.add_argument("dir", help="corpus directory")
    rep.set_defaults(func=_cmd_report)
    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    manifest = load_manifest(args.manifest) if args.manifest else ExperimentManifest()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.budget is not None:
        overrides["visit_budget"] = args.budget
    if args.mean_interval is not None:
        overrides["mean_interval"] = args.mean_interval
    if args.repetitions is not None:
        overrides["repetitions"] = args.repetitions
    if args.personas is not None:
        overrides["n_personas"] = args.personas
    if overrides:
        manifest = dataclasses.replace(manifest, **overrides)
    summary = simulate(manifest, args.out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _analysis_overrides(args: argparse.Namespace) -> tuple[ConsensusConfig | None, FilterConfig | None]:
    store = ExperimentStore(args.dir)
    stored = ExperimentManifest.from_dict(store.load_doc("manifest.json"))
    consensus = None
    if args.consensus_n is not None or args.consensus_t is not None:
        consensus = ConsensusConfig(
            n=args.consensus_n if args.consensus_n is not None else stored.consensus.n,
            threshold=(
                args.consensus_t if args.consensus_t is not None
                else stored.consensus.threshold
            ),
        )
    filters = _filter_override(args, stored)
    return consensus, filters


def _filter_override(args: argparse.Namespace, stored: ExperimentManifest) -> FilterConfig | None:
    if args.filters is None and args.tprime is None:
        return None
    return FilterConfig(
        filters=args.filters if args.filters is not None else stored.filters.filters,
        t_prime=args.tprime if args.tprime is not None else stored.filters.t_prime,
    )


def _cmd_analyze(args: argparse.Namespace) -> int:
    consensus, filters = _analysis_overrides(args)
    report = analyze(args.dir, consensus=consensus, filters=filters, cpc_path=args.cpc)
    store = ExperimentStore(args.dir)
    print(f"scored {len(report['cells'])} cells "
          f"({len(report['personas'])} personas, {len(report['sources'])} sources)")
    print(f"wrote {store.path('report.json')} and {store.path('report.csv')}")
    return 0


def _cmd_filter(args: argparse.Namespace) -> int:
    # consensus flags do not exist on this subcommand
    args.consensus_n = None
    args.consensus_t = None
    _, filters = _analysis_overrides(args)
    rows = filter_attrition(args.dir, filters=filters)
    print(json.dumps(rows, indent=2, sort_keys=True))
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    result = validate(
        args.dir, spurious_levels=args.spurious_levels, dropout=args.dropout
    )
    for level in result["levels"]:
        agg = level["aggregate"]
        print(
            f"spurious {level['spurious']:<6} recall {_fmt(agg['recall'])} "
            f"accuracy {_fmt(agg['accuracy'])} fpr {_fmt(agg['fpr'])}"
        )
    print("clean profile pure: " + ("yes" if result["clean_profile_pure"] else "NO"))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    sys.stdout.write(digest(args.dir))
    return 0


def _fmt(value: float | None) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except CorpusDataError as exc:
        print(f"corpus error: {exc}", file=sys.stderr)
        return 3
    except ObameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
