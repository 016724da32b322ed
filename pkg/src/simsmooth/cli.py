"""Command-line front end: ``simsmooth smooth|verify|worstcase|explore``.

Exit codes: 0 success, 1 unsupported family or failed verification,
2 malformed input or configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import io as state_io
from .operators import STATE_KINDS, StateError, random_classical, random_state
from .oracle import OversizeError, optimal_classical_smoother
from .smoother import (
    FamilyError,
    OverlapError,
    SubsetFamily,
    check_commuting_marginals,
    explore_overlapping,
    format_subset,
    order_laminar,
    smooth_classical,
    smooth_laminar,
    smooth_two_party,
)
from .suites import SUITES, default_subsets, trial_seed
from .worstcase import WorstCaseParams, build_worst_case, verify_claim_one

log = logging.getLogger("simsmooth")

SCHEMA_VERSION = state_io.SCHEMA_VERSION
WORSTCASE_COLUMNS = ["n", "d_iterative", "d_star", "bound", "gap", "claim_pass"]
EXPLORE_COLUMNS = [
    "trial", "seed",
    "target_12", "achieved_12", "deficit_12",
    "target_23", "achieved_23", "deficit_23",
    "distance_purified", "distance_trace",
]

EPILOG = f"""\
subsets: semicolon-separated groups of comma-separated 1-based parties,
  e.g. "1;2;1,2" for {{A1}}, {{A2}}, {{A1A2}}.
CSV columns:
  verify     trial, seed, passed, <suite-specific metrics>
  worstcase  {", ".join(WORSTCASE_COLUMNS)}
  explore    {", ".join(EXPLORE_COLUMNS)}
SIMSMOOTH_THREADS caps the worker count for trial sweeps (default 1).
"""


class UsageError(Exception):
    """Malformed input or configuration (exit code 2)."""


def parse_subsets(text: str, num_parties: int | None = None) -> tuple[tuple[int, ...], ...]:
    groups = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        try:
            tokens = [int(tok) - 1 for tok in chunk.split(",")]
        except ValueError:
            raise UsageError(f"cannot parse subset {chunk!r}") from None
        members = sorted(set(tokens))
        if len(members) != len(tokens):
            raise UsageError(f"subset {chunk!r} repeats a party")
        if members[0] < 0 or (num_parties is not None and members[-1] >= num_parties):
            raise UsageError(f"subset {chunk!r} is outside parties 1..{num_parties}")
        groups.append(tuple(members))
    return tuple(groups)


def parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse dims {text!r}") from None
    if not dims or min(dims) < 1:
        raise UsageError(f"dims must be positive integers, got {text!r}")
    return dims


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SIMSMOOTH_THREADS", "1")))
    except ValueError:
        return 1


def _map_trials(fn, trials: int):
    """Run fn(trial) for every trial, rows ordered by trial index."""
    threads = _threads()
    if threads == 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _json_value(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if hasattr(x, "item"):
        return _json_value(x.item())
    return x


def _emit(payload, args, rows=None, columns=None) -> None:
    """Write rows as CSV or the payload as JSON to --out (stdout if absent)."""
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns or list(rows[0]), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _json_value(v) for k, v in row.items()})
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, default=_json_value) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_input(args):
    if args.input:
        return state_io.load_state(args.input)
    if not args.dims:
        raise UsageError("give --input or --dims")
    dims = parse_dims(args.dims)
    if args.kind in ("classical", "classical-sparse"):
        return random_classical(dims, sparse=args.kind == "classical-sparse", seed=args.seed)
    return random_state(dims, args.kind, args.seed)


def _family(args, num_parties: int, default: str | None = None) -> SubsetFamily:
    text = args.subsets or default
    if text is None:
        raise UsageError("--subsets is required")
    try:
        return SubsetFamily(parse_subsets(text, num_parties), args.epsilon, args.metric)
    except FamilyError as exc:
        raise UsageError(str(exc)) from None


def select_smoother(rho, family: SubsetFamily):
    """Pick the construction that covers (rho, family); raises OverlapError otherwise."""
    if check_commuting_marginals(rho, family):
        return "commuting", smooth_classical
    if rho.num_parties == 2:
        return "two-party", smooth_two_party
    order_laminar(family)
    return "laminar", smooth_laminar


def cmd_smooth(args) -> int:
    rho = _load_input(args)
    family = _family(args, rho.num_parties)
    try:
        name, smoother = select_smoother(rho, family)
    except OverlapError as exc:
        first, second = exc.pair
        print(
            f"simsmooth: unsupported family: {format_subset(first)} and "
            f"{format_subset(second)} overlap without nesting (open case)",
            file=sys.stderr,
        )
        return 1
    sigma, report = smoother(rho, family)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "smooth",
        "smoother": name,
        "epsilon": family.epsilon,
        "state": state_io.state_to_dict(sigma),
        "report": report.to_dict(),
    }
    _emit(payload, args)
    return 0


def cmd_verify(args) -> int:
    suite = SUITES[args.suite]
    dims = parse_dims(args.dims) if args.dims else suite.dims
    subsets = parse_subsets(args.subsets, len(dims)) if args.subsets else default_subsets(suite, len(dims))
    try:
        family = SubsetFamily(subsets, args.epsilon, args.metric)
    except FamilyError as exc:
        raise UsageError(str(exc)) from None

    def one(trial: int) -> dict:
        seed = trial_seed(args.seed, trial)
        return {"trial": trial, "seed": seed, **suite.run(seed, dims, args.epsilon, family)}

    rows = _map_trials(one, args.trials)
    failures = [r for r in rows if not r["passed"]]
    for r in failures:
        print(
            f"simsmooth: {suite.name} violated at trial {r['trial']} (base seed {args.seed}, trial seed {r['seed']})",
            file=sys.stderr,
        )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "suite": suite.name,
        "dims": list(dims),
        "epsilon": args.epsilon,
        "trials": args.trials,
        "seed": args.seed,
        "failures": len(failures),
        "rows": rows,
    }
    _emit(payload, args, rows)
    return 1 if failures else 0


def cmd_worstcase(args) -> int:
    active = parse_subsets(args.subsets or "1;2;1,2", 2)
    if not set(active) <= {(0,), (1,), (0, 1)}:
        raise UsageError("worst-case subsets must be drawn from 1;2;1,2")
    if not 0 <= args.epsilon < 1 / len(active):
        raise UsageError(f"epsilon must be below 1/{len(active)} for {len(active)} subsets")
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError("need 2 <= n-min <= n-max")
    family = SubsetFamily(active, args.epsilon, "trace")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        params = WorstCaseParams(n, active)
        p = build_worst_case(params)
        _, report = smooth_classical(p, family)
        try:
            _, d_star = optimal_classical_smoother(p, family)
        except OversizeError as exc:
            raise UsageError(f"n={n}: {exc}") from None
        verdict = verify_claim_one(params, args.epsilon, d_star)
        rows.append(
            {
                "n": n,
                "d_iterative": report.distance_trace,
                "d_star": d_star,
                "bound": verdict.bound,
                "gap": verdict.gap,
                "claim_pass": verdict.passed,
            }
        )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "worstcase",
        "epsilon": args.epsilon,
        "subsets": [[i + 1 for i in s] for s in active],
        "rows": rows,
    }
    _emit(payload, args, rows, WORSTCASE_COLUMNS)
    return 0


def _stats(values: list[float]) -> dict:
    finite = [v for v in values if not math.isinf(v)]
    return {
        "mean": statistics.fmean(finite) if finite else None,
        "max": max(values) if values else None,
        "positive": sum(v > 0 for v in values),
    }


def cmd_explore(args) -> int:
    dims = parse_dims(args.dims or "2,2,2")
    if len(dims) != 3:
        raise UsageError("explore needs exactly three parties")
    if args.kind not in ("mixed", "pure", "classical", "product"):
        raise UsageError(f"explore does not support kind {args.kind!r}")

    def one(trial: int) -> dict:
        seed = trial_seed(args.seed, trial)
        if args.kind == "classical":
            rho = random_classical(dims, seed=seed).to_operator()
        else:
            rho = random_state(dims, args.kind, seed)
        probe = explore_overlapping(rho, args.epsilon)
        r12, r23 = probe.records
        return {
            "trial": trial,
            "seed": seed,
            "target_12": r12.target, "achieved_12": r12.achieved, "deficit_12": r12.deficit,
            "target_23": r23.target, "achieved_23": r23.achieved, "deficit_23": r23.deficit,
            "distance_purified": probe.distance_purified,
            "distance_trace": probe.distance_trace,
        }

    rows = _map_trials(one, args.trials)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "command": "explore",
        "kind": args.kind,
        "dims": list(dims),
        "epsilon": args.epsilon,
        "trials": args.trials,
        "seed": args.seed,
        "deficit_12": _stats([r["deficit_12"] for r in rows]),
        "deficit_23": _stats([r["deficit_23"] for r in rows]),
        "distance_purified": _stats([r["distance_purified"] for r in rows]),
    }
    if args.out:
        _emit({**summary, "rows": rows}, args, rows, EXPLORE_COLUMNS)
        Path(str(args.out) + ".summary.json").write_text(json.dumps(summary, indent=2, default=_json_value) + "\n")
    sys.stdout.write(json.dumps(summary, indent=2, default=_json_value) + "\n")
    return 0


def _epsilon(text: str) -> float:
    value = float(text)
    if not 0 <= value < 1:
        raise argparse.ArgumentTypeError("epsilon must lie in [0, 1)")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simsmooth",
        description="Simultaneous min-entropy smoothing of multipartite states.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials=False):
        p.add_argument("--dims", help="comma-separated party dimensions, e.g. 2,3,2")
        p.add_argument("--kind", default="mixed", choices=STATE_KINDS, help="random state kind")
        p.add_argument("--subsets", help='family to smooth, e.g. "1;2;1,2"')
        p.add_argument("--epsilon", type=_epsilon, default=0.05)
        p.add_argument("--metric", choices=["trace", "purified"], default="trace")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output file (stdout if omitted)")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if trials:
            p.add_argument("--trials", type=_positive, default=100)

    p = sub.add_parser("smooth", help="smooth one state and report", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--input", help="state JSON file")
    common(p)
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("verify", help="run a seeded property suite", epilog=EPILOG,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("suite", choices=sorted(SUITES))
    common(p, trials=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("worstcase", help="sweep the worst-case grid against the LP oracle",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=5)
    p.set_defaults(func=cmd_worstcase)

    p = sub.add_parser("explore", help="probe the overlapping family {A1A2, A2A3}",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    common(p, trials=True)
    p.set_defaults(func=cmd_explore)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, StateError, FamilyError, OSError) as exc:
        print(f"simsmooth: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
