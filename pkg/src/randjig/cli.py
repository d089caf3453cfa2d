"""Command-line driver.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 a result dominated
by UNDECIDED verdicts (the budget prevented an answer).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys as _sys
import time
from pathlib import Path

from . import combinatorics as comb
from . import experiments as ex
from . import io as rio
from .core import Assembly
from .sampler import box_of, jig_system_of_kind, make_rng, sample_carving
from .solver import Verdict, classify, enumerate_solution_carvings

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_UNDECIDED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _q_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positions(text: str) -> tuple[tuple[int, int], tuple[int, int]]:
    try:
        a, b = text.split(":")
        p1 = tuple(int(x) for x in a.split(","))
        p2 = tuple(int(x) for x in b.split(","))
        assert len(p1) == len(p2) == 2
    except (ValueError, AssertionError):
        raise argparse.ArgumentTypeError(f"expected r1,c1:r2,c2, got {text!r}")
    return p1, p2


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="randjig", description="Random jigsaw puzzles: sampling, solving and experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n=True, q=True, seed=False, trials=False):
        if n:
            sp.add_argument("--n", type=int, required=True)
        if q:
            sp.add_argument("--q", type=int, required=True)
            sp.add_argument("--iota", default="identity", help="identity | paired | mixed:<s>")
        if seed:
            sp.add_argument("--seed", type=_seed, default=0)
        if trials:
            sp.add_argument("--trials", type=int, default=100)

    def budget(sp):
        sp.add_argument("--limit", type=int, default=2)
        sp.add_argument("--node-budget", type=int, default=10**7)
        sp.add_argument("--timeout-ms", type=int, default=None)

    def output(sp, fmt=True):
        sp.add_argument("--out", type=Path, default=None)
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("gen", help="sample a random puzzle")
    common(sp, seed=True)
    sp.add_argument("--out", type=Path, required=True)

    for name in ("solve", "classify"):
        sp = sub.add_parser(name, help=f"{name} a puzzle file")
        sp.add_argument("puzzle", type=Path)
        budget(sp)
        if name == "solve":
            sp.set_defaults(limit=None)
        output(sp, fmt=False)

    sp = sub.add_parser("trials", help="classify many random puzzles")
    common(sp, seed=True, trials=True)
    budget(sp)
    sp.add_argument("--workers", type=int, default=1)
    output(sp)

    sp = sub.add_parser("sweep", help="trials over a list of q values")
    common(sp, q=False, seed=True, trials=True)
    sp.add_argument("--q", type=_q_list, required=True, help="comma-separated, sorted")
    sp.add_argument("--iota", default="identity")
    budget(sp)
    sp.add_argument("--workers", type=int, default=1)
    output(sp)

    sp = sub.add_parser("kgood", help="k-good rate of planted assemblies")
    common(sp, seed=True, trials=True)
    sp.add_argument("--k", type=int, required=True)
    output(sp, fmt=False)

    sp = sub.add_parser("feas-mc", help="Monte Carlo feasibility of a two-piece swap")
    common(sp, seed=True, trials=True)
    sp.add_argument("--swap", type=_positions, default=None, help="r1,c1:r2,c2 (default: far corners of the interior)")
    output(sp, fmt=False)

    sp = sub.add_parser("subgraphs", help="enumerate connected lattice subgraphs")
    sp.add_argument("--max-e", type=int, required=True)
    output(sp)

    sp = sub.add_parser("bounds", help="closed-form counts and bounds, one row per (n, q)")
    sp.add_argument("--n", type=_q_list, required=True, help="comma-separated")
    sp.add_argument("--q", type=_q_list, required=True, help="comma-separated")
    sp.add_argument("--iota", default="identity")
    output(sp)
    return p


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        _sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _log(msg: str) -> None:
    print(msg, file=_sys.stderr, flush=True)


def _timeout(args) -> float | None:
    return None if args.timeout_ms is None else args.timeout_ms / 1000


def _cmd_gen(args) -> int:
    sys = jig_system_of_kind(args.q, args.iota)
    w = sample_carving(args.n, sys, make_rng(args.seed))
    rio.write_puzzle(args.out, w, sys, seed=args.seed)
    _log(f"seed={args.seed}")
    print(json.dumps({"seed": args.seed, "n": args.n, "q": args.q, "out": str(args.out)}))
    return EXIT_OK


def _cmd_solve(args) -> int:
    w, sys = rio.read_puzzle(args.puzzle)
    res = enumerate_solution_carvings(
        box_of(w, sys), w.n, sys, limit=args.limit, node_budget=args.node_budget, timeout=_timeout(args)
    )
    doc = {
        "num_distinct": len(res.distinct_carvings),
        "exhausted": res.exhausted,
        "nodes_expanded": res.nodes_expanded,
        "timed_out": res.timed_out,
        "duplicates_X": res.duplicates_X,
        "symmetric_Y": res.symmetric_Y,
        "carvings": [
            {"north": c.north.tolist(), "west": c.west.tolist()}
            for c in sorted(res.distinct_carvings, key=lambda c: c.key())
        ],
    }
    _emit(json.dumps(doc) + "\n", args.out)
    limit_hit = args.limit is not None and len(res.distinct_carvings) >= args.limit
    return EXIT_OK if res.exhausted or limit_hit else EXIT_UNDECIDED


def _cmd_classify(args) -> int:
    w, sys = rio.read_puzzle(args.puzzle)
    c = classify(w, sys, limit=args.limit, node_budget=args.node_budget, timeout=_timeout(args))
    doc = {
        "verdict": c.verdict.name,
        "uva": c.uva,
        "num_distinct": c.num_distinct,
        "duplicates_X": c.duplicates_X,
        "symmetric_Y": c.symmetric_Y,
        "nodes_expanded": c.nodes_expanded,
        "exhausted": c.exhausted,
        "timed_out": c.timed_out,
    }
    _emit(json.dumps(doc) + "\n", args.out)
    return EXIT_UNDECIDED if c.verdict is Verdict.UNDECIDED else EXIT_OK


def _undecided_dominated(rows) -> bool:
    return any(s.undecided_rate > 0.5 for s in rows)


def _stats_output(rows, args) -> None:
    if args.format == "csv":
        _emit(rio.sweep_csv(rows), args.out)
    else:
        _emit(json.dumps([rio.stats_json(s) for s in rows]) + "\n", args.out)


def _progress(q):
    last = [0.0]

    def report(done, total):
        now = time.monotonic()
        if done == total or now - last[0] > 1:
            last[0] = now
            _log(f"q={q}: {done}/{total} trials")

    return report


def _cmd_trials(args) -> int:
    _log(f"seed={args.seed}")
    s = ex.run_trials(
        args.n, args.q, jig_system_of_kind(args.q, args.iota), args.trials, args.seed, args.node_budget,
        iota_kind=args.iota, limit=args.limit, timeout=_timeout(args), workers=args.workers,
        progress=_progress(args.q),
    )
    _stats_output([s], args)
    return EXIT_UNDECIDED if _undecided_dominated([s]) else EXIT_OK


def _cmd_sweep(args) -> int:
    _log(f"seed={args.seed}")
    if not args.q or args.q != sorted(args.q):
        raise UsageError("--q must be a nonempty sorted list")
    rows = []
    for q in args.q:
        rows.append(ex.run_trials(
            args.n, q, jig_system_of_kind(q, args.iota), args.trials, args.seed, args.node_budget,
            iota_kind=args.iota, limit=args.limit, timeout=_timeout(args), workers=args.workers,
            progress=_progress(q),
        ))
    _stats_output(rows, args)
    return EXIT_UNDECIDED if _undecided_dominated(rows) else EXIT_OK


def _cmd_kgood(args) -> int:
    _log(f"seed={args.seed}")
    r = ex.kgood_rate(args.n, args.q, args.k, args.trials, args.seed, jig_system_of_kind(args.q, args.iota))
    doc = {"seed": args.seed, "n": args.n, "q": args.q, "k": args.k, "trials": r.trials,
           "rate": r.rate, "wilson_ci": list(r.ci)}
    _emit(json.dumps(doc) + "\n", args.out)
    return EXIT_OK


def _cmd_feas(args) -> int:
    _log(f"seed={args.seed}")
    n = args.n
    p1, p2 = args.swap or ((1, 1), (n - 2, n - 2))
    a = Assembly.planted(n).swapped(p1, p2)
    r = ex.feasibility_mc(a, n, jig_system_of_kind(args.q, args.iota), args.trials, args.seed)
    doc = {"seed": args.seed, "swap": [list(p1), list(p2)], "trials": r.trials, "hits": r.hits,
           "empirical": r.empirical, "exact": r.exact, "sigma": r.sigma, "z": r.z}
    _emit(json.dumps(doc) + "\n", args.out)
    return EXIT_OK


def _cmd_subgraphs(args) -> int:
    t = comb.enumerate_lattice_subgraphs(args.max_e)
    holds = t.bound_holds()
    rows = [(E, F, c, comb.subgraph_count_bound(E, F), holds[(E, F)]) for (E, F), c in t.counts.items()]
    if args.format == "csv":
        text = "E,F,count,bound,bound_holds\n" + "".join(f"{E},{F},{c},{b},{h}\n" for E, F, c, b, h in rows)
    else:
        text = json.dumps([dict(E=E, F=F, count=c, bound=b, bound_holds=h) for E, F, c, b, h in rows]) + "\n"
    _emit(text, args.out)
    return EXIT_OK if all(holds.values()) else EXIT_RUNTIME


BOUNDS_COLUMNS = (
    "n", "q", "piece_types", "boxes", "uea_bound", "uea_bound_log10",
    "expected_y", "expected_x", "expected_solutions_log10", "dup_zero_bound",
)


def _bounds_row(n: int, q: int, kind: str) -> dict:
    f = jig_system_of_kind(q, kind).num_self_fitting
    ey, exx = comb.expected_piece_stats(n, q, f)
    bound = comb.uea_probability_bound(n, q)
    return {
        "n": n,
        "q": q,
        "piece_types": comb.count_piece_types(q),
        "boxes": str(comb.count_boxes(n, q)),
        "uea_bound": str(bound.value),
        "uea_bound_log10": bound.log10,
        "expected_y": str(ey),
        "expected_x": str(exx),
        "expected_solutions_log10": comb.expected_solutions_heuristic(n, q),
        "dup_zero_bound": comb.dup_zero_bound(n, q) if n >= 2 else "",
    }


def _cmd_bounds(args) -> int:
    rows = [_bounds_row(n, q, args.iota) for n in args.n for q in args.q]
    if args.format == "json":
        text = json.dumps(rows) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(BOUNDS_COLUMNS)
        for r in rows:
            writer.writerow([rio.format_cell(r[c]) for c in BOUNDS_COLUMNS])
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "classify": _cmd_classify,
    "trials": _cmd_trials,
    "sweep": _cmd_sweep,
    "kgood": _cmd_kgood,
    "feas-mc": _cmd_feas,
    "subgraphs": _cmd_subgraphs,
    "bounds": _cmd_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=_sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    except (ValueError, OSError, rio.PuzzleFormatError) as exc:
        print(f"randjig: error: {exc}", file=_sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
