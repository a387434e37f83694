"""Command line interface: ``seqbap {gen,solve,bench,simulate,verify}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bench
from .baselines import solve_lexbap_exact, solve_naive_greedy
from .bottleneck import solve_bap
from .engine import solve_seqbap
from .errors import DisconnectedTopology, InvalidInstance, SeqbapError
from .graph import WeightTuple, format_instance, read_instance, write_instance

EXIT_OK, EXIT_SOLVER, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2, 3


def _parse_seeds(text: str) -> range:
    """``"200"`` means seeds 0..199, ``"10:20"`` means 10..19."""
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return range(int(lo), int(hi))
        return range(int(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A:B, got {text!r}") from None


def _parse_n_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return values


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gen(args) -> int:
    g = bench.generate_instance(args.n, args.seed).graph
    if args.out in (None, "-"):
        sys.stdout.write(format_instance(g))
    else:
        write_instance(g, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    g = read_instance(args.input)
    if args.algo == "seqbap":
        result = solve_seqbap(g)
        payload = result.to_dict(g)
    else:
        if args.algo == "bap":
            cert = solve_bap(g)
            matching = cert.matching
            extra = {"bottleneck_weight": cert.bottleneck_weight, "bottleneck_edge": list(cert.bottleneck_edge)}
        elif args.algo == "lexbap":
            matching, extra = solve_lexbap_exact(g), {"exact": True}
        else:
            matching, extra = solve_naive_greedy(g), {}
        payload = {
            "matching": [list(e) for e in sorted(matching)],
            "weight_tuple": list(WeightTuple.of(g, matching)),
            **extra,
        }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for a, t in payload["matching"]:
            print(f"A{a} -> T{t}  {g.weight((a, t))!r}")
        if "exact" in payload:
            print(f"exact: {str(payload['exact']).lower()}")
    return EXIT_OK


def cmd_bench(args) -> int:
    records = bench.run_benchmark(args.n_list, args.reps, args.algorithms, seed=args.seed, workers=args.workers)
    _write(bench.records_to_csv(records), args.out)
    summary = bench.summarize(records)
    sys.stderr.write(bench.summary_to_csv(summary))
    if args.svg:
        bench.write_svg_plot(summary, args.svg)
    return EXIT_OK


def cmd_simulate(args) -> int:
    report = bench.run_simulation_campaign(args.n, args.seed, args.radius)
    (_, trace1), (res_d, trace_d) = report.complete, report.radius
    print(f"diameter: {report.comm.diameter}")
    print(f"clock steps (complete graph): {trace1.clock_steps}")
    print(f"clock steps (radius {args.radius}): {trace_d.clock_steps}")
    print(f"ratio: {report.step_ratio:g}")
    print(f"matches centralised: {str(report.matches_centralised).lower()}")
    print(f"exact: {str(res_d.exact).lower()}")
    if args.trace:
        _write(trace_d.to_csv(), args.trace)
    return EXIT_OK if report.matches_centralised else EXIT_SOLVER


def cmd_verify(args) -> int:
    report = bench.verify(args.seeds, args.n_max)
    for check, count in sorted(report.checked.items()):
        print(f"{check}: {count} instances")
    if report.ok:
        print("all checks passed")
        return EXIT_OK
    first = report.violations[0]
    print(f"FAILED {first.check} at seed {first.seed}: {first.detail}")
    print(first.instance, end="")
    print(f"{len(report.violations)} violation(s) in total")
    return EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqbap", description="Bottleneck, lexicographic and sequential assignment")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a uniform random Euclidean instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("--in", dest="input", required=True, help="instance CSV (agent,task,weight)")
    p.add_argument("--algo", choices=["bap", "seqbap", "lexbap", "naive"], default="seqbap")
    p.add_argument("--json", action="store_true", help="print a JSON document")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="time the solvers on random instances")
    p.add_argument("--n-list", type=_parse_n_list, default=[50, 100, 200])
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--algorithms", nargs="+", choices=bench.ALGORITHMS, default=list(bench.ALGORITHMS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="per-record CSV (default: stdout)")
    p.add_argument("--svg", help="also write a log-log chart of median runtimes")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("simulate", help="run the distributed solver on a random instance")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=30.0)
    p.add_argument("--trace", help="write the flood trace of the radius run as CSV")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check solver properties against exhaustive oracles")
    p.add_argument("--n-max", type=int, default=5)
    p.add_argument("--seeds", type=_parse_seeds, default=range(200))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInstance, DisconnectedTopology, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SeqbapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
