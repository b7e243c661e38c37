"""Command-line front end: ``symtsp gen|solve|oracle|verify|trace``."""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import EXAMPLE4_START_TOUR, _backend, fixture_names, load_fixture
from .fwcycles import harvest_cycles
from .instance import InstanceError, dump_matrix, load_matrix, neighbor_rank, random_matrix
from .oracle import (OracleLimit, brute_min_derangement, brute_min_pm, brute_tsp,
                     enumerate_acceptable_cycles)
from .patcher import SolveConfig, solve
from .permutation import Permutation, Tour, compose, derangement_value, pm_from_tour, tour_value
from .phase1 import TrialState, initial_derangement, phase1_run, run_trial, trial_count
from .reduced import build_reduced, format_table


class CliError(Exception):
    pass


def _read_instance(path: str):
    if path.startswith("fixture:"):
        return load_fixture(path.split(":", 1)[1])
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None
    return load_matrix(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)


class _Tracer:
    """Writes JSON-lines events; ``summary`` keeps only phase and round events."""

    def __init__(self, level: str, out):
        self.level = level
        self.out = out

    def __call__(self, event: dict):
        if self.level == "none":
            return
        if self.level == "summary" and event.get("event") not in ("phase", "round"):
            return
        self.out.write(_dumps(event) + "\n")


# -- subcommands ----------------------------------------------------------------

def cmd_gen(args, out):
    if args.n < 2:
        raise CliError("n must be at least 2")
    if args.max_cost < 1:
        raise CliError("--max-cost must be at least 1")
    rng = np.random.default_rng(args.seed)
    m = random_matrix(args.n, rng, args.max_cost)
    text = dump_matrix(m, f"random symmetric instance n={args.n} seed={args.seed} max-cost={args.max_cost}")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_solve(args, out):
    if args.threads < 1:
        raise CliError("--threads must be at least 1")
    m = _read_instance(args.file)
    config = SolveConfig(passes=args.passes, node_limit=args.node_limit, deep=args.deep_2circuit)
    trace_out = open(args.trace_file, "w") if args.trace_file else sys.stderr
    try:
        tracer = _Tracer(args.trace_level, trace_out)
        _, report = solve(m, config, tracer if args.trace_level != "none" else None)
    finally:
        if args.trace_file:
            trace_out.close()
    out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_oracle(args, out):
    m = _read_instance(args.file)
    if args.which == "tsp":
        res = brute_tsp(m)
        body = {"value": res.value, "witness": list(res.witness.order)}
    elif args.which == "pm":
        res = brute_min_pm(m)
        body = {"value": res.value, "witness": str(res.witness)}
    elif args.which == "derangement":
        res = brute_min_derangement(m)
        body = {"value": res.value, "witness": str(res.witness)}
    else:
        pm = brute_min_pm(m).witness if args.pm is None else Permutation.parse(m.n, args.pm)
        r = build_reduced(m, pm)
        cycles = enumerate_acceptable_cycles(r, pm, args.bound)
        body = {"pm": str(pm), "cycles": [{"cycle": list(c.vertices), "value": c.value}
                                          for c in cycles]}
        res = None
    body["oracle"] = args.which
    if res is not None:
        body["method"] = res.method
    out.write(_dumps(body) + "\n")
    return 0


def _verify_example4():
    m = load_fixture("example4")
    t1 = Tour(EXAMPLE4_START_TOUR)
    sigma, pmv = pm_from_tour(t1, m)
    checks = [("matching from the start tour has value 56", pmv == 56, pmv),
              ("start tour has value 68", tour_value(t1, m) == 68, tour_value(t1, m))]
    r = build_reduced(m, sigma)
    h = harvest_cycles(r, sigma, tour_value(t1, m) - pmv - 1)
    found = {c.vertices: c.value for c in h.cycles}
    for cyc, value in (((5, 9, 20, 16, 7, 10, 17), -12), ((2, 11, 12, 3, 18, 10, 17, 6, 4, 8, 15), -11)):
        got = found.get(cyc)
        checks.append((f"harvest holds ({' '.join(map(str, cyc))}) at {value}", got == value, got))
    started = time.perf_counter()
    tour, report = solve(m)
    elapsed = time.perf_counter() - started
    checks.append(("solve reaches a tour of value <= 54", report["tour_value"] <= 54, report["tour_value"]))
    dv = report["best_derangement"]["value"]
    checks.append(("solve surfaces a derangement of value <= 53", dv <= 53, dv))
    checks.append(("solve finishes within 10 s", elapsed < 10, round(elapsed, 2)))
    return checks


def _verify_example3():
    m = load_fixture("example3")
    nr = neighbor_rank(m)
    d0 = initial_derangement(m.n)
    res = run_trial(TrialState(d0, 15, 2, trial_count(m.n)), m, nr)
    want = (15, 18, 2, 8, 5, 17, 10, 16, 7, 20, 14)
    checks = [("trial from 15 with t=2 closes the expected cycle", res is not None and res.cycle == want,
               res and list(res.cycle))]
    if res is not None:
        applied = derangement_value(compose(d0, Permutation.from_cycles(m.n, [res.cycle])), m)
        # the trial value must be what applying the cycle actually saves
        checks.append(("trial value equals the change in derangement value",
                       applied - derangement_value(d0, m) == res.value, res.value))
    started = time.perf_counter()
    d = phase1_run(m, nr)
    elapsed = time.perf_counter() - started
    dv = derangement_value(d, m)
    checks.append(("phase 1 ends at value <= 157", dv <= 157, dv))
    checks.append(("phase 1 finishes within 5 s", elapsed < 5, round(elapsed, 2)))
    tour, report = solve(m)
    checks.append(("solve returns a valid tour", sorted(tour.order) == list(range(1, m.n + 1))
                   and tour_value(tour, m) == report["tour_value"], report["tour_value"]))
    return checks


VERIFIERS = {"example3": _verify_example3, "example4": _verify_example4}


def cmd_verify(args, out):
    if args.name not in VERIFIERS:
        raise CliError(f"no checks for {args.name!r}; choose from {', '.join(sorted(VERIFIERS))}")
    checks = VERIFIERS[args.name]()
    for label, ok, got in checks:
        out.write(f"{'PASS' if ok else 'FAIL'}  {label}  (got {got})\n")
    return 0 if all(ok for _, ok, _ in checks) else 1


def cmd_trace(args, out):
    m = _read_instance(args.file)
    emit = lambda e: out.write(_dumps(e) + "\n")
    if args.table is not None:
        tour = Tour([int(x) for x in args.table.split()])
        sigma, _ = pm_from_tour(tour, m)
        out.write(format_table(build_reduced(m, sigma)) + "\n")
        return 0
    nr = neighbor_rank(m)
    if args.vertex is not None:
        d0 = initial_derangement(m.n)
        width = trial_count(m.n)
        trials = [args.trial] if args.trial else range(1, width + 1)
        for t in trials:
            run_trial(TrialState(d0, args.vertex, t, width), m, nr, emit)
        return 0
    history = []
    d = phase1_run(m, nr, trace=emit, history=history)
    emit({"phase": 1, "decision": "done", "derangement": str(d), "value": derangement_value(d, m)})
    return 0


# -- entry point ------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="symtsp", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s (kernels: {_backend.NAME})")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random symmetric instance")
    g.add_argument("n", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--max-cost", type=int, default=99)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run the full heuristic and print a JSON report")
    s.add_argument("file", help="instance path, or fixture:<name>")
    s.add_argument("--seed", type=int, default=0, help="accepted for reproducibility; the solver is deterministic")
    s.add_argument("--passes", type=int, default=8)
    s.add_argument("--node-limit", type=int, default=1_000_000)
    s.add_argument("--deep-2circuit", action="store_true", help="keep more paths per class in the harvest")
    s.add_argument("--trace-level", choices=("none", "summary", "full"), default="none")
    s.add_argument("--trace-file", help="write trace JSON lines here instead of stderr")
    s.add_argument("--threads", type=int, default=1)
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exact answers for small instances")
    o.add_argument("file")
    o.add_argument("--which", choices=("tsp", "pm", "derangement", "cycles"), default="tsp")
    o.add_argument("--pm", help="matching in cycle notation for --which cycles (default: the cheapest)")
    o.add_argument("--bound", type=int, default=None)
    o.set_defaults(func=cmd_oracle)

    v = sub.add_parser("verify", help="run the pinned checks on a bundled fixture")
    v.add_argument("name", help=f"one of: {', '.join(fixture_names())}")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("trace", help="JSON-lines trace of phase 1, or a reduced-matrix table")
    t.add_argument("file")
    t.add_argument("--vertex", type=int, help="trace only the trials from this vertex on the cyclic shift")
    t.add_argument("--trial", type=int, help="with --vertex: a single trial number")
    t.add_argument("--table", metavar="TOUR", help="print the reduced matrix on the matching taken from TOUR")
    t.set_defaults(func=cmd_trace)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (CliError, InstanceError, OracleLimit, ValueError) as e:
        sys.stderr.write(f"symtsp {args.command}: error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
