"""Command line: ``twcount count|verify|selftest|bench``.

Exit codes: 0 ok, 1 mismatch or failed property, 2 bad input, 3 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import hamiltonian, steiner
from .bench import bench_rows
from .dpcore import HAM_BAG_CAP, STEINER_BAG_CAP, CapacityError
from .instance import FormatError, make_nice, parse_graph, parse_td, parse_terminals, random_instance, validate_td
from .oracle import TooLarge

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_CAPACITY = 0, 1, 2, 3

log = logging.getLogger("twcount")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _load(args, need_terminals: bool):
    if not args.graph or not args.td:
        raise InputError("--graph and --td are required")
    if need_terminals and not args.terminals:
        raise InputError("--terminals is required for steiner")
    g = parse_graph(_read(args.graph))
    td = parse_td(_read(args.td), g)
    report = validate_td(td, g)
    if not report.ok:
        raise InputError(f"invalid tree decomposition: {report.violation} (witness {report.witness})")
    K = parse_terminals(_read(args.terminals), g) if need_terminals else frozenset()
    return g, make_nice(td, g), K


def _modulus(args) -> int | None:
    if args.mod is None:
        return None
    if args.mod < 2:
        raise InputError("--mod must be at least 2")
    return args.mod


def cmd_count(args) -> int:
    steiner_mode = args.problem == "steiner"
    g, nd, K = _load(args, steiner_mode)
    mod = _modulus(args)
    if steiner_mode:
        counts = steiner.count_steiner(g, K, nd, args.join, modulus=mod)
        if args.json:
            print(json.dumps({"sizes": {str(i): str(c) for i, c in enumerate(counts) if c}}))
        else:
            for i, c in enumerate(counts):
                if c:
                    print(f"{i} {c}")
    else:
        c = hamiltonian.count_hamiltonian(g, nd, args.join, modulus=mod)
        print(json.dumps({"count": str(c)}) if args.json else c)
    return EXIT_OK


def _verify_cases(args):
    """Yield ``(label, graph, nice decomposition, terminals)``."""
    if args.random:
        try:
            n, tw, seed = (int(x) for x in args.random.split(","))
        except ValueError as exc:
            raise InputError("--random expects n,tw,seed") from exc
        for t in range(args.trials):
            g, td = random_instance(n, tw, seed + t)
            rng = random.Random(seed + t)
            K = frozenset(rng.sample(range(1, n + 1), rng.randint(1, n)))
            yield f"random {n},{tw},{seed + t}", g, make_nice(td, g), K
    else:
        g, nd, K = _load(args, args.problem == "steiner")
        yield args.graph, g, nd, K


def cmd_verify(args) -> int:
    from . import verify

    def fault():
        # a fresh one-shot fault per check so every check sees it
        if args.corrupt_node is None:
            return None
        return verify.corrupt_node(args.corrupt_node if args.corrupt_node >= 0 else None)

    failures = 0
    for label, g, nd, K in _verify_cases(args):
        if args.problem == "hamiltonian" and g.n < 3:
            continue
        found = []
        if args.per_node:
            if args.problem == "steiner":
                found += verify.per_node_steiner(g, K, nd, modes=("naive",), corrupt=fault())
                found += verify.per_node_steiner(g, K, nd, modes=("fast",), corrupt=fault())
            else:
                found += verify.per_node_hamiltonian(g, nd, modes=("naive",), corrupt=fault())
                found += verify.per_node_hamiltonian(g, nd, modes=("fast",), corrupt=fault())
        found += verify.check_counts(args.problem, g, nd, K, modes=("naive",), corrupt=fault())
        found += verify.check_counts(args.problem, g, nd, K, modes=("fast",), corrupt=fault())
        for m in found:
            print(f"MISMATCH {label}: {m.describe()}")
        failures += bool(found)
    print("ok" if not failures else f"{failures} instance(s) with mismatches")
    return EXIT_MISMATCH if failures else EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(args.seed)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: {r.cases} cases in {r.seconds:.2f}s{' - ' + r.detail if r.detail else ''}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def _bags(spec: str, cap: int) -> list[int]:
    try:
        if "-" in spec:
            lo, hi = (int(x) for x in spec.split("-"))
            bags = list(range(lo, hi + 1))
        else:
            bags = [int(spec)]
    except ValueError as exc:
        raise InputError("--bag expects k or lo-hi") from exc
    if not bags or min(bags) < 0:
        raise InputError("--bag needs non-negative sizes")
    if max(bags) > cap:
        raise CapacityError(f"bag size {max(bags)} exceeds cap {cap}")
    return bags


def cmd_bench(args) -> int:
    from .report import rows_to_csv, write_report

    cap = STEINER_BAG_CAP if args.problem == "steiner" else HAM_BAG_CAP
    bags = _bags(args.bag, cap)
    rows = bench_rows(args.problem, bags, args.seed, args.repeats)
    sys.stdout.write(rows_to_csv(rows))
    if args.report:
        csv_path, png_path = write_report(rows, args.report, args.problem)
        log.info("wrote %s and %s", csv_path, png_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twcount", description="Exact counting on tree decompositions.")
    p.add_argument("--threads", type=int, default=1, help="cap on BLAS worker threads (default 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    def instance_flags(q):
        q.add_argument("--graph")
        q.add_argument("--td")
        q.add_argument("--terminals")

    c = sub.add_parser("count", help="count Steiner trees per size or Hamiltonian cycles")
    c.add_argument("problem", choices=("steiner", "hamiltonian"))
    instance_flags(c)
    c.add_argument("--join", choices=("fast", "naive"), default="fast")
    c.add_argument("--mod", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_count)

    v = sub.add_parser("verify", help="fast vs naive vs brute force, optionally per node")
    v.add_argument("--problem", choices=("steiner", "hamiltonian"), required=True)
    instance_flags(v)
    v.add_argument("--random", metavar="N,TW,SEED")
    v.add_argument("--trials", type=int, default=1)
    v.add_argument("--per-node", action="store_true")
    v.add_argument("--corrupt-node", type=int, metavar="NODE", help=argparse.SUPPRESS)  # test hook; -1 = first nonzero table
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("selftest", help="algebra property checks")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_selftest)

    b = sub.add_parser("bench", help="time naive vs fast joins on random tables")
    b.add_argument("--bag", required=True, help="bag size k or range lo-hi")
    b.add_argument("--problem", choices=("steiner", "hamiltonian"), default="steiner")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--repeats", type=int, default=1)
    b.add_argument("--report", metavar="DIR", help="also write CSV and PNG figure into DIR")
    b.set_defaults(fn=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
    try:
        with threadpool_limits(limits=max(args.threads, 1)):
            return args.fn(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (InputError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
