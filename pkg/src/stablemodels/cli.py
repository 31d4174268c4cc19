"""Command line front end.

Exit status: 10 when a model exists (or every checked model is stable),
20 when none does, 1 on errors.
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO

from .generators import (
    HammingSpec,
    KnapsackSpec,
    decode_code,
    gen_hamming,
    gen_knapsack,
    gen_sat,
    parse_dimacs,
    shuffled,
    verify_code,
)
from .oracle import enumerate_stable_brute, is_stable
from .parser import ParseError, parse_program, serialize_program
from .program import Literal, Program, ProgramError, agrees, LiteralSet
from .search import Solver

SAT, UNSAT, ERROR = 10, 20, 1


@dataclass
class RunConfig:
    mode: str = "solve"
    path: Optional[str] = None
    limit: Optional[int] = 1
    assumptions: list[str] = field(default_factory=list)
    lookahead: bool = True
    seed: Optional[int] = None
    stats: bool = False


class UsageError(Exception):
    pass


def _read(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _assumptions(program: Program, names: Sequence[str]) -> list[Literal]:
    lits = list(program.assumptions)
    for name in names:
        positive = not name.startswith("-")
        atom = name[1:] if not positive else name
        if not program.has_atom(atom):
            raise UsageError(f"unknown assumption atom {atom!r}")
        lits.append(Literal(program.atom(atom), positive))
    return lits


def format_model(program: Program, model) -> str:
    return " ".join(program.names(model))


def run(config: RunConfig, out: TextIO = sys.stdout) -> int:
    program = parse_program(_read(config.path))
    lits = _assumptions(program, config.assumptions)
    if config.mode == "oracle":
        assumed = LiteralSet(lits)
        models = [m for m in enumerate_stable_brute(program) if agrees(m, assumed)]
        if config.limit is not None:
            models = models[: config.limit]
        for m in models:
            print(format_model(program, m), file=out)
        if not models:
            print("UNSATISFIABLE", file=out)
        return SAT if models else UNSAT
    limit = None if config.mode == "enumerate" else config.limit
    solver = Solver(program, lookahead=config.lookahead, seed=config.seed)
    found = 0
    for model in solver.models(lits, limit=limit):
        found += 1
        print(format_model(program, model), file=out, flush=True)
    if not found:
        print("UNSATISFIABLE", file=out)
    if config.stats:
        print(solver.stats.line(), file=out)
    return SAT if found else UNSAT


def check_models(program: Program, lines: Sequence[str], out: TextIO) -> int:
    ok = True
    for line in lines:
        line = line.strip()
        if not line or line.startswith("c ") or line == "UNSATISFIABLE":
            continue
        model = {program.atom(name) for name in line.split()}
        stable = is_stable(program, model)
        ok &= stable
        print(("STABLE " if stable else "NOT STABLE ") + line, file=out)
    return SAT if ok else UNSAT


@dataclass
class BenchRow:
    label: str
    verdicts: list[bool]
    times: list[float]

    def format(self) -> str:
        verdict = "SAT" if all(self.verdicts) else "UNSAT" if not any(self.verdicts) else "MIXED"
        return (
            f"{self.label:<14} {verdict:<5} runs={len(self.times)} "
            f"min={min(self.times):.3f} max={max(self.times):.3f} avg={statistics.mean(self.times):.3f}"
        )


def bench_hamming(n: int, d: int, m: int, runs: int = 10, seed: int = 0) -> BenchRow:
    """Solve ``runs`` randomly shuffled copies of the code program and time each."""
    base, _ = gen_hamming(HammingSpec(n, d, m))
    rng = random.Random(seed)
    verdicts, times = [], []
    for _ in range(runs):
        program = shuffled(base, rng)
        solver = Solver(program)
        start = time.perf_counter()
        model = solver.solve(program.assumptions)
        times.append(time.perf_counter() - start)
        if model is not None:
            words = decode_code(program, model)
            if not (verify_code(words, n, d) and len(words) >= m and 0 in words):
                raise AssertionError(f"invalid code {words}")
        verdicts.append(model is not None)
    label = f"A({n},{d})>={m}" if all(verdicts) else f"A({n},{d})<{m}"
    return BenchRow(label, verdicts, times)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stablemodels", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def solving(sp):
        sp.add_argument("file", nargs="?", default="-")
        sp.add_argument("--assume", action="append", default=[], metavar="[-]ATOM",
                        help="assume ATOM true, or false with a leading '-'")
        sp.add_argument("--no-lookahead", action="store_true")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--stats", action="store_true")

    s = sub.add_parser("solve", help="print stable models (first one by default)")
    solving(s)
    s.add_argument("-n", "--models", default="1", help="number of models, or 'all' / 0")
    e = sub.add_parser("enumerate", help="print every stable model")
    solving(e)
    o = sub.add_parser("oracle", help="enumerate stable models by brute force")
    o.add_argument("file", nargs="?", default="-")
    o.add_argument("--assume", action="append", default=[])

    c = sub.add_parser("check", help="test model lines (from --model or stdin) for stability")
    c.add_argument("file")
    c.add_argument("--model", action="append", help="space separated atom names")

    g = sub.add_parser("gen", help="write a generated program")
    gsub = g.add_subparsers(dest="family", required=True)
    h = gsub.add_parser("hamming")
    h.add_argument("n", type=int)
    h.add_argument("d", type=int)
    h.add_argument("m", type=int)
    sat = gsub.add_parser("sat")
    sat.add_argument("cnf", help="DIMACS file or '-'")
    k = gsub.add_parser("knapsack")
    k.add_argument("--weights", required=True, help="comma separated")
    k.add_argument("--values", required=True, help="comma separated")
    k.add_argument("--max-weight", type=int, required=True)
    k.add_argument("--min-value", type=int, required=True)

    b = sub.add_parser("bench", help="time shuffled code instances")
    b.add_argument("n", type=int)
    b.add_argument("d", type=int)
    b.add_argument("m", type=int)
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    return p


def _limit(text: str) -> Optional[int]:
    if text in ("all", "0"):
        return None
    value = int(text)
    if value < 1:
        raise UsageError("model limit must be >= 1 or 'all'")
    return value


def _join_assume(argv: Sequence[str]) -> list[str]:
    # "--assume -atom" would otherwise read "-atom" as an option
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--assume":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--assume={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = _parser().parse_args(_join_assume(argv))
    out = sys.stdout
    try:
        if args.command in ("solve", "enumerate"):
            config = RunConfig(
                mode=args.command,
                path=args.file,
                limit=_limit(args.models) if args.command == "solve" else None,
                assumptions=args.assume,
                lookahead=not args.no_lookahead,
                seed=args.seed,
                stats=args.stats,
            )
            return run(config, out)
        if args.command == "oracle":
            return run(RunConfig(mode="oracle", path=args.file, limit=None, assumptions=args.assume), out)
        if args.command == "check":
            program = parse_program(_read(args.file))
            lines = args.model if args.model else sys.stdin.read().splitlines()
            return check_models(program, lines, out)
        if args.command == "gen":
            if args.family == "hamming":
                program, _ = gen_hamming(HammingSpec(args.n, args.d, args.m))
            elif args.family == "sat":
                program, _ = gen_sat(parse_dimacs(_read(args.cnf)))
            else:
                ints = lambda s: tuple(int(x) for x in s.split(",") if x.strip())
                spec = KnapsackSpec(ints(args.weights), ints(args.values), args.max_weight, args.min_value)
                program, _ = gen_knapsack(spec)
            out.write(serialize_program(program))
            return 0
        if args.command == "bench":
            row = bench_hamming(args.n, args.d, args.m, args.runs, args.seed)
            print(row.format(), file=out)
            return SAT if all(row.verdicts) else UNSAT
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    except (UsageError, ProgramError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    return ERROR


if __name__ == "__main__":
    sys.exit(main())
