"""Benchmark and example programs: binary codes, bin packing, CNF satisfiability."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .program import (
    BasicRule,
    ChoiceRule,
    ConstraintRule,
    Literal,
    LiteralSet,
    Program,
    ProgramError,
    WeightRule,
)

MAX_WORD_BITS = 16


@dataclass(frozen=True)
class HammingSpec:
    n: int
    d: int
    m: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_WORD_BITS:
            raise ProgramError(f"word length must be in 1..{MAX_WORD_BITS}, got {self.n}")
        if not 1 <= self.d <= self.n:
            raise ProgramError(f"distance must be in 1..n, got {self.d}")
        if self.m < 1:
            raise ProgramError(f"code size must be at least 1, got {self.m}")


@dataclass(frozen=True)
class CnfFormula:
    """Clauses are lists of (variable name, polarity) pairs."""

    variables: tuple[str, ...]
    clauses: tuple[tuple[tuple[str, bool], ...], ...] = ()

    def __post_init__(self):
        known = set(self.variables)
        for clause in self.clauses:
            if not clause:
                raise ProgramError("empty clause")
            for var, _ in clause:
                if var not in known:
                    raise ProgramError(f"clause uses undeclared variable {var!r}")


@dataclass(frozen=True)
class KnapsackSpec:
    weights: tuple[int, ...]
    values: tuple[int, ...]
    max_weight: int
    min_value: int

    def __post_init__(self):
        if len(self.weights) != len(self.values):
            raise ProgramError("weights and values differ in length")
        if any(x < 0 for x in (*self.weights, *self.values, self.max_weight, self.min_value)):
            raise ProgramError("knapsack numbers must be nonnegative")


def word_atom(i: int) -> str:
    return f"w{i}"


def gen_hamming(spec: HammingSpec) -> tuple[Program, LiteralSet]:
    """Codes of length n, distance d, at least m words, containing the zero word.

    Atom ``w<i>`` holds when word i is in the code. Every stable model with
    ``true`` and without ``false`` is such a code.
    """
    n, d, m = spec.n, spec.d, spec.m
    words = 1 << n
    atoms = [word_atom(i) for i in range(words)] + ["true", "false"]
    true, false = words, words + 1
    rules = []
    for i in range(words):
        body = [Literal(j, False) for j in range(words) if 0 < bin(i ^ j).count("1") < d]
        rules.append(BasicRule(i, tuple(body)))
    rules.append(ConstraintRule(true, tuple(Literal(i, True) for i in range(words)), m))
    rules.append(BasicRule(false, (Literal(0, False),)))
    assumptions = (Literal(true, True), Literal(false, False))
    program = Program(tuple(atoms), tuple(rules), assumptions)
    return program, LiteralSet(assumptions)


def decode_code(program: Program, model: Iterable[int]) -> list[int]:
    words = []
    for a in model:
        name = program.atoms[a]
        if re.fullmatch(r"w\d+", name):
            words.append(int(name[1:]))
    return sorted(words)


def verify_code(words: Sequence[int], n: int, d: int) -> bool:
    for w in words:
        if not 0 <= w < 1 << n:
            raise ValueError(f"word {w} does not fit in {n} bits")
    ws = list(words)
    return all(bin(ws[i] ^ ws[j]).count("1") >= d for i in range(len(ws)) for j in range(i + 1, len(ws)))


def gen_sat(f: CnfFormula) -> tuple[Program, LiteralSet]:
    """Choice over the variables plus ``false :- <clause negated>`` per clause."""
    atoms = list(f.variables)
    index = {v: i for i, v in enumerate(atoms)}
    false = len(atoms)
    atoms.append("false")
    rules = []
    if f.variables:
        rules.append(ChoiceRule(tuple(range(len(f.variables))), ()))
    for clause in f.clauses:
        rules.append(BasicRule(false, tuple(Literal(index[v], not sign) for v, sign in clause)))
    assumptions = (Literal(false, False),)
    return Program(tuple(atoms), tuple(rules), assumptions), LiteralSet(assumptions)


def parse_dimacs(text: str) -> CnfFormula:
    """DIMACS CNF to a formula over variables ``x1 .. xN``."""
    nvars = 0
    clauses, current = [], []
    for line in text.splitlines():
        line = line.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            nvars = int(parts[2])
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                if current:
                    clauses.append(tuple(current))
                current = []
            else:
                nvars = max(nvars, abs(v))
                current.append((f"x{abs(v)}", v > 0))
    if current:
        clauses.append(tuple(current))
    return CnfFormula(tuple(f"x{i}" for i in range(1, nvars + 1)), tuple(clauses))


def example_formula() -> CnfFormula:
    """(a | b | -c) & (-a | b | -d) & (-b | c | d)."""
    return CnfFormula(
        ("a", "b", "c", "d"),
        (
            (("a", True), ("b", True), ("c", False)),
            (("a", False), ("b", True), ("d", False)),
            (("b", False), ("c", True), ("d", True)),
        ),
    )


def gen_knapsack(spec: KnapsackSpec) -> tuple[Program, LiteralSet]:
    """Subsets with total weight below ``max_weight`` and total value at least ``min_value``."""
    k = len(spec.weights)
    atoms = [f"a{i + 1}" for i in range(k)] + ["false", "true"]
    false, true = k, k + 1
    items = tuple(range(k))
    rules = []
    if k:
        rules.append(ChoiceRule(items, ()))
    rules.append(WeightRule(false, tuple((Literal(i), spec.weights[i]) for i in items), spec.max_weight))
    rules.append(WeightRule(true, tuple((Literal(i), spec.values[i]) for i in items), spec.min_value))
    assumptions = (Literal(true, True), Literal(false, False))
    return Program(tuple(atoms), tuple(rules), assumptions), LiteralSet(assumptions)


def shuffled(program: Program, rng) -> Program:
    """Same program with atoms renumbered and rules reordered at random."""
    n = program.num_atoms
    perm = list(range(n))
    rng.shuffle(perm)
    atoms = [None] * n
    for old, new in enumerate(perm):
        atoms[new] = program.atoms[old]

    def lit(l: Literal) -> Literal:
        return Literal(perm[l.atom], l.positive)

    rules = []
    for r in program.rules:
        if isinstance(r, BasicRule):
            rules.append(BasicRule(perm[r.head], tuple(lit(l) for l in r.body)))
        elif isinstance(r, ConstraintRule):
            rules.append(ConstraintRule(perm[r.head], tuple(lit(l) for l in r.body), r.bound))
        elif isinstance(r, ChoiceRule):
            rules.append(ChoiceRule(tuple(perm[h] for h in r.heads), tuple(lit(l) for l in r.body)))
        else:
            rules.append(WeightRule(perm[r.head], tuple((lit(l), w) for l, w in r.body), r.bound))
    rng.shuffle(rules)
    return Program(tuple(atoms), tuple(rules), tuple(lit(l) for l in program.assumptions))
