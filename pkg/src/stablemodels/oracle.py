"""Reference semantics: rule consequence functions, minimal closures and brute-force enumeration.

Deliberately naive. Everything here is a direct transcription of the
definitions and is used to check the solver.
"""

from __future__ import annotations

from typing import AbstractSet, Iterable

from .fixpoint import lfp
from .program import (
    BasicRule,
    ChoiceRule,
    ConstraintRule,
    Program,
    ProgramError,
    Rule,
    WeightRule,
)

ENUMERATION_GUARD = 24


def _body_holds(body, S: AbstractSet[int], C: AbstractSet[int]) -> bool:
    return all((lit.atom in C) if lit.positive else (lit.atom not in S) for lit in body)


def rule_consequences(r: Rule, S: AbstractSet[int], C: AbstractSet[int]) -> set[int]:
    """``f_r(S, C)``: positive body atoms are read in C, not-atoms against S."""
    if isinstance(r, BasicRule):
        return {r.head} if _body_holds(r.body, S, C) else set()
    if isinstance(r, ConstraintRule):
        count = sum(1 for lit in r.body if (lit.atom in C if lit.positive else lit.atom not in S))
        return {r.head} if count >= r.bound else set()
    if isinstance(r, ChoiceRule):
        if not _body_holds(r.body, S, C):
            return set()
        return {h for h in r.heads if h in S}
    if isinstance(r, WeightRule):
        total = sum(w for lit, w in r.body if (lit.atom in C if lit.positive else lit.atom not in S))
        return {r.head} if total >= r.bound else set()
    raise TypeError(f"not a rule: {r!r}")


def minimal_closure(P: Program, S: AbstractSet[int]) -> frozenset[int]:
    """``g_P(S)``: least fixed point of ``C -> union of f_r(S, C)``."""
    S = frozenset(S)
    rules = P.rules

    def step(C):
        out = set()
        for r in rules:
            out |= rule_consequences(r, S, C)
        return out

    return lfp(step, range(P.num_atoms))


def is_stable(P: Program, S: Iterable[int]) -> bool:
    S = frozenset(S)
    return minimal_closure(P, S) == S


def reduct(P: Program, S: AbstractSet[int]) -> list[tuple[int, tuple[int, ...]]]:
    """Gelfond-Lifschitz reduct of a basic program as (head, positive body) pairs."""
    out = []
    for r in P.rules:
        if not isinstance(r, BasicRule):
            raise ProgramError("the reduct is only defined here for basic rules")
        if any(not lit.positive and lit.atom in S for lit in r.body):
            continue
        out.append((r.head, tuple(lit.atom for lit in r.body if lit.positive)))
    return out


def deductive_closure(horn: list[tuple[int, tuple[int, ...]]]) -> set[int]:
    derived: set[int] = set()
    changed = True
    while changed:
        changed = False
        for head, body in horn:
            if head not in derived and all(b in derived for b in body):
                derived.add(head)
                changed = True
    return derived


def is_stable_reduct(P: Program, S: Iterable[int]) -> bool:
    """Stability through the reduct; basic programs only."""
    S = set(S)
    return deductive_closure(reduct(P, S)) == S


def enumerate_stable_brute(P: Program) -> list[frozenset[int]]:
    """Every stable model, by testing all subsets of the atoms.

    Subsets are visited as bitmasks with atom 0 as the least significant bit,
    so for atoms a, b the order is {}, {a}, {b}, {a, b}.
    """
    n = P.num_atoms
    if n > ENUMERATION_GUARD:
        raise ProgramError(f"{n} atoms exceed the enumeration guard of {ENUMERATION_GUARD}")
    models = []
    for mask in range(1 << n):
        S = frozenset(i for i in range(n) if mask >> i & 1)
        if is_stable(P, S):
            models.append(S)
    return models
