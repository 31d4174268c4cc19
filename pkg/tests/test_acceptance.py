"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed as they are produced and collected again in the pytest
terminal summary. Set STABLEMODELS_STRETCH=1 to also run the A(7,3) search.
"""

import os
import random
import time
from contextlib import contextmanager
from itertools import product

import pytest

from conftest import ACCEPTANCE_LINES
from randprog import random_assignment, random_chain, random_program
from stablemodels.generators import (
    HammingSpec,
    KnapsackSpec,
    decode_code,
    example_formula,
    gen_hamming,
    gen_knapsack,
    gen_sat,
    verify_code,
)
from stablemodels.oracle import enumerate_stable_brute, is_stable, rule_consequences
from stablemodels.parser import parse_program
from stablemodels.program import ConstraintRule, Literal, LiteralSet, WeightRule, agrees, expand_constraint_rule
from stablemodels.propagation import (
    PropagationState,
    atleast,
    atleast_reference,
    atmost,
    atmost_reference,
    expand,
)
from stablemodels.search import Solver, enumerate_models, smodels


@contextmanager
def criterion(label):
    """Run a block of checks; report PASS with timing or FAIL with the first error."""
    start = time.perf_counter()
    try:
        yield
    except AssertionError as exc:
        line = f"FAIL {label}: {str(exc).splitlines()[0] if str(exc) else 'assertion failed'}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        raise
    line = f"PASS {label} ({time.perf_counter() - start:.2f}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)


def _same(X, Y):
    return (X.conflict and Y.conflict) or (not X.conflict and not Y.conflict and X == Y)


def test_criterion_1_oracle_equivalence():
    with criterion("1 oracle equivalence: 500 programs, 150 assumption sets"):
        start = time.perf_counter()
        rng = random.Random(1)
        for i in range(500):
            P = random_program(rng, max_atoms=8, max_rules=12, min_atoms=4)
            got = enumerate_models(P)
            assert len(got) == len(set(got)), f"duplicate models in program {i}"
            assert sorted(got, key=sorted) == sorted(enumerate_stable_brute(P), key=sorted), f"program {i}: {P}"
        for i in range(150):
            P = random_program(rng, max_atoms=8, max_rules=12, min_atoms=4)
            A = random_assignment(rng, P.num_atoms, density=0.3)
            expected = any(agrees(S, A) for S in enumerate_stable_brute(P))
            ok, model = smodels(P, A)
            assert ok == expected, f"assumption set {i}: {P} {A}"
            assert not ok or (is_stable(P, model) and agrees(model, A))
        assert time.perf_counter() - start < 120, "runtime budget exceeded"


EXAMPLE = "a :- b.\nb :- a.\na :- not c.\na :- not d.\n"


def test_criterion_2_worked_atmost_example():
    with criterion("2 worked atmost example, scratch and incremental"):
        P = parse_program(EXAMPLE)
        ab = {P.atom("a"), P.atom("b")}
        d = P.literal("d")
        assert atmost_reference(P, LiteralSet()) == ab
        assert atmost_reference(P, LiteralSet([d])) == ab
        assert atmost(P, LiteralSet()) == ab and atmost(P, LiteralSet([d])) == ab
        for pointers in (True, False):
            state = PropagationState(P, source_pointers=pointers, initial_checks=False)
            assert state.atmost_incremental([]) == ab
            assert state.atmost_incremental([d.code]) == ab


def _hamming(n, d, m):
    P, A = gen_hamming(HammingSpec(n, d, m))
    start = time.perf_counter()
    ok, model = smodels(P, A)
    elapsed = time.perf_counter() - start
    return ok, (decode_code(P, model) if ok else None), elapsed


@pytest.mark.parametrize("n, d, m, sat", [(5, 3, 4, True), (5, 3, 5, False), (6, 3, 8, True), (6, 3, 9, False)])
def test_criterion_3_hamming_codes(n, d, m, sat):
    verdict = "SAT" if sat else "UNSAT"
    with criterion(f"3 code A({n},{d}) m={m} {verdict} under 10s"):
        ok, words, elapsed = _hamming(n, d, m)
        assert ok == sat, f"expected {verdict}"
        assert elapsed < 10, f"took {elapsed:.1f}s"
        if ok:
            assert len(words) >= m and 0 in words and verify_code(words, n, d), f"invalid code {words}"


@pytest.mark.skipif(not os.environ.get("STABLEMODELS_STRETCH"), reason="stretch goal, set STABLEMODELS_STRETCH=1")
def test_criterion_3_stretch_a73():
    with criterion("3 stretch A(7,3) m=16 SAT under 10min (not gating)"):
        ok, words, elapsed = _hamming(7, 3, 16)
        assert ok and verify_code(words, 7, 3) and len(words) >= 16
        assert elapsed < 600, f"took {elapsed:.1f}s"


def test_criterion_4_known_code_witness():
    with criterion("4 code {0,7,25,30} is a stable model"):
        P, A = gen_hamming(HammingSpec(5, 3, 4))
        model = {P.atom(f"w{i}") for i in (0, 7, 25, 30)} | {P.atom("true")}
        assert is_stable(P, model)
        assert agrees(model, A)


def test_criterion_5_propagation_equivalences():
    with criterion("5 counter atleast = reference (1200 pairs), incremental atmost = scratch (240 sequences)"):
        rng = random.Random(5)
        for i in range(1200):
            P = random_program(rng, max_atoms=8, max_rules=12, min_atoms=4)
            A = random_assignment(rng, P.num_atoms)
            assert _same(atleast(P, A), atleast_reference(P, A)), f"atleast pair {i}: {P} {A}"
        for i in range(240):
            P = random_program(rng, max_atoms=8, max_rules=12, min_atoms=4)
            state = PropagationState(P, source_pointers=i % 2 == 0, initial_checks=False)
            seen: set[int] = set()
            for A in random_chain(rng, P.num_atoms, steps=5):
                new = [c for c in A.codes() if c not in seen]
                seen |= set(new)
                assert state.atmost_incremental(new) == atmost_reference(P, A), f"sequence {i}: {P} {A}"


def test_criterion_6_monotonicity():
    with criterion("6 atleast monotone, atmost antimonotone, expand extensive and idempotent (500 chains)"):
        rng = random.Random(6)
        for i in range(500):
            P = random_program(rng, max_atoms=8, max_rules=12, min_atoms=4)
            A, B = random_chain(rng, P.num_atoms, steps=2)
            LA, LB = atleast(P, A), atleast(P, B)
            assert LB.conflict or (not LA.conflict and LA <= LB), f"atleast chain {i}"
            assert atmost(P, B) <= atmost(P, A), f"atmost chain {i}"
            E = expand(P, A)
            assert A <= E, f"expand not extensive {i}"
            assert E.conflict or expand(P, E) == E, f"expand not idempotent {i}"


def test_criterion_7_rewriting_equivalences():
    with criterion("7 constraint expansion keeps models; unit weights match constraint rules"):
        rng = random.Random(7)
        for i in range(200):
            P = random_program(rng, max_atoms=6, max_rules=6)
            n = P.num_atoms
            body = tuple(Literal(rng.randrange(n), rng.random() < 0.5) for _ in range(rng.randint(0, 6)))
            r = ConstraintRule(rng.randrange(n), body, rng.randint(0, len(set(body)) + 1))
            lhs = enumerate_stable_brute(P.with_rules(P.rules + (r,)))
            rhs = enumerate_stable_brute(P.with_rules(P.rules + tuple(expand_constraint_rule(r))))
            assert lhs == rhs, f"expansion {i}: {r}"
        for size in range(6):
            for _ in range(4):
                body = tuple({Literal(rng.randrange(5), rng.random() < 0.5) for _ in range(size)})
                k = rng.randint(0, len(body) + 1)
                cr = ConstraintRule(5, body, k)
                wr = WeightRule(5, tuple((lit, 1) for lit in body), k)
                for sbits, cbits in product(range(64), repeat=2):
                    S = {x for x in range(6) if sbits >> x & 1}
                    C = {x for x in range(6) if cbits >> x & 1}
                    assert rule_consequences(cr, S, C) == rule_consequences(wr, S, C), f"{cr} at {S} {C}"


def test_criterion_8_example_programs():
    with criterion("8 formula program has 10 models; knapsack packs {a1} and {a2}"):
        P, A = gen_sat(example_formula())
        models = enumerate_models(P, A)
        truth = sum(
            1
            for a, b, c, d in product((False, True), repeat=4)
            if (a or b or not c) and (not a or b or not d) and (not b or c or d)
        )
        assert len(models) == truth == 10
        assert sorted(models, key=sorted) == sorted((m for m in enumerate_stable_brute(P) if agrees(m, A)), key=sorted)
        K, B = gen_knapsack(KnapsackSpec((2, 3), (3, 4), 4, 3))
        packs = sorted(sorted(set(K.names(m)) - {"true"}) for m in enumerate_models(K, B))
        assert packs == [["a1"], ["a2"]]


def test_criterion_9_search_hygiene():
    with criterion("9 lookahead on/off agree (300 programs); heuristic choices maximal"):
        rng = random.Random(9)
        calls = 0
        for i in range(300):
            P = random_program(rng, max_atoms=8, max_rules=12, min_atoms=4)
            with_la = Solver(P, record_heuristic=True)
            on = list(with_la.models())
            off = enumerate_models(P, lookahead=False)
            assert set(on) == set(off) and len(on) == len(off), f"program {i}"
            for call in with_la.heuristic_log:
                if not call.conflict:
                    calls += 1
                    assert call.scores[call.chosen] == max(call.scores.values()), f"program {i}"
        assert calls > 0
