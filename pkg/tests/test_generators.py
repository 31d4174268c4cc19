import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from stablemodels.generators import (
    CnfFormula,
    HammingSpec,
    KnapsackSpec,
    decode_code,
    example_formula,
    gen_hamming,
    gen_knapsack,
    gen_sat,
    parse_dimacs,
    shuffled,
    verify_code,
)
from stablemodels.oracle import enumerate_stable_brute, is_stable
from stablemodels.parser import parse_program, serialize_program
from stablemodels.program import LiteralSet, ProgramError, agrees
from stablemodels.search import enumerate_models, smodels


def models_under(P, A):
    return [m for m in enumerate_stable_brute(P) if agrees(m, A)]


# -- codes -------------------------------------------------------------------


def test_hamming_small_has_unique_code():
    P, A = gen_hamming(HammingSpec(2, 2, 2))
    assert len(P.rules) == 6
    models = models_under(P, A)
    assert [decode_code(P, m) for m in models] == [[0, 3]]
    assert [decode_code(P, m) for m in enumerate_models(P, A)] == [[0, 3]]


def test_hamming_five_three():
    P, A = gen_hamming(HammingSpec(5, 3, 4))
    ok, model = smodels(P, A)
    words = decode_code(P, model)
    assert ok and 0 in words and len(words) >= 4 and verify_code(words, 5, 3)
    Q, B = gen_hamming(HammingSpec(5, 3, 5))
    assert smodels(Q, B) == (False, None)


def test_hamming_guard():
    with pytest.raises(ProgramError):
        HammingSpec(17, 3, 1)
    with pytest.raises(ProgramError):
        HammingSpec(3, 4, 1)


def test_verify_code_examples():
    assert verify_code([0, 7, 25, 30], 5, 3)
    assert not verify_code([0, 1], 2, 2)
    assert verify_code([5], 3, 3)


@pytest.mark.parametrize("n, d", [(3, 2), (3, 3), (4, 3)])
def test_every_code_model_is_a_valid_code(n, d):
    P, A = gen_hamming(HammingSpec(n, d, 1))
    models = enumerate_models(P, A)
    assert models
    for m in models:
        words = decode_code(P, m)
        assert 0 in words and verify_code(words, n, d)


def test_generated_text_is_deterministic_and_parses():
    P, _ = gen_hamming(HammingSpec(3, 2, 2))
    text = serialize_program(P)
    assert text == serialize_program(gen_hamming(HammingSpec(3, 2, 2))[0])
    assert parse_program(text) == P


@pytest.mark.parametrize("seed", range(5))
def test_shuffling_keeps_the_model_set(seed):
    P, _ = gen_hamming(HammingSpec(3, 2, 3))
    Q = shuffled(P, random.Random(seed))
    by_name = lambda prog: {frozenset(prog.names(m)) for m in enumerate_stable_brute(prog)}
    assert by_name(P) == by_name(Q)


# -- satisfiability ----------------------------------------------------------


def test_example_formula_program():
    P, A = gen_sat(example_formula())
    expected = parse_program(
        "{ a, b, c, d }.\n"
        "false :- not a, not b, c.\n"
        "false :- a, not b, d.\n"
        "false :- b, not c, not d.\n"
    )
    assert P.atoms == expected.atoms and P.rules == expected.rules
    assert len(models_under(P, A)) == 10


def test_empty_formula():
    P, A = gen_sat(CnfFormula(("x", "y", "z")))
    assert len(models_under(P, A)) == 8


def test_dimacs():
    f = parse_dimacs("c comment\np cnf 3 2\n1 -2 0\n2 3 0\n")
    assert f.variables == ("x1", "x2", "x3")
    assert f.clauses == ((("x1", True), ("x2", False)), (("x2", True), ("x3", True)))


def _truth_table(f):
    count = 0
    for bits in product((False, True), repeat=len(f.variables)):
        val = dict(zip(f.variables, bits))
        count += all(any(val[v] == s for v, s in clause) for clause in f.clauses)
    return count


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sat_model_count_matches_truth_table(seed):
    rng = random.Random(seed)
    names = tuple(f"v{i}" for i in range(rng.randint(0, 8)))
    clauses = []
    if names:
        for _ in range(rng.randint(0, 10)):
            clauses.append(tuple((rng.choice(names), rng.random() < 0.5) for _ in range(rng.randint(1, 3))))
    f = CnfFormula(names, tuple(clauses))
    P, A = gen_sat(f)
    assert len(enumerate_models(P, A)) == _truth_table(f)


# -- knapsack ----------------------------------------------------------------


def _subsets(spec):
    k = len(spec.weights)
    out = []
    for bits in product((False, True), repeat=k):
        w = sum(x for x, b in zip(spec.weights, bits) if b)
        v = sum(x for x, b in zip(spec.values, bits) if b)
        if w < spec.max_weight and v >= spec.min_value:
            out.append({f"a{i + 1}" for i in range(k) if bits[i]})
    return out


def _packings(spec):
    P, A = gen_knapsack(spec)
    return [set(P.names(m)) - {"true"} for m in enumerate_models(P, A)]


def test_knapsack_example():
    spec = KnapsackSpec((2, 3), (3, 4), 4, 3)
    assert sorted(map(sorted, _packings(spec))) == [["a1"], ["a2"]]


def test_knapsack_zero_bounds():
    spec = KnapsackSpec((1, 2, 3), (1, 1, 1), 4, 0)
    assert sorted(map(sorted, _packings(spec))) == sorted(map(sorted, _subsets(spec)))
    assert len(_packings(spec)) == 5
    assert _packings(KnapsackSpec((1, 2), (1, 1), 0, 0)) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_knapsack_matches_subset_enumeration(seed):
    rng = random.Random(seed)
    k = rng.randint(0, 7)
    spec = KnapsackSpec(
        tuple(rng.randint(0, 5) for _ in range(k)),
        tuple(rng.randint(0, 5) for _ in range(k)),
        rng.randint(0, 12),
        rng.randint(0, 12),
    )
    assert sorted(map(sorted, _packings(spec))) == sorted(map(sorted, _subsets(spec)))


def test_decoded_models_are_stable():
    P, A = gen_knapsack(KnapsackSpec((2, 3, 1), (3, 4, 2), 5, 4))
    for m in enumerate_models(P, A):
        assert is_stable(P, m) and agrees(m, LiteralSet(A))
