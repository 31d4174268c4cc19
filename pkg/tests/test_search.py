import random

from hypothesis import given, settings, strategies as st

from randprog import random_assignment, random_program
from stablemodels.generators import HammingSpec, decode_code, example_formula, gen_hamming, gen_sat, verify_code
from stablemodels.oracle import enumerate_stable_brute, is_stable
from stablemodels.parser import parse_program
from stablemodels.program import Literal, LiteralSet, agrees
from stablemodels.propagation import PropagationState
from stablemodels.search import HeuristicScore, Solver, enumerate_models, heuristic, lookahead, smodels

P3 = "a :- not b. b :- not a."


def test_smodels_examples():
    P = parse_program(P3)
    ok, model = smodels(P)
    assert ok and model in ({0}, {1})
    assert smodels(parse_program("a :- not a.")) == (False, None)


def test_smodels_hamming():
    P, _ = gen_hamming(HammingSpec(5, 3, 4))
    ok, model = smodels(P, LiteralSet(P.assumptions))
    words = decode_code(P, model)
    assert ok and len(words) >= 4 and verify_code(words, 5, 3)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decision_matches_oracle(seed):
    rng = random.Random(seed)
    P = random_program(rng, max_atoms=10, max_rules=12)
    A = random_assignment(rng, P.num_atoms)
    oracle = [S for S in enumerate_stable_brute(P) if agrees(S, A)]
    ok, model = smodels(P, A)
    assert ok == bool(oracle)
    if ok:
        assert is_stable(P, model) and agrees(model, A)


def test_lookahead_returns_first_conflicting_probe():
    P = parse_program("a :- not a. b :- not c. c :- not b.")
    assert lookahead(P) == Literal(P.atom("a"), True)


def test_lookahead_without_conflict_uses_heuristic():
    P = parse_program(P3)
    assert lookahead(P) == heuristic(P) == Literal(0, True)


def test_lookahead_skips_implied_literals():
    P = parse_program("a :- not b. b :- not a. c :- a.")
    solver = Solver(P)
    solver.state.expand()
    probed = []
    solver.on_probe = probed.append
    solver.heuristic = lambda sizes=None: None
    solver.lookahead()
    # probing a gives {a, not b, c}; probing not a gives {not a, b, not c}
    assert probed == [0, 1]


def test_heuristic_tie_break_and_scores():
    P = parse_program(P3)
    solver = Solver(P, record_heuristic=True)
    solver.state.expand()
    assert solver.heuristic() == 0
    call = solver.heuristic_log[-1]
    assert set(call.scores.values()) == {HeuristicScore(2, 2)}


def test_score_ordering():
    assert HeuristicScore.of(3, 5) > HeuristicScore.of(9, 2)
    assert HeuristicScore.of(3, 7) > HeuristicScore.of(4, 3)
    assert HeuristicScore.of(5, 1) == HeuristicScore.of(1, 5)


def test_enumeration_examples():
    assert len(enumerate_models(parse_program("{ a, b }."))) == 4
    E, _ = gen_sat(example_formula())
    models = enumerate_models(E, LiteralSet([E.literal("not false")]))
    assert len(models) == len(set(models)) == 10
    one = enumerate_models(parse_program(P3), limit=1)
    assert one in ([frozenset({0})], [frozenset({1})])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_enumeration_complete_and_option_invariant(seed):
    rng = random.Random(seed)
    P = random_program(rng, max_atoms=8, max_rules=12)
    A = random_assignment(rng, P.num_atoms, density=0.2)
    expected = {S for S in enumerate_stable_brute(P) if agrees(S, A)}
    runs = [
        enumerate_models(P, A),
        enumerate_models(P, A, lookahead=False),
        enumerate_models(P, A, seed=seed),
        enumerate_models(P, A, source_pointers=False),
    ]
    for models in runs:
        assert len(models) == len(set(models))
        assert set(models) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_heuristic_choice_is_maximal(seed):
    rng = random.Random(seed)
    P = random_program(rng, max_atoms=8, max_rules=12)
    solver = Solver(P, record_heuristic=True)
    list(solver.models())
    for call in solver.heuristic_log:
        if not call.conflict:
            assert call.scores[call.chosen] == max(call.scores.values())
            assert all(s.low >= 1 for s in call.scores.values())


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_probing_leaves_state_unchanged(seed):
    rng = random.Random(seed)
    P = random_program(rng, max_atoms=8, max_rules=12)
    solver = Solver(P)
    state: PropagationState = solver.state
    if not state.expand() or state.covered():
        return
    before = state.snapshot()
    solver.lookahead()
    assert state.snapshot() == before
    solver.heuristic()
    assert state.snapshot() == before
