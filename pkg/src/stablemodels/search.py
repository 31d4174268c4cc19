"""The decision procedure: expand, conflict check, lookahead and branching.

The recursion of the procedure is run on an explicit stack of decision
levels. Each level remembers the branch literal and whether it is already
the second (complemented) branch; backtracking flips the deepest first branch.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

from .program import Literal, LiteralSet, Program
from .propagation import UNDEF, PropagationState


@dataclass
class SearchStats:
    choices: int = 0
    conflicts: int = 0
    lookaheads: int = 0
    expands: int = 0
    models: int = 0
    time: float = 0.0

    def line(self) -> str:
        return (
            f"c choices={self.choices} conflicts={self.conflicts} lookaheads={self.lookaheads} "
            f"expands={self.expands} models={self.models} time_ms={self.time * 1000:.1f}"
        )


@dataclass(order=True, frozen=True)
class HeuristicScore:
    """Sizes of the two expansions of a candidate, ordered by (min, max)."""

    low: int
    high: int

    @classmethod
    def of(cls, p: int, n: int) -> "HeuristicScore":
        return cls(min(p, n), max(p, n))


@dataclass
class HeuristicCall:
    scores: dict[int, HeuristicScore] = field(default_factory=dict)
    chosen: Optional[int] = None
    conflict: bool = False


class Solver:
    """Stable model search over one program.

    ``lookahead=False`` skips all probing and branches on the first uncovered
    atom; ``seed`` permutes the candidate order. Set ``record_heuristic`` to keep
    every heuristic decision in ``heuristic_log``.
    """

    def __init__(
        self,
        program: Program,
        lookahead: bool = True,
        seed: Optional[int] = None,
        source_pointers: bool = True,
        record_heuristic: bool = False,
    ):
        self.program = program
        self.use_lookahead = lookahead
        self.state = PropagationState(program, source_pointers=source_pointers)
        order = list(range(program.num_atoms))
        if seed is not None:
            random.Random(seed).shuffle(order)
        self.order = order
        self.stats = SearchStats()
        self.record_heuristic = record_heuristic
        self.heuristic_log: list[HeuristicCall] = []
        self.on_probe: Optional[Callable[[int], None]] = None

    # -- probing ----------------------------------------------------------

    def _probe(self, code: int) -> Optional[list[int]]:
        """Expand the current assignment plus ``code``; new literals, or None on conflict."""
        state = self.state
        self.stats.lookaheads += 1
        if self.on_probe is not None:
            self.on_probe(code)
        mark = len(state.trail)
        state.push_level()
        ok = state.assign(code) and state.expand()
        added = None if not ok else state.trail[mark:]
        state.pop_level()
        return added

    def _candidates(self) -> list[int]:
        value = self.state.value
        out = []
        for a in self.order:
            if value[a] == UNDEF:
                out.append(2 * a)
                out.append(2 * a + 1)
        return out

    def lookahead(self) -> int:
        """Pick the branch literal at an expanded, conflict-free, uncovered node.

        Returns the first probed literal whose expansion conflicts; literals
        already implied by an earlier probe are not probed again. Falls back on
        the heuristic, reusing the probe sizes.
        """
        if not self.use_lookahead:
            return self._candidates()[0]
        sizes: dict[int, int] = {}
        pending = self._candidates()
        skip: set[int] = set()
        for code in pending:
            if code in skip:
                continue
            added = self._probe(code)
            if added is None:
                return code
            sizes[code] = len(added)
            skip.update(added)
        return self.heuristic(sizes)

    def heuristic(self, sizes: Optional[dict[int, int]] = None) -> int:
        """Uncovered literal maximising (min(p, n), max(p, n)); ties go to candidate order."""
        sizes = dict(sizes or {})
        call = HeuristicCall()
        best_code, best_score = None, None
        candidates = self._candidates()
        for i in range(0, len(candidates), 2):
            code = candidates[i]
            for c in (code, code ^ 1):
                if c not in sizes:
                    added = self._probe(c)
                    if added is None:
                        call.conflict = True
                        call.chosen = c
                        if self.record_heuristic:
                            self.heuristic_log.append(call)
                        return c
                    sizes[c] = len(added)
            score = HeuristicScore.of(sizes[code], sizes[code ^ 1])
            call.scores[code] = score
            if best_score is None or score > best_score:
                best_code, best_score = code, score
        call.chosen = best_code
        if self.record_heuristic:
            self.heuristic_log.append(call)
        return best_code

    # -- search -----------------------------------------------------------

    def _expand(self) -> bool:
        self.stats.expands += 1
        ok = self.state.expand()
        if not ok:
            self.stats.conflicts += 1
        return ok

    def models(self, assumptions: Iterable[Literal] = (), limit: Optional[int] = None) -> Iterator[frozenset[int]]:
        """Yield the stable models agreeing with ``assumptions``, each exactly once."""
        start = time.perf_counter()
        state = self.state
        state.push_level()
        # (branch literal, second branch?) per decision level above the root
        stack: list[tuple[int, bool]] = []
        found = 0
        try:
            ok = all(state.assign(lit.code) for lit in assumptions) and self._expand()
            while True:
                if ok and state.covered():
                    found += 1
                    self.stats.models += 1
                    model = state.true_atoms()
                    self.stats.time = time.perf_counter() - start
                    yield model
                    if limit is not None and found >= limit:
                        return
                    ok = False
                if ok:
                    x = self.lookahead()
                    self.stats.choices += 1
                    state.push_level()
                    stack.append((x, False))
                    ok = state.assign(x) and self._expand()
                    continue
                # backtrack to the deepest first branch and take its complement
                while stack and stack[-1][1]:
                    stack.pop()
                    state.pop_level()
                if not stack:
                    return
                x, _ = stack.pop()
                state.pop_level()
                state.push_level()
                stack.append((x ^ 1, True))
                ok = state.assign(x ^ 1) and self._expand()
        finally:
            while state.levels:
                state.pop_level()
            self.stats.time = time.perf_counter() - start

    def solve(self, assumptions: Iterable[Literal] = ()) -> Optional[frozenset[int]]:
        for model in self.models(assumptions, limit=1):
            return model
        return None


def _assumption_list(A) -> list[Literal]:
    if A is None:
        return []
    return list(A)


def smodels(P: Program, A: Optional[LiteralSet] = None, **options) -> tuple[bool, Optional[frozenset[int]]]:
    """Decide whether a stable model of P agrees with A; returns (answer, witness)."""
    model = Solver(P, **options).solve(_assumption_list(A))
    return model is not None, model


def enumerate_models(
    P: Program, assumptions: Optional[LiteralSet] = None, limit: Optional[int] = None, **options
) -> list[frozenset[int]]:
    return list(Solver(P, **options).models(_assumption_list(assumptions), limit=limit))


def _node(P: Program, A: Optional[LiteralSet], options) -> Solver:
    solver = Solver(P, **options)
    state = solver.state
    for lit in _assumption_list(A):
        if not state.assign(lit.code):
            raise ValueError("assumptions are contradictory")
    if not state.expand():
        raise ValueError("the expanded assignment has a conflict")
    if state.covered():
        raise ValueError("the expanded assignment covers every atom")
    return solver


def lookahead(P: Program, A: Optional[LiteralSet] = None, **options) -> Literal:
    """Branch literal chosen at the node expand(P, A)."""
    return Literal.from_code(_node(P, A, options).lookahead())


def heuristic(P: Program, A: Optional[LiteralSet] = None, **options) -> Literal:
    return Literal.from_code(_node(P, A, options).heuristic())
