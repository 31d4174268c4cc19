"""Least fixed points of monotone set operators over a finite universe."""

from __future__ import annotations

from typing import Callable, Collection, FrozenSet, Hashable, Iterable, Optional, Sequence

SetOp = Callable[[FrozenSet], Iterable]


def lfp(f: SetOp, universe: Optional[Collection[Hashable]] = None) -> frozenset:
    """Iterate ``f`` from the empty set until it stabilises.

    For monotone ``f`` the chain is increasing and reaches the least fixed point
    after at most ``len(universe)`` strict steps; exceeding that bound means ``f``
    is not monotone (or strays outside the universe) and raises ``ValueError``.
    """
    current: frozenset = frozenset()
    limit = None if universe is None else len(universe) + 1
    steps = 0
    while True:
        nxt = frozenset(f(current))
        if nxt == current:
            return current
        steps += 1
        if limit is not None and steps > limit:
            raise ValueError("iteration exceeded |universe| steps; operator is not monotone")
        current = nxt


def lfp_nest(generators: Sequence[SetOp], order: Optional[Callable[[int], int]] = None) -> frozenset:
    """Least fixed point of ``B -> union of g(B)`` by applying one generator at a time.

    ``order(step)`` picks which generator to try next (round robin by default); the
    nest stops once no single generator adds anything.
    """
    k = len(generators)
    if k == 0:
        return frozenset()
    current: set = set()
    idle = 0
    step = 0
    while idle < k:
        i = order(step) % k if order is not None else step % k
        step += 1
        added = set(generators[i](frozenset(current))) - current
        if added:
            current |= added
            idle = 0
        else:
            idle += 1
            if idle >= k and any(set(g(frozenset(current))) - current for g in generators):
                # a custom order may skip generators; only stop when all are saturated
                idle = 0
                order = None
    return frozenset(current)
