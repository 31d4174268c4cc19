"""Deduction for the decision procedure: atleast, atmost and expand.

Two implementations live here:

* a declarative reference (``atleast_reference``, ``atmost_reference``,
  ``expand_reference``) that iterates the defining operators with the
  generic fixpoint engine, and
* ``PropagationState``, the counter-based incremental engine the search uses.

Literals inside the engine are integer codes: ``2a`` for ``a`` and ``2a+1``
for ``not a``, so negation is ``code ^ 1``.
"""

from __future__ import annotations

from typing import Iterable, Optional

from .fixpoint import lfp
from .program import (
    BasicRule,
    ChoiceRule,
    ConstraintRule,
    Literal,
    LiteralSet,
    Program,
    Rule,
    WeightRule,
    rule_bound,
    weighted_body,
)

UNDEF, TRUE, FALSE = 0, 1, 2


# ---------------------------------------------------------------------------
# closed forms of the inevitable / possible consequences of one rule


def _atom_weights(rule: Rule) -> dict[int, list[int]]:
    """Per body atom: [weight as atom, weight as not-atom, occurs as atom, occurs as not-atom]."""
    table: dict[int, list[int]] = {}
    for lit, w in weighted_body(rule):
        entry = table.setdefault(lit.atom, [0, 0, 0, 0])
        if lit.positive:
            entry[0] += w
            entry[2] = 1
        else:
            entry[1] += w
            entry[3] = 1
    return table


def _sum_range(rule: Rule, true: set[int], false: set[int]) -> tuple[int, int]:
    """Smallest and largest body sum over all interpretations agreeing with (true, false).

    Body atoms are independent, so each contributes the min / max of its two
    possible readings.
    """
    lo = hi = 0
    for atom, (wp, wn, _, _) in _atom_weights(rule).items():
        if atom in true:
            lo += wp
            hi += wp
        elif atom in false:
            lo += wn
            hi += wn
        else:
            lo += min(wp, wn)
            hi += max(wp, wn)
    return lo, hi


def _all_or_nothing(rule: Rule) -> bool:
    return isinstance(rule, (BasicRule, ChoiceRule))


def _needs(rule: Rule, true: set[int], false: set[int], best: bool) -> bool:
    """Whether the body holds in the least (best=False) or most (best=True) favourable interpretation."""
    if _all_or_nothing(rule):
        # every literal must hold; an atom occurring in both polarities never can
        for atom, (_, _, has_p, has_n) in _atom_weights(rule).items():
            if has_p and has_n:
                return False
            if atom in true:
                if has_n:
                    return False
            elif atom in false:
                if has_p:
                    return False
            elif not best:
                return False
        return True
    lo, hi = _sum_range(rule, true, false)
    return (hi if best else lo) >= rule_bound(rule)


def min_consequences(r: Rule, A: LiteralSet) -> set[int]:
    """Heads of ``r`` derived in every interpretation that agrees with A."""
    if A.conflict:
        return set(r.heads)
    if isinstance(r, ChoiceRule):
        if not _needs(r, A.pos, A.neg, best=False):
            return set()
        return {h for h in r.heads if h in A.pos}
    return {r.head} if _needs(r, A.pos, A.neg, best=False) else set()


def max_consequences(r: Rule, A: LiteralSet) -> set[int]:
    """Heads of ``r`` derived in some interpretation that agrees with A."""
    if A.conflict:
        return set()
    if isinstance(r, ChoiceRule):
        # a choice head needs itself in the interpretation
        return {
            h
            for h in r.heads
            if h not in A.neg and _needs(r, A.pos | {h}, A.neg, best=True)
        }
    return {r.head} if _needs(r, A.pos, A.neg, best=True) else set()


# ---------------------------------------------------------------------------
# declarative reference


def _atleast_operator(P: Program, A: frozenset[int]):
    n = P.num_atoms
    full = frozenset(range(2 * n))
    rules = P.rules
    rule_atoms = [sorted({lit.atom for lit, _ in weighted_body(r)} | set(r.heads)) for r in rules]
    heads_of: list[list[int]] = [[] for _ in range(n)]
    for i, r in enumerate(rules):
        for h in r.heads:
            heads_of[h].append(i)

    def f(B: frozenset[int]) -> frozenset[int]:
        ls = LiteralSet.from_codes(B)
        if ls.conflict:
            return full
        out = set(A) | set(B)
        mins = [min_consequences(r, ls) for r in rules]
        maxs = [max_consequences(r, ls) for r in rules]
        for m in mins:
            out.update(2 * a for a in m)
        supported = set()
        for m in maxs:
            supported |= m
        out.update(2 * a + 1 for a in range(n) if a not in supported)

        def probes(i):
            for atom in rule_atoms[i]:
                if atom not in ls.pos and atom not in ls.neg:
                    for x in (Literal(atom, True), Literal(atom, False)):
                        yield x, ls | (x,)

        for a in ls.pos:
            only = [i for i in heads_of[a] if a in maxs[i]]
            if len(only) != 1:
                continue
            i = only[0]
            for x, grown in probes(i):
                if a not in max_consequences(rules[i], grown):
                    out.add(x.code ^ 1)
        for a in ls.neg:
            for i in heads_of[a]:
                for x, grown in probes(i):
                    if a in min_consequences(rules[i], grown):
                        out.add(x.code ^ 1)
        return frozenset(out)

    return f, full


def atleast_reference(P: Program, A: LiteralSet) -> LiteralSet:
    """Least fixed point of the four deduction cases, by plain iteration.

    Non-monotonicity only appears once a complementary pair is present, after
    which the next step saturates; iterating the square of the operator is
    monotone. Conflicting results come back saturated.
    """
    f, full = _atleast_operator(P, A.codes())
    result = lfp(lambda B: f(f(B)), full)
    return LiteralSet.from_codes(result)


def _atmost_rule(r: Rule, S: set[int], C: set[int]) -> set[int]:
    if isinstance(r, ChoiceRule):
        ok = all((l.atom in C) if l.positive else (l.atom not in S) for l in r.body)
        return set(r.heads) if ok else set()
    total = sum(w for l, w in weighted_body(r) if (l.atom in C if l.positive else l.atom not in S))
    return {r.head} if total >= rule_bound(r) else set()


def atmost_reference(P: Program, A: LiteralSet) -> frozenset[int]:
    """Least fixed point of ``B -> union f'_r(A+, B - A-) - A-``."""
    S, false = set(A.pos), set(A.neg)

    def f(B):
        C = set(B) - false
        out = set()
        for r in P.rules:
            out |= _atmost_rule(r, S, C)
        return out - false

    return lfp(f, range(P.num_atoms))


def expand_reference(P: Program, A: LiteralSet) -> LiteralSet:
    current = A.copy()
    while True:
        before = current.copy()
        current = atleast_reference(P, current)
        if current.conflict:
            return current
        upper = atmost_reference(P, current)
        current.neg |= {x for x in range(P.num_atoms) if x not in upper}
        if current == before:
            return current


# ---------------------------------------------------------------------------
# counter-based engine


def _compile_atleast(rule: Rule):
    """Counter view of a rule: (body codes, weights, bound, support heads, head, choice).

    An atom occurring in both polarities is folded away: for weighted rules its
    smaller weight is always earned and moves into the bound; basic and choice
    rules with such a body can never fire and are dropped. Choice heads whose
    not-atom is in the body cannot be supported by the rule. Returns None for
    rules that never contribute.
    """
    table = _atom_weights(rule)
    bound = rule_bound(rule)
    choice = isinstance(rule, ChoiceRule)
    if _all_or_nothing(rule):
        if any(hp and hn for _, _, hp, hn in table.values()):
            return None
    lits, weights = [], []
    for atom in sorted(table):
        wp, wn, hp, hn = table[atom]
        if hp and hn:
            m = min(wp, wn)
            bound -= m
            wp -= m
            wn -= m
        if hp and wp:
            lits.append(2 * atom)
            weights.append(wp)
        if hn and wn:
            lits.append(2 * atom + 1)
            weights.append(wn)
    if choice:
        negs = {atom for atom, (_, _, _, hn) in table.items() if hn}
        support = tuple(h for h in rule.heads if h not in negs)
        if not support:
            return None
        head = -1
    else:
        support = (rule.head,)
        head = rule.head
    return lits, weights, bound, support, head, choice


class PropagationState:
    """Incremental atleast / atmost propagation over one program.

    Per rule the engine keeps a lower and an upper bound of the body sum under
    the current assignment. For unit-weight rules these give the classic
    counters: ``literal = size - lower`` and ``inactive = size - upper``. A rule
    fires when ``lower >= bound`` and is inactive once ``upper < bound``. Every
    atom keeps a head counter of the active rules that can support it.

    The atmost closure is maintained separately over the original rules, with a
    per-rule sum of the body contributions (atoms in the closure, not-atoms not
    yet true) and a source rule per atom. When the assignment grows, atoms that
    may have lost support are removed, then re-derived.

    All changes are undone through ``push_level`` / ``pop_level``.
    """

    def __init__(self, program: Program, source_pointers: bool = True, initial_checks: bool = True):
        self.program = program
        self.source_pointers = source_pointers
        n = program.num_atoms
        self.n = n
        self.value = [UNDEF] * n
        self.trail: list[int] = []
        self.qhead = 0
        self.conflict_lit: Optional[int] = None
        self.levels: list[tuple[int, int, bool]] = []
        self.deduce = True

        # atleast view
        self.occ: list[list[tuple[int, int]]] = [[] for _ in range(2 * n)]
        self.body: list[list[tuple[int, int]]] = []
        self.bound: list[int] = []
        self.lower: list[int] = []
        self.upper: list[int] = []
        self.maxw: list[int] = []
        self.support: list[tuple[int, ...]] = []
        self.head: list[int] = []
        self.choice: list[bool] = []
        self.head_count = [0] * n
        self.head_rules: list[list[int]] = [[] for _ in range(n)]
        self.def_rules: list[list[int]] = [[] for _ in range(n)]
        for rule in program.rules:
            compiled = _compile_atleast(rule)
            if compiled is None:
                continue
            lits, weights, bound, support, head, choice = compiled
            r = len(self.bound)
            self.body.append(list(zip(lits, weights)))
            for code, w in zip(lits, weights):
                self.occ[code].append((r, w))
            total = sum(weights)
            self.bound.append(bound)
            self.lower.append(0)
            self.upper.append(total)
            self.maxw.append(max(weights, default=0))
            self.support.append(support)
            self.head.append(head)
            self.choice.append(choice)
            for h in support:
                self.head_rules[h].append(r)
                if total >= bound:
                    self.head_count[h] += 1
            if not choice:
                self.def_rules[head].append(r)

        # atmost view: the rules as written
        self.am_bound: list[int] = []
        self.am_heads: list[tuple[int, ...]] = []
        self.am_sum: list[int] = []
        self.am_pos_occ: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.am_neg_occ: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.am_head_rules: list[list[int]] = [[] for _ in range(n)]
        for r, rule in enumerate(program.rules):
            self.am_bound.append(rule_bound(rule))
            self.am_heads.append(tuple(rule.heads))
            s = 0
            for lit, w in weighted_body(rule):
                if lit.positive:
                    self.am_pos_occ[lit.atom].append((r, w))
                else:
                    self.am_neg_occ[lit.atom].append((r, w))
                    s += w
            self.am_sum.append(s)
            for h in rule.heads:
                self.am_head_rules[h].append(r)
        self.in_am = [False] * n
        self.source = [-1] * n
        self.am_log: list[tuple[int, bool, int]] = []
        self.pending_rules: list[int] = []
        self.pending_atoms: list[int] = []
        self.am_fresh = True
        self.am_visited = 0
        self.am_removed: list[int] = []

        self.expand_rounds = 0
        self._initial_closure()
        if initial_checks:
            self._initial_checks()

    # -- assignment -------------------------------------------------------

    @property
    def conflict(self) -> bool:
        return self.conflict_lit is not None

    def assign(self, code: int) -> bool:
        a = code >> 1
        v = FALSE if code & 1 else TRUE
        cur = self.value[a]
        if cur == v:
            return True
        if cur != UNDEF or self.conflict_lit is not None:
            if self.conflict_lit is None:
                self.conflict_lit = code
            return False
        self.value[a] = v
        self.trail.append(code)
        return True

    def is_true(self, code: int) -> bool:
        return self.value[code >> 1] == (FALSE if code & 1 else TRUE)

    def covered(self) -> bool:
        return len(self.trail) == self.n

    def assignment(self) -> LiteralSet:
        """Current literals; after a conflict the offending literal is included."""
        out = LiteralSet.from_codes(self.trail)
        if self.conflict_lit is not None:
            out.add(Literal.from_code(self.conflict_lit))
        return out

    def atmost_set(self) -> frozenset[int]:
        return frozenset(a for a in range(self.n) if self.in_am[a])

    def true_atoms(self) -> frozenset[int]:
        return frozenset(a for a in range(self.n) if self.value[a] == TRUE)

    # -- levels -----------------------------------------------------------

    def push_level(self) -> None:
        self.levels.append((len(self.trail), len(self.am_log), self.am_fresh))

    def pop_level(self) -> None:
        trail_mark, log_mark, fresh = self.levels.pop()
        self._undo(trail_mark, log_mark)
        self.am_fresh = fresh

    def _undo(self, trail_mark: int, log_mark: int) -> None:
        trail, value = self.trail, self.value
        while len(trail) > self.qhead:
            value[trail.pop() >> 1] = UNDEF
        while len(trail) > trail_mark:
            code = trail.pop()
            self._unprocess(code)
            value[code >> 1] = UNDEF
        self.qhead = len(trail)
        log = self.am_log
        in_am, am_sum, source = self.in_am, self.am_sum, self.source
        while len(log) > log_mark:
            x, added, old_source = log.pop()
            if added:
                in_am[x] = False
                for r, w in self.am_pos_occ[x]:
                    am_sum[r] -= w
            else:
                in_am[x] = True
                for r, w in self.am_pos_occ[x]:
                    am_sum[r] += w
            source[x] = old_source
        self.pending_rules.clear()
        self.pending_atoms.clear()
        self.conflict_lit = None

    # -- atleast ----------------------------------------------------------

    def _initial_checks(self) -> None:
        for r in range(len(self.bound)):
            self._check_rule(r)
        for a in range(self.n):
            self._check_atom(a)

    def _process(self, code: int) -> None:
        a = code >> 1
        lower, upper, bound = self.lower, self.upper, self.bound
        for r, w in self.occ[code]:
            lower[r] += w
        touched = []
        for r, w in self.occ[code ^ 1]:
            old = upper[r]
            new = old - w
            upper[r] = new
            if old >= bound[r] > new:
                for h in self.support[r]:
                    self.head_count[h] -= 1
                    touched.append(h)
        am_sum, am_bound = self.am_sum, self.am_bound
        if code & 1:
            if self.in_am[a]:
                self.pending_atoms.append(a)
        else:
            for r, w in self.am_neg_occ[a]:
                old = am_sum[r]
                am_sum[r] = old - w
                if old >= am_bound[r]:
                    self.pending_rules.append(r)
        if not self.deduce:
            return
        for r, _ in self.occ[code]:
            self._check_rule(r)
        for r, _ in self.occ[code ^ 1]:
            self._check_rule(r)
        self._check_atom(a)
        for h in touched:
            self._check_atom(h)

    def _unprocess(self, code: int) -> None:
        lower, upper, bound = self.lower, self.upper, self.bound
        for r, w in self.occ[code]:
            lower[r] -= w
        for r, w in self.occ[code ^ 1]:
            old = upper[r]
            new = old + w
            upper[r] = new
            if old < bound[r] <= new:
                for h in self.support[r]:
                    self.head_count[h] += 1
        if not code & 1:
            am_sum = self.am_sum
            for r, w in self.am_neg_occ[code >> 1]:
                am_sum[r] += w

    def _check_atom(self, a: int) -> None:
        if self.conflict_lit is not None:
            return
        v = self.value[a]
        count = self.head_count[a]
        if v == UNDEF:
            if count == 0:
                self.assign(2 * a + 1)
        elif v == TRUE:
            if count == 0:
                self.assign(2 * a + 1)
            elif count == 1:
                upper, bound = self.upper, self.bound
                for r in self.head_rules[a]:
                    if upper[r] >= bound[r]:
                        self._force_body(r)
                        break
        else:
            for r in self.def_rules[a]:
                self._check_rule(r)

    def _force_body(self, r: int) -> None:
        # the only rule able to support a true head: keep it able to
        up, b = self.upper[r], self.bound[r]
        if up - self.maxw[r] >= b:
            return
        value = self.value
        for code, w in self.body[r]:
            if up - w < b and value[code >> 1] == UNDEF:
                if not self.assign(code):
                    return

    def _check_rule(self, r: int) -> None:
        if self.conflict_lit is not None:
            return
        b = self.bound[r]
        if self.choice[r]:
            if self.upper[r] >= b:
                for h in self.support[r]:
                    if self.value[h] == TRUE and self.head_count[h] == 1:
                        self._force_body(r)
                        return
            return
        h = self.head[r]
        lo = self.lower[r]
        if lo >= b and not self.assign(2 * h):
            return
        hv = self.value[h]
        if hv == FALSE:
            if lo + self.maxw[r] >= b:
                value = self.value
                for code, w in self.body[r]:
                    if lo + w >= b and value[code >> 1] == UNDEF:
                        if not self.assign(code ^ 1):
                            return
        elif hv == TRUE:
            if self.head_count[h] == 1 and self.upper[r] >= b:
                self._force_body(r)

    def propagate(self) -> bool:
        """Run the counter algorithm over all unprocessed literals; False on conflict."""
        trail = self.trail
        while self.qhead < len(trail) and self.conflict_lit is None:
            code = trail[self.qhead]
            self.qhead += 1
            self._process(code)
        return self.conflict_lit is None

    # -- atmost -----------------------------------------------------------

    def _initial_closure(self) -> None:
        for r in range(len(self.am_bound)):
            if self.am_sum[r] >= self.am_bound[r]:
                for h in self.am_heads[r]:
                    if not self.in_am[h]:
                        self._am_add(h, r, log=False)

    def _am_add(self, x: int, r: int, log: bool = True) -> None:
        in_am, am_sum, am_bound, am_heads = self.in_am, self.am_sum, self.am_bound, self.am_heads
        value, source = self.value, self.source
        stack = [(x, r)]
        while stack:
            x, r = stack.pop()
            if in_am[x]:
                continue
            in_am[x] = True
            if log:
                self.am_log.append((x, True, source[x]))
            source[x] = r
            for r2, w in self.am_pos_occ[x]:
                old = am_sum[r2]
                am_sum[r2] = old + w
                if old < am_bound[r2] <= old + w:
                    for h in am_heads[r2]:
                        if not in_am[h] and value[h] != FALSE:
                            stack.append((h, r2))

    def _atmost(self, assign_complement: bool = True) -> None:
        in_am, am_sum, am_bound, am_heads = self.in_am, self.am_sum, self.am_bound, self.am_heads
        source, value = self.source, self.value
        use_source = self.source_pointers
        stack = [a for a in self.pending_atoms if in_am[a]]
        for r in self.pending_rules:
            for h in am_heads[r]:
                if in_am[h] and (not use_source or source[h] == r):
                    stack.append(h)
        self.pending_atoms.clear()
        self.pending_rules.clear()

        # phase 1: tentatively remove everything that may have lost its support
        removed = []
        while stack:
            x = stack.pop()
            if not in_am[x]:
                continue
            in_am[x] = False
            self.am_log.append((x, False, source[x]))
            removed.append(x)
            for r, w in self.am_pos_occ[x]:
                old = am_sum[r]
                am_sum[r] = old - w
                if old >= am_bound[r]:
                    for h in am_heads[r]:
                        if in_am[h] and (not use_source or source[h] == r):
                            stack.append(h)
        self.am_visited = len(removed)
        self.am_removed = removed

        # phase 2: re-derive removed atoms that still have a firing rule
        for x in removed:
            if in_am[x] or value[x] == FALSE:
                continue
            for r in self.am_head_rules[x]:
                if am_sum[r] >= am_bound[r]:
                    self._am_add(x, r)
                    break

        if not assign_complement:
            return
        if self.am_fresh:
            self.am_fresh = False
            candidates = range(self.n)
        else:
            candidates = removed
        for x in candidates:
            if not in_am[x] and value[x] != FALSE:
                if not self.assign(2 * x + 1):
                    return

    def atmost_incremental(self, codes: Iterable[int]) -> frozenset[int]:
        """Grow the assignment by ``codes`` (no other deduction) and update the closure."""
        saved = self.deduce
        self.deduce = False
        try:
            for code in codes:
                if not self.assign(code):
                    raise ValueError(f"literal {code} conflicts with the assignment")
            self.propagate()
        finally:
            self.deduce = saved
        self._atmost(assign_complement=False)
        return self.atmost_set()

    # -- expand -----------------------------------------------------------

    def expand(self) -> bool:
        """Alternate atleast and the atmost complement until nothing changes; False on conflict."""
        while True:
            self.expand_rounds += 1
            if not self.propagate():
                return False
            if not (self.pending_rules or self.pending_atoms or self.am_fresh):
                return True
            self._atmost()
            if self.conflict_lit is not None:
                return False
            if self.qhead == len(self.trail):
                return True

    # -- debugging --------------------------------------------------------

    def snapshot(self) -> tuple:
        return (
            tuple(self.value), tuple(self.trail), self.qhead, self.conflict_lit,
            tuple(self.lower), tuple(self.upper), tuple(self.head_count),
            tuple(self.in_am), tuple(self.source), tuple(self.am_sum),
            tuple(self.am_log), self.am_fresh, len(self.levels),
        )

    def check_counters(self) -> None:
        """Recount every counter from the processed literals; raise AssertionError on drift."""
        done = self.trail[: self.qhead]
        true_codes = set(done)
        for r, body in enumerate(self.body):
            lo = sum(w for c, w in body if c in true_codes)
            up = sum(w for c, w in body if c ^ 1 not in true_codes)
            assert self.lower[r] == lo, f"lower of rule {r}: {self.lower[r]} != {lo}"
            assert self.upper[r] == up, f"upper of rule {r}: {self.upper[r]} != {up}"
        for a in range(self.n):
            count = sum(1 for r in self.head_rules[a] if self.upper[r] >= self.bound[r])
            assert self.head_count[a] == count, f"head counter of atom {a}"
        pos_done = {c >> 1 for c in done if not c & 1}
        for r, rule in enumerate(self.program.rules):
            s = 0
            for lit, w in weighted_body(rule):
                if lit.positive:
                    s += w if self.in_am[lit.atom] else 0
                elif lit.atom not in pos_done:
                    s += w
            assert self.am_sum[r] == s, f"atmost sum of rule {r}: {self.am_sum[r]} != {s}"


# ---------------------------------------------------------------------------
# function-style entry points


def _load(P: Program, A: LiteralSet, deduce: bool = True) -> PropagationState:
    state = PropagationState(P)
    state.deduce = deduce
    for lit in A:
        if not state.assign(lit.code):
            break
    return state


def _result(state: PropagationState, A: LiteralSet) -> LiteralSet:
    # loading may stop at the first clashing literal; a conflict still contains all of A
    out = state.assignment()
    if out.conflict:
        out.update(A)
    return out


def atleast(P: Program, A: LiteralSet) -> LiteralSet:
    """Counter-based atleast. Stops at the first complementary pair (conflict-marked result)."""
    if A.conflict:
        return A.copy()
    state = _load(P, A)
    state.propagate()
    return _result(state, A)


def atmost(P: Program, A: LiteralSet) -> frozenset[int]:
    if A.conflict:
        return frozenset()
    state = PropagationState(P, initial_checks=False)
    return state.atmost_incremental(lit.code for lit in A)


def expand(P: Program, A: LiteralSet) -> LiteralSet:
    if A.conflict:
        return A.copy()
    state = _load(P, A)
    state.expand()
    return _result(state, A)


def conflict(P: Program, A: LiteralSet, check: bool = False) -> bool:
    """True iff A holds a complementary pair. ``check`` verifies that A is expanded."""
    if check and not A.conflict:
        assert expand(P, A) == A, "conflict() called on a set that is not expanded"
    return A.conflict
