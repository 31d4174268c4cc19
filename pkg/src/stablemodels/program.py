"""Ground programs: atoms, literals, the four rule types and partial assignments."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple, Sequence, Union

MAX_SUM = 2**64 - 1
EXPANSION_GUARD = 20


class ProgramError(ValueError):
    """Raised for rules or programs that violate a structural invariant."""


class Literal(NamedTuple):
    atom: int
    positive: bool = True

    def __neg__(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    @property
    def code(self) -> int:
        # 2a for a, 2a+1 for not a; negation is code ^ 1
        return 2 * self.atom + (0 if self.positive else 1)

    @staticmethod
    def from_code(code: int) -> "Literal":
        return Literal(code >> 1, not (code & 1))


def pos(atom: int) -> Literal:
    return Literal(atom, True)


def neg(atom: int) -> Literal:
    return Literal(atom, False)


def negate(x: Literal) -> Literal:
    return Literal(x.atom, not x.positive)


def _lit_key(lit: Literal):
    # positives first, then not-atoms, each by atom index
    return (not lit.positive, lit.atom)


def _canonical_body(body: Iterable[Literal]) -> tuple[Literal, ...]:
    lits = {Literal(int(l[0]), bool(l[1])) for l in body}
    for lit in lits:
        if lit.atom < 0:
            raise ProgramError(f"negative atom index {lit.atom}")
    return tuple(sorted(lits, key=_lit_key))


def _check_bound(value: int, what: str) -> int:
    if isinstance(value, bool) or int(value) != value:
        raise ProgramError(f"{what} must be an integer")
    value = int(value)
    if value < 0:
        raise ProgramError(f"{what} must be nonnegative, got {value}")
    if value > MAX_SUM:
        raise ProgramError(f"{what} exceeds the 64-bit range")
    return value


@dataclass(frozen=True)
class BasicRule:
    head: int
    body: tuple[Literal, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body", _canonical_body(self.body))

    @property
    def heads(self) -> tuple[int, ...]:
        return (self.head,)


@dataclass(frozen=True)
class ConstraintRule:
    head: int
    body: tuple[Literal, ...]
    bound: int

    def __post_init__(self):
        object.__setattr__(self, "body", _canonical_body(self.body))
        object.__setattr__(self, "bound", _check_bound(self.bound, "constraint bound"))

    @property
    def heads(self) -> tuple[int, ...]:
        return (self.head,)


@dataclass(frozen=True)
class ChoiceRule:
    heads: tuple[int, ...]
    body: tuple[Literal, ...] = ()

    def __post_init__(self):
        heads = tuple(sorted({int(h) for h in self.heads}))
        if not heads:
            raise ProgramError("choice rule needs at least one head atom")
        object.__setattr__(self, "heads", heads)
        object.__setattr__(self, "body", _canonical_body(self.body))


@dataclass(frozen=True)
class WeightRule:
    """``head :- [l1 = w1, ...] >= bound``; duplicate literals have their weights summed."""

    head: int
    body: tuple[tuple[Literal, int], ...]
    bound: int

    def __post_init__(self):
        merged: dict[Literal, int] = {}
        for lit, weight in self.body:
            lit = Literal(int(lit[0]), bool(lit[1]))
            merged[lit] = merged.get(lit, 0) + _check_bound(weight, "weight")
        if sum(merged.values()) > MAX_SUM:
            raise ProgramError("sum of body weights exceeds the 64-bit range")
        body = tuple(sorted(merged.items(), key=lambda item: _lit_key(item[0])))
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "bound", _check_bound(self.bound, "weight bound"))

    @property
    def heads(self) -> tuple[int, ...]:
        return (self.head,)

    @property
    def literals(self) -> tuple[Literal, ...]:
        return tuple(lit for lit, _ in self.body)


Rule = Union[BasicRule, ConstraintRule, ChoiceRule, WeightRule]


def body_literals(rule: Rule) -> tuple[Literal, ...]:
    if isinstance(rule, WeightRule):
        return rule.literals
    return rule.body


def weighted_body(rule: Rule) -> tuple[tuple[Literal, int], ...]:
    """Body as (literal, weight) pairs; unweighted rules get weight 1."""
    if isinstance(rule, WeightRule):
        return rule.body
    return tuple((lit, 1) for lit in rule.body)


def rule_bound(rule: Rule) -> int:
    """Threshold on the weighted body sum at which the rule fires.

    Basic and choice rules need every body literal, so their bound is the body size.
    """
    if isinstance(rule, (ConstraintRule, WeightRule)):
        return rule.bound
    return len(rule.body)


def rule_atoms(rule: Rule) -> set[int]:
    return set(rule.heads) | {lit.atom for lit in body_literals(rule)}


@dataclass(frozen=True)
class Program:
    """An immutable ground program over a named atom table.

    ``atoms[i]`` is the name of atom ``i``. ``assumptions`` is an optional
    initial set of literals stored with the program (``#assume`` in the text format).
    """

    atoms: tuple[str, ...]
    rules: tuple[Rule, ...] = ()
    assumptions: tuple[Literal, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "assumptions", _canonical_body(self.assumptions))
        index = {}
        for i, name in enumerate(atoms):
            if name in index:
                raise ProgramError(f"duplicate atom name {name!r}")
            index[name] = i
        object.__setattr__(self, "_index", index)
        n = len(atoms)
        for rule in self.rules:
            if not isinstance(rule, (BasicRule, ConstraintRule, ChoiceRule, WeightRule)):
                raise ProgramError(f"not a rule: {rule!r}")
            for a in rule_atoms(rule):
                if not 0 <= a < n:
                    raise ProgramError(f"rule {rule!r} references unknown atom {a}")
        for lit in self.assumptions:
            if not 0 <= lit.atom < n:
                raise ProgramError(f"assumption references unknown atom {lit.atom}")

    def __len__(self) -> int:
        return len(self.rules)

    @property
    def num_atoms(self) -> int:
        return len(self.atoms)

    def atom(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown atom {name!r}") from None

    def has_atom(self, name: str) -> bool:
        return name in self._index

    def literal(self, text: str) -> Literal:
        """``"a"`` / ``"not a"`` / ``"-a"`` to a literal of this program."""
        text = text.strip()
        if text.startswith("-"):
            return neg(self.atom(text[1:].strip()))
        if text.startswith("not ") or text.startswith("not\t"):
            return neg(self.atom(text[4:].strip()))
        return pos(self.atom(text))

    def names(self, atoms: Iterable[int]) -> list[str]:
        return sorted(self.atoms[a] for a in atoms)

    def format_literal(self, lit: Literal) -> str:
        return self.atoms[lit.atom] if lit.positive else "not " + self.atoms[lit.atom]

    def with_rules(self, rules: Iterable[Rule]) -> "Program":
        return Program(self.atoms, tuple(rules), self.assumptions)

    def with_assumptions(self, assumptions: Iterable[Literal]) -> "Program":
        return Program(self.atoms, self.rules, tuple(assumptions))


class ProgramBuilder:
    """Incrementally assemble a program, interning atom names in first-use order."""

    def __init__(self):
        self._atoms: list[str] = []
        self._index: dict[str, int] = {}
        self.rules: list[Rule] = []
        self.assumptions: list[Literal] = []

    def atom(self, name: str) -> int:
        if name not in self._index:
            self._index[name] = len(self._atoms)
            self._atoms.append(name)
        return self._index[name]

    def lit(self, text: str) -> Literal:
        text = text.strip()
        if text.startswith("not "):
            return neg(self.atom(text[4:].strip()))
        if text.startswith("-"):
            return neg(self.atom(text[1:].strip()))
        return pos(self.atom(text))

    def basic(self, head: str, *body: str) -> "ProgramBuilder":
        self.rules.append(BasicRule(self.atom(head), tuple(self.lit(b) for b in body)))
        return self

    def constraint(self, head: str, bound: int, *body: str) -> "ProgramBuilder":
        h = self.atom(head)
        self.rules.append(ConstraintRule(h, tuple(self.lit(b) for b in body), bound))
        return self

    def choice(self, heads: Sequence[str], *body: str) -> "ProgramBuilder":
        hs = tuple(self.atom(h) for h in heads)
        self.rules.append(ChoiceRule(hs, tuple(self.lit(b) for b in body)))
        return self

    def weight(self, head: str, bound: int, body: Sequence[tuple[str, int]]) -> "ProgramBuilder":
        h = self.atom(head)
        self.rules.append(WeightRule(h, tuple((self.lit(t), w) for t, w in body), bound))
        return self

    def assume(self, *lits: str) -> "ProgramBuilder":
        self.assumptions.extend(self.lit(t) for t in lits)
        return self

    def build(self) -> Program:
        return Program(tuple(self._atoms), tuple(self.rules), tuple(self.assumptions))


class LiteralSet:
    """A set of literals (partial assignment) split into positive and negative atoms.

    The set is conflict-marked when some atom occurs in both polarities.
    """

    __slots__ = ("pos", "neg")

    def __init__(self, literals: Iterable[Literal] = (), pos: Iterable[int] = (), neg: Iterable[int] = ()):
        self.pos: set[int] = set(pos)
        self.neg: set[int] = set(neg)
        for lit in literals:
            self.add(lit)

    @classmethod
    def from_codes(cls, codes: Iterable[int]) -> "LiteralSet":
        out = cls()
        for c in codes:
            (out.neg if c & 1 else out.pos).add(c >> 1)
        return out

    def add(self, lit: Literal) -> None:
        (self.pos if lit.positive else self.neg).add(lit.atom)

    def update(self, lits: Iterable[Literal]) -> None:
        for lit in lits:
            self.add(lit)

    def __contains__(self, lit: Literal) -> bool:
        return lit.atom in (self.pos if lit.positive else self.neg)

    def __iter__(self) -> Iterator[Literal]:
        for a in sorted(self.pos):
            yield Literal(a, True)
        for a in sorted(self.neg):
            yield Literal(a, False)

    def __len__(self) -> int:
        return len(self.pos) + len(self.neg)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LiteralSet):
            return NotImplemented
        return self.pos == other.pos and self.neg == other.neg

    def __le__(self, other: "LiteralSet") -> bool:
        return self.pos <= other.pos and self.neg <= other.neg

    def __or__(self, other: Union["LiteralSet", Iterable[Literal]]) -> "LiteralSet":
        out = self.copy()
        if isinstance(other, LiteralSet):
            out.pos |= other.pos
            out.neg |= other.neg
        else:
            out.update(other)
        return out

    def __sub__(self, other: "LiteralSet") -> "LiteralSet":
        return LiteralSet(pos=self.pos - other.pos, neg=self.neg - other.neg)

    __hash__ = None

    def __repr__(self) -> str:
        inner = [str(a) for a in sorted(self.pos)] + [f"not {a}" for a in sorted(self.neg)]
        return "LiteralSet({" + ", ".join(inner) + "})"

    def copy(self) -> "LiteralSet":
        return LiteralSet(pos=self.pos, neg=self.neg)

    def codes(self) -> frozenset[int]:
        return frozenset([2 * a for a in self.pos] + [2 * a + 1 for a in self.neg])

    @property
    def conflict(self) -> bool:
        return not self.pos.isdisjoint(self.neg)

    def atoms(self) -> set[int]:
        return self.pos | self.neg

    def saturated(self, num_atoms: int) -> "LiteralSet":
        """Conflict-marked sets compare as the full literal set."""
        if self.conflict:
            full = range(num_atoms)
            return LiteralSet(pos=full, neg=full)
        return self.copy()


def covers(A: LiteralSet, B: Iterable[int]) -> bool:
    assigned = A.pos | A.neg
    return all(b in assigned for b in B)


def agrees(S: Iterable[int], A: LiteralSet) -> bool:
    S = set(S)
    return A.pos <= S and A.neg.isdisjoint(S)


def expand_constraint_rule(rule: ConstraintRule) -> list[BasicRule]:
    """Rewrite ``h :- k {body}`` into the equivalent basic rules, one per k-subset."""
    if not isinstance(rule, ConstraintRule):
        raise ProgramError("expand_constraint_rule expects a constraint rule")
    if len(rule.body) > EXPANSION_GUARD:
        raise ProgramError(
            f"constraint body of {len(rule.body)} literals exceeds expansion guard {EXPANSION_GUARD}"
        )
    return [BasicRule(rule.head, subset) for subset in combinations(rule.body, rule.bound)]
