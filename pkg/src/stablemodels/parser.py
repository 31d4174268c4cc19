"""Text format for ground programs.

Grammar (whitespace between tokens is free, ``%`` starts a line comment)::

    program    := statement*
    statement  := "#atoms" [name ("," name)*] "."
                | "#assume" [literal ("," literal)*] "."
                | name "."                                   fact
                | name ":-" [literal ("," literal)*] "."      basic rule
                | name ":-" int "{" [literal ("," literal)*] "}" "."
                | "{" name ("," name)* "}" [":-" [literal ("," literal)*]] "."
                | name ":-" "[" [literal "=" int ("," ...)*] "]" ">=" int "."
    literal    := name | "not" name
    name       := [A-Za-z_][A-Za-z0-9_]*     ("not" is reserved)

Atoms are numbered in order of first appearance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .program import (
    MAX_SUM,
    BasicRule,
    ChoiceRule,
    ConstraintRule,
    Literal,
    Program,
    ProgramBuilder,
    Rule,
    WeightRule,
)

SYNTAX = "syntax"
NEGATIVE_WEIGHT = "negative weight"
DUPLICATE_ATOM = "duplicate atom declaration"
OVERFLOW = "overflow"


class ParseError(ValueError):
    def __init__(self, line: int, column: int, kind: str, message: str):
        super().__init__(f"{line}:{column}: {kind}: {message}")
        self.line = line
        self.column = column
        self.kind = kind
        self.message = message


_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<directive>\#[A-Za-z]+)
  | (?P<int>-?[0-9]+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>:-)
  | (?P<geq>>=)
  | (?P<punct>[.,{}\[\]=])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokens(text: str) -> Iterator[_Tok]:
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(line, i - line_start + 1, SYNTAX, f"unexpected character {text[i]!r}")
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tok_kind = m.group() if kind == "punct" else kind
            yield _Tok(tok_kind, m.group(), line, i - line_start + 1)
        i = m.end()


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokens(text))
        self.pos = 0
        self.builder = ProgramBuilder()
        self.declared: set[str] = set()
        end_line = text.count("\n") + 1
        self.eof = _Tok("eof", "", end_line, len(text) - text.rfind("\n"))

    def peek(self, offset: int = 0) -> _Tok:
        i = self.pos + offset
        return self.toks[i] if i < len(self.toks) else self.eof

    def next(self) -> _Tok:
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, tok: _Tok, message: str, kind: str = SYNTAX):
        raise ParseError(tok.line, tok.col, kind, message)

    def expect(self, kind: str) -> _Tok:
        tok = self.next()
        if tok.kind != kind:
            shown = tok.text or "end of input"
            self.error(tok, f"expected {kind!r}, found {shown!r}")
        return tok

    def accept(self, kind: str) -> bool:
        if self.peek().kind == kind:
            self.pos += 1
            return True
        return False

    def name(self) -> str:
        tok = self.expect("name")
        if tok.text == "not":
            self.error(tok, "'not' is reserved and cannot name an atom")
        return tok.text

    def integer(self, what: str) -> int:
        tok = self.expect("int")
        value = int(tok.text)
        if value < 0:
            self.error(tok, f"{what} must be nonnegative, got {value}", NEGATIVE_WEIGHT)
        if value > MAX_SUM:
            self.error(tok, f"{what} exceeds the 64-bit range", OVERFLOW)
        return value

    def literal(self) -> Literal:
        tok = self.peek()
        if tok.kind == "name" and tok.text == "not" and self.peek(1).kind == "name":
            self.pos += 1
            return Literal(self.builder.atom(self.name()), False)
        return Literal(self.builder.atom(self.name()), True)

    def literal_list(self, closer: str) -> list[Literal]:
        out: list[Literal] = []
        if self.peek().kind == closer:
            return out
        out.append(self.literal())
        while self.accept(","):
            out.append(self.literal())
        return out

    def parse(self) -> Program:
        rules: list[Rule] = []
        while self.peek().kind != "eof":
            rule = self.statement()
            if rule is not None:
                rules.append(rule)
        b = self.builder
        b.rules = rules
        return b.build()

    def statement(self) -> Optional[Rule]:
        tok = self.peek()
        if tok.kind == "directive":
            self.directive()
            return None
        if tok.kind == "{":
            return self.choice()
        if tok.kind != "name":
            self.error(tok, f"expected a rule, found {tok.text or 'end of input'!r}")
        head = self.builder.atom(self.name())
        if self.accept("."):
            return BasicRule(head, ())
        self.expect("arrow")
        nxt = self.peek()
        if nxt.kind == "int":
            bound = self.integer("constraint bound")
            self.expect("{")
            body = self.literal_list("}")
            self.expect("}")
            self.expect(".")
            return ConstraintRule(head, tuple(body), bound)
        if nxt.kind == "[":
            return self.weight(head)
        body = self.literal_list(".")
        self.expect(".")
        return BasicRule(head, tuple(body))

    def choice(self) -> ChoiceRule:
        self.expect("{")
        heads = [self.builder.atom(self.name())]
        while self.accept(","):
            heads.append(self.builder.atom(self.name()))
        self.expect("}")
        body: list[Literal] = []
        if self.accept("arrow"):
            body = self.literal_list(".")
        self.expect(".")
        return ChoiceRule(tuple(heads), tuple(body))

    def weight(self, head: int) -> WeightRule:
        start = self.expect("[")
        body: list[tuple[Literal, int]] = []
        if self.peek().kind != "]":
            while True:
                lit = self.literal()
                self.expect("=")
                body.append((lit, self.integer("weight")))
                if not self.accept(","):
                    break
        self.expect("]")
        self.expect("geq")
        bound = self.integer("weight bound")
        self.expect(".")
        if sum(w for _, w in body) > MAX_SUM:
            self.error(start, "sum of body weights exceeds the 64-bit range", OVERFLOW)
        return WeightRule(head, tuple(body), bound)

    def directive(self) -> None:
        tok = self.next()
        if tok.text == "#atoms":
            if self.peek().kind != ".":
                while True:
                    ntok = self.peek()
                    name = self.name()
                    if name in self.declared:
                        self.error(ntok, f"atom {name!r} declared twice", DUPLICATE_ATOM)
                    self.declared.add(name)
                    self.builder.atom(name)
                    if not self.accept(","):
                        break
            self.expect(".")
        elif tok.text == "#assume":
            lits = self.literal_list(".")
            self.expect(".")
            self.builder.assumptions.extend(lits)
        else:
            self.error(tok, f"unknown directive {tok.text!r}")


def parse_program(text: str) -> Program:
    return _Parser(text).parse()


def _fmt_lit(P: Program, lit: Literal) -> str:
    return P.format_literal(lit)


def format_rule(P: Program, r: Rule) -> str:
    name = P.atoms
    if isinstance(r, BasicRule):
        if not r.body:
            return f"{name[r.head]}."
        return f"{name[r.head]} :- " + ", ".join(_fmt_lit(P, l) for l in r.body) + "."
    if isinstance(r, ConstraintRule):
        inner = ", ".join(_fmt_lit(P, l) for l in r.body)
        return f"{name[r.head]} :- {r.bound} {{ {inner} }}." if inner else f"{name[r.head]} :- {r.bound} {{ }}."
    if isinstance(r, ChoiceRule):
        heads = "{ " + ", ".join(name[h] for h in r.heads) + " }"
        if not r.body:
            return heads + "."
        return heads + " :- " + ", ".join(_fmt_lit(P, l) for l in r.body) + "."
    if isinstance(r, WeightRule):
        inner = ", ".join(f"{_fmt_lit(P, l)} = {w}" for l, w in r.body)
        inner = f"[ {inner} ]" if inner else "[ ]"
        return f"{name[r.head]} :- {inner} >= {r.bound}."
    raise TypeError(f"not a rule: {r!r}")


def serialize_program(P: Program) -> str:
    """Canonical text; ``parse_program`` of the result rebuilds an identical program."""
    lines = []
    if P.atoms:
        lines.append("#atoms " + ", ".join(P.atoms) + ".")
    if P.assumptions:
        lines.append("#assume " + ", ".join(_fmt_lit(P, l) for l in P.assumptions) + ".")
    lines.extend(format_rule(P, r) for r in P.rules)
    return "".join(line + "\n" for line in lines)
