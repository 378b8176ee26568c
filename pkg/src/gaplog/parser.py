"""Text DSL for programs.

Grammar (LL(1); `//` comments run to end of line; `param` is reserved):

    program   := (statement '.')*
    statement := fact | rule | paramrule
    fact      := annlit '<-'
    rule      := annlit '<-' annlit (',' annlit)*
    annlit    := ['~'] IDENT ':' '[' NUM ',' NUM ']'
    paramrule := 'param' IDENT '(' INT ')' ':' ['~'] IDENT '<-' cand (',' cand)*
    cand      := '?' ['~'] IDENT

NUM is a decimal (`0.8`, `-1`) or an exact rational (`1/3`) and must land on
the configured grid. `param name(m) : h <- ?b, ?~c` declares m parametrized
rules with head h over the listed candidate literals, all gates initially
active.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

from . import lattice
from .errors import OffGridError, ParseError
from .lattice import Interval, LatticeConfig
from .program import (
    INCON,
    AnnotatedLiteral,
    BodyLiteral,
    ConstAnno,
    GatedAndAnno,
    Literal,
    Program,
    Rule,
    SignSumAnno,
    SymbolTable,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<arrow><-)
  | (?P<num>-?\d+(\.\d+)?(/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[.,:\[\]()~?])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind: str, text: str, line: int, col: int):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tok_kind = value if kind == "punct" else kind
            tokens.append(_Token(tok_kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str, cfg: LatticeConfig):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.cfg = cfg
        self.symbols = SymbolTable()
        self.rules: list[Rule] = []
        self.param_names: set[str] = set()

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return tok

    def error(self, message: str, tok: _Token):
        raise ParseError(message, tok.line, tok.col)

    # -- grammar productions -------------------------------------------------

    def program(self) -> Program:
        while self.peek().kind != "eof":
            self.statement()
            self.expect(".")
        return Program(self.cfg, self.symbols, tuple(self.rules))

    def statement(self) -> None:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "param":
            self.param_rule()
        else:
            self.classical_statement()

    def classical_statement(self) -> None:
        head, head_anno = self.annotated_literal()
        self.expect("arrow")
        body: list[BodyLiteral] = []
        seen: set[int] = set()
        while self.peek().kind in ("ident", "~"):
            tok = self.peek()
            lit, anno = self.annotated_literal()
            if lit.index in seen:
                self.error(
                    f"duplicate body literal {self.symbols.literal_name(lit)}", tok
                )
            seen.add(lit.index)
            body.append(BodyLiteral(lit, anno))
            if self.peek().kind == ",":
                self.next()
            else:
                break
        self.rules.append(Rule(head, ConstAnno(head_anno), tuple(body)))

    def param_rule(self) -> None:
        kw = self.next()  # 'param'
        name_tok = self.expect("ident")
        if name_tok.text in self.param_names:
            self.error(f"parametrized rule set {name_tok.text!r} redeclared", name_tok)
        self.param_names.add(name_tok.text)
        self.expect("(")
        count_tok = self.expect("num")
        if not count_tok.text.isdigit() or int(count_tok.text) < 1:
            self.error("rule count must be a positive integer", count_tok)
        count = int(count_tok.text)
        self.expect(")")
        self.expect(":")
        head = self.literal()
        self.expect("arrow")
        body: list[BodyLiteral] = []
        seen: set[int] = set()
        while True:
            tok = self.expect("?")
            lit = self.literal()
            if lit.index in seen:
                self.error(
                    f"duplicate candidate {self.symbols.literal_name(lit)}", tok
                )
            seen.add(lit.index)
            body.append(BodyLiteral(lit))
            if self.peek().kind == ",":
                self.next()
            else:
                break
        if not self.cfg.is_signed:
            self.error("parametrized rules require signed mode", kw)
        theta = tuple([1] * len(body))
        for i in range(1, count + 1):
            self.rules.append(
                Rule(head, GatedAndAnno(), tuple(body), name_tok.text, i, theta)
            )

    def literal(self) -> Literal:
        negated = False
        if self.peek().kind == "~":
            self.next()
            negated = True
        tok = self.expect("ident")
        if tok.text == INCON and negated:
            self.error("~incon is never allowed", tok)
        return Literal(self.symbols.intern(tok.text), negated)

    def annotated_literal(self) -> tuple[Literal, Interval]:
        lit = self.literal()
        self.expect(":")
        anno = self.interval()
        return lit, anno

    def interval(self) -> Interval:
        self.expect("[")
        lo_tok = self.expect("num")
        self.expect(",")
        up_tok = self.expect("num")
        self.expect("]")
        lo = self.number(lo_tok)
        up = self.number(up_tok)
        try:
            return lattice.from_values(self.cfg, lo, up)
        except (OffGridError, ValueError) as exc:
            raise ParseError(str(exc), lo_tok.line, lo_tok.col) from exc

    def number(self, tok: _Token) -> Fraction:
        if "/" in tok.text:
            num, den = tok.text.split("/")
            if int(den) == 0:
                self.error("zero denominator", tok)
            return Fraction(int(num), int(den))
        return Fraction(tok.text)


def parse_program(text: str, cfg: LatticeConfig) -> Program:
    """Parse DSL text into a validated program."""
    return _Parser(text, cfg).program()


def parse_annotated_literal(
    text: str, cfg: LatticeConfig, symbols: Optional[SymbolTable] = None
) -> AnnotatedLiteral:
    """Parse a query like `b:[0.5,1]` against an existing symbol table."""
    parser = _Parser(text, cfg)
    if symbols is not None:
        parser.symbols = symbols.copy()
    lit, anno = parser.annotated_literal()
    parser.expect("eof")
    return AnnotatedLiteral(lit, anno)


# -- serialization ----------------------------------------------------------


def serialize(program: Program) -> str:
    """Canonical DSL text; parse(serialize(p)) is structurally equal to p.

    Parametrized rules are emitted as one `param` statement per set, which
    requires all gates at their initial all-active state: the DSL carries no
    θ syntax, so trained programs must be pruned before export.
    """
    cfg = program.cfg
    if cfg.is_signed:
        header = "// gaplog program (signed)"
    else:
        header = f"// gaplog program (unit, N={cfg.resolution})"
    lines = [header]
    emitted_params: set[str] = set()
    for rule in program.rules:
        if rule.is_parametrized:
            if rule.param_name in emitted_params:
                continue
            members = [
                r for r in program.rules if r.param_name == rule.param_name
            ]
            for member in members:
                if any(t != 1 for t in member.theta):
                    raise ValueError(
                        f"parametrized set {rule.param_name!r} has trained θ; "
                        "prune() the program before serializing"
                    )
                if member.body != rule.body or member.head != rule.head:
                    raise ValueError(
                        f"parametrized set {rule.param_name!r} is not uniform"
                    )
            cands = ", ".join(
                "?" + program.symbols.literal_name(e.lit) for e in rule.body
            )
            lines.append(
                f"param {rule.param_name}({len(members)}) : "
                f"{program.symbols.literal_name(rule.head)} <- {cands}."
            )
            emitted_params.add(rule.param_name)
            continue
        head_name = program.symbols.literal_name(rule.head)
        if isinstance(rule.head_anno, ConstAnno):
            head_text = f"{head_name} : {rule.head_anno.interval}"
        else:
            raise ValueError("only constant-head rules are expressible in the DSL")
        if not rule.body:
            lines.append(f"{head_text} <- .")
        else:
            parts = []
            for entry in rule.body:
                if entry.anno is None:
                    raise ValueError("binding-pattern bodies are not expressible")
                parts.append(f"{program.symbols.literal_name(entry.lit)} : {entry.anno}")
            lines.append(f"{head_text} <- {', '.join(parts)}.")
    return "\n".join(lines) + "\n"
