"""Abstract syntax for annotated logic programs.

A program is a finite set of rules `head:μ <- l1:μ1, ..., lm:μm` over ground
literals. Heads carry one of three annotation forms: a constant interval, the
gated-AND of the body's lower bounds (parametrized rules, whose θ weights
gate individual body literals), or the sign of the sum of two lower bounds
(the generated inconsistency rules). Body entries of the latter two forms are
binding patterns: they are always satisfied and merely expose the current
lower bound of their literal to the head function.

The reserved atom ``incon`` is the inconsistency flag: `add_inconsistency_rules`
installs one bottom-annotated fact plus one sign-sum rule per atom, so incon
reaches [1,1] exactly when some atom's lower bound and its negation's lower
bound cross.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Union

from . import lattice
from .errors import ReservedSymbolError
from .lattice import Interval, LatticeConfig

INCON = "incon"


@dataclass(frozen=True)
class Literal:
    """A ground atom or its negation, by dense atom id."""

    atom: int
    negated: bool = False

    @property
    def index(self) -> int:
        """Literal id: positive literals are even, negations odd."""
        return 2 * self.atom + (1 if self.negated else 0)

    def negate(self) -> Literal:
        return Literal(self.atom, not self.negated)

    @staticmethod
    def from_index(idx: int) -> Literal:
        return Literal(idx // 2, bool(idx % 2))


class SymbolTable:
    """Dense atom-name interning; ids are stable insertion order."""

    def __init__(self):
        self._names: list[str] = []
        self._ids: dict[str, int] = {}

    def intern(self, name: str) -> int:
        idx = self._ids.get(name)
        if idx is None:
            idx = len(self._names)
            self._names.append(name)
            self._ids[name] = idx
        return idx

    def lookup(self, name: str) -> Optional[int]:
        return self._ids.get(name)

    def name(self, atom: int) -> str:
        return self._names[atom]

    def __len__(self) -> int:
        return len(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._ids

    def names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def literal_name(self, lit: Literal) -> str:
        return ("~" if lit.negated else "") + self.name(lit.atom)

    def parse_literal(self, text: str, intern: bool = False) -> Optional[Literal]:
        """Resolve a `~`-prefixed literal name; None if the atom is unknown."""
        negated = text.startswith("~")
        name = text[1:] if negated else text
        if intern:
            return Literal(self.intern(name), negated)
        atom = self.lookup(name)
        return None if atom is None else Literal(atom, negated)

    def copy(self) -> SymbolTable:
        other = SymbolTable()
        other._names = list(self._names)
        other._ids = dict(self._ids)
        return other


class AnnotationExpr:
    """Marker base for head annotation forms."""


@dataclass(frozen=True)
class ConstAnno(AnnotationExpr):
    interval: Interval


@dataclass(frozen=True)
class GatedAndAnno(AnnotationExpr):
    """Head lower bound = sign(relu(1 + sum_j (1+θ_j)(x_j-1)/2)), upper = 1."""


@dataclass(frozen=True)
class SignSumAnno(AnnotationExpr):
    """Head lower bound = sign(x + y) over the two body lower bounds, upper = 1."""


@dataclass(frozen=True)
class BodyLiteral:
    lit: Literal
    anno: Optional[Interval] = None  # None = binding pattern (always satisfied)


@dataclass(frozen=True)
class Rule:
    head: Literal
    head_anno: AnnotationExpr
    body: tuple[BodyLiteral, ...] = ()
    # Parametrized rules only: set name, 1-based index within the set, θ gates.
    param_name: Optional[str] = None
    param_index: int = 0
    theta: Optional[tuple[int, ...]] = None

    @property
    def is_parametrized(self) -> bool:
        return self.theta is not None

    @property
    def is_fact(self) -> bool:
        return not self.body and isinstance(self.head_anno, ConstAnno)


@dataclass(frozen=True)
class AnnotatedLiteral:
    """A ground literal with a constant annotation (query form)."""

    lit: Literal
    anno: Interval


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    rule_index: Optional[int] = None

    def __str__(self) -> str:
        where = "" if self.rule_index is None else f" (rule {self.rule_index})"
        return f"{self.code}{where}: {self.message}"


@dataclass
class Program:
    """Validated rule set plus its symbol table; treat as immutable."""

    cfg: LatticeConfig
    symbols: SymbolTable
    rules: tuple[Rule, ...] = ()
    _index: Optional[dict[int, tuple[int, ...]]] = field(
        default=None, repr=False, compare=False
    )

    @property
    def n_atoms(self) -> int:
        return len(self.symbols)

    @property
    def n_literals(self) -> int:
        return 2 * len(self.symbols)

    def rules_for(self, lit: Literal) -> tuple[Rule, ...]:
        return tuple(self.rules[i] for i in self.rule_indices_for(lit))

    def rule_indices_for(self, lit: Literal) -> tuple[int, ...]:
        if self._index is None:
            index: dict[int, list[int]] = {}
            for i, rule in enumerate(self.rules):
                index.setdefault(rule.head.index, []).append(i)
            self._index = {k: tuple(v) for k, v in index.items()}
        return self._index.get(lit.index, ())

    def rule_count_for(self, lit: Literal) -> int:
        """m_lit: number of rules (including facts) with this head."""
        return len(self.rule_indices_for(lit))

    def literals(self) -> list[Literal]:
        return [Literal.from_index(i) for i in range(self.n_literals)]

    def incon_atom(self) -> Optional[int]:
        return self.symbols.lookup(INCON)


def validate(program: Program) -> list[Diagnostic]:
    """Structural diagnostics; an empty list means all invariants hold."""
    diags: list[Diagnostic] = []
    cfg = program.cfg
    incon_atom = program.incon_atom()

    def check_lit(i: int, lit: Literal) -> None:
        if incon_atom is not None and lit.atom == incon_atom and lit.negated:
            diags.append(Diagnostic("reserved-negation", "~incon is never allowed", i))

    def check_anno(i: int, anno: Interval, what: str) -> None:
        if anno.cfg != cfg:
            try:
                lattice.convert(anno, cfg)
            except Exception:
                diags.append(
                    Diagnostic(
                        "off-grid",
                        f"{what} annotation {anno} is not representable at "
                        f"{cfg.mode.value} resolution {cfg.resolution}",
                        i,
                    )
                )

    for i, rule in enumerate(program.rules):
        check_lit(i, rule.head)
        seen: set[int] = set()
        for entry in rule.body:
            check_lit(i, entry.lit)
            if entry.lit.index in seen:
                diags.append(
                    Diagnostic(
                        "duplicate-body-literal",
                        f"literal {program.symbols.literal_name(entry.lit)} repeats in the body",
                        i,
                    )
                )
            seen.add(entry.lit.index)
            if entry.anno is not None:
                check_anno(i, entry.anno, "body")

        if isinstance(rule.head_anno, ConstAnno):
            check_anno(i, rule.head_anno.interval, "head")
            if rule.is_parametrized:
                diags.append(
                    Diagnostic("bad-kind", "parametrized rule with constant head", i)
                )
            if any(entry.anno is None for entry in rule.body):
                diags.append(
                    Diagnostic(
                        "bad-body",
                        "classical rule bodies need constant annotations",
                        i,
                    )
                )
        elif isinstance(rule.head_anno, GatedAndAnno):
            if not rule.is_parametrized:
                diags.append(
                    Diagnostic("bad-kind", "gated-AND head on a non-parametrized rule", i)
                )
            if not cfg.is_signed:
                diags.append(
                    Diagnostic("bad-mode", "parametrized rules require signed mode", i)
                )
            if not rule.body:
                diags.append(
                    Diagnostic("arity", "parametrized rule needs at least one candidate", i)
                )
        elif isinstance(rule.head_anno, SignSumAnno):
            if rule.is_parametrized:
                diags.append(Diagnostic("bad-kind", "sign-sum rules carry no θ", i))
            if len(rule.body) != 2:
                diags.append(
                    Diagnostic("arity", "sign-sum head reads exactly two lower bounds", i)
                )
            elif incon_atom is None or rule.head.atom != incon_atom or rule.head.negated:
                diags.append(
                    Diagnostic("bad-kind", "sign-sum heads are reserved for incon", i)
                )
        else:
            diags.append(Diagnostic("bad-kind", "unknown head annotation form", i))

        if rule.is_parametrized:
            if len(rule.theta) != len(rule.body):
                diags.append(
                    Diagnostic(
                        "arity",
                        f"θ length {len(rule.theta)} != body length {len(rule.body)}",
                        i,
                    )
                )
            if any(t not in (-1, 1) for t in rule.theta):
                diags.append(Diagnostic("bad-theta", "θ entries must be -1 or 1", i))
            if any(entry.anno is not None for entry in rule.body):
                diags.append(
                    Diagnostic(
                        "bad-body",
                        "parametrized bodies are binding patterns without annotations",
                        i,
                    )
                )

    return diags


def validate_or_raise(program: Program) -> Program:
    diags = validate(program)
    if diags:
        raise ValueError("; ".join(str(d) for d in diags))
    return program


def prune(program: Program) -> Program:
    """Erase θ=-1 candidates from every parametrized rule.

    Survivors become classical conditions l:[1,1]; a rule whose candidates
    are all erased fires unconditionally and becomes the fact head:[1,1].
    """
    tt = lattice.true_top(program.cfg)
    new_rules = []
    for rule in program.rules:
        if not rule.is_parametrized:
            new_rules.append(rule)
            continue
        kept = tuple(
            BodyLiteral(entry.lit, tt)
            for entry, t in zip(rule.body, rule.theta)
            if t == 1
        )
        new_rules.append(Rule(rule.head, ConstAnno(tt), kept))
    return Program(program.cfg, program.symbols, tuple(new_rules))


def with_thetas(
    program: Program, thetas: Mapping[tuple[str, int], Iterable[int]]
) -> Program:
    """Copy of the program with θ vectors substituted per (set name, index)."""
    new_rules = []
    for rule in program.rules:
        if rule.is_parametrized and (rule.param_name, rule.param_index) in thetas:
            theta = tuple(thetas[(rule.param_name, rule.param_index)])
            if len(theta) != len(rule.body):
                raise ValueError(
                    f"θ length {len(theta)} != candidate count {len(rule.body)} "
                    f"for {rule.param_name}({rule.param_index})"
                )
            new_rules.append(replace(rule, theta=theta))
        else:
            new_rules.append(rule)
    return Program(program.cfg, program.symbols, tuple(new_rules))


def param_rules(program: Program) -> list[int]:
    """Indices of parametrized rules, in program order."""
    return [i for i, r in enumerate(program.rules) if r.is_parametrized]


def add_inconsistency_rules(program: Program) -> Program:
    """Install the incon fact and one sign-sum rule per ground atom.

    The fact annotates incon with bottom; each sign-sum rule drives incon to
    [1,1] once lower(a) + lower(~a) crosses the grid bound. Errors if the
    program already defines incon itself.
    """
    existing = program.incon_atom()
    if existing is not None:
        for rule in program.rules:
            if rule.head.atom == existing:
                raise ReservedSymbolError(
                    "incon is reserved: the program already defines rules for it"
                )
    symbols = program.symbols.copy()
    plain_atoms = [a for a in range(len(symbols)) if symbols.name(a) != INCON]
    incon = Literal(symbols.intern(INCON))
    new_rules = list(program.rules)
    new_rules.append(Rule(incon, ConstAnno(lattice.bottom(program.cfg))))
    for atom in plain_atoms:
        new_rules.append(
            Rule(
                incon,
                SignSumAnno(),
                (BodyLiteral(Literal(atom)), BodyLiteral(Literal(atom, True))),
            )
        )
    return Program(program.cfg, symbols, tuple(new_rules))


def make_program(
    cfg: LatticeConfig,
    atoms: Iterable[str],
    rules: Iterable[Rule] = (),
) -> Program:
    """Convenience constructor used by tests and generators."""
    symbols = SymbolTable()
    for name in atoms:
        symbols.intern(name)
    return Program(cfg, symbols, tuple(rules))
