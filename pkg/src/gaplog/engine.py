"""Semantics: interpretations, satisfaction, the consequence operator,
bounded fixpoint iteration, entailment, consistency checking, and an
exhaustive model-enumeration oracle for small instances.

An interpretation stores one lower bound per literal; the upper bound of a
literal is derived from its partner (upper(l) = N - lower(~l)), so the
coupling I(a) = not(I(~a)) holds by construction and rules only ever raise
lower bounds. One application of the consequence operator updates every
literal synchronously from the same input state. Inconsistency surfaces in
two ways that provably flag the same programs: a conflict witness during
some application (two head annotations with no common upper bound, or an
atom whose paired lower bounds cross), and the reserved incon atom reaching
[1,1] in the program augmented with the inconsistency rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import _kernels, lattice
from ._kernels import compiled
from .errors import (
    InconsistentProgramError,
    InternalInvariantError,
    OracleTooLargeError,
    UndefinedSatisfactionError,
)
from .lattice import Interval, LatticeConfig
from .program import (
    AnnotatedLiteral,
    ConstAnno,
    GatedAndAnno,
    Literal,
    Program,
    Rule,
    SignSumAnno,
    add_inconsistency_rules,
)


@dataclass(frozen=True)
class Interpretation:
    """Per-literal lower bounds as grid coordinates."""

    cfg: LatticeConfig
    lowers: tuple[int, ...]

    @staticmethod
    def bottom(program: Program) -> Interpretation:
        return Interpretation(program.cfg, (0,) * program.n_literals)

    @staticmethod
    def from_pairs(cfg: LatticeConfig, pairs) -> Interpretation:
        lowers = []
        for p, q in pairs:
            lowers.extend((p, q))
        return Interpretation(cfg, tuple(lowers))

    @property
    def n_atoms(self) -> int:
        return len(self.lowers) // 2

    def lower_pos(self, atom: int) -> int:
        return self.lowers[2 * atom]

    def lower_neg(self, atom: int) -> int:
        return self.lowers[2 * atom + 1]

    def raw_bounds(self, lit: Literal) -> tuple[int, int]:
        """(lower, upper) coordinates; upper may undercut lower if conflicted."""
        idx = lit.index
        return self.lowers[idx], self.cfg.resolution - self.lowers[idx ^ 1]

    def value(self, lit: Literal) -> Interval:
        lo, hi = self.raw_bounds(lit)
        if lo > hi:
            raise UndefinedSatisfactionError(
                f"atom {lit.atom} is conflicted: bounds ({lo},{hi})"
            )
        return Interval(lo, hi, self.cfg)

    def conflicted_atoms(self) -> list[int]:
        n = self.cfg.resolution
        return [
            a
            for a in range(self.n_atoms)
            if self.lowers[2 * a] + self.lowers[2 * a + 1] > n
        ]

    @property
    def is_conflict_free(self) -> bool:
        return not self.conflicted_atoms()

    def preceq(self, other: Interpretation) -> bool:
        """Pointwise knowledge order over all literals."""
        return all(a <= b for a, b in zip(self.lowers, other.lowers))

    def signed(self) -> tuple[int, ...]:
        """Lower bounds as {-1,1} values (signed mode only)."""
        return tuple(2 * v - 1 for v in self.lowers)


@dataclass(frozen=True)
class ConflictWitness:
    atom: int
    mu: Interval
    mu_prime: Interval
    kind: int  # _kernels.CONFLICT_ANNOSET or CONFLICT_CROSS


@dataclass(frozen=True)
class ConflictReport:
    witnesses: tuple[ConflictWitness, ...]
    iteration: Optional[int] = None


@dataclass
class FixpointResult:
    program: Program
    final: Interpretation
    iterations: int
    consistent: bool
    conflict: Optional[ConflictReport] = None
    incon_true: bool = False
    incon_iteration: int = -1
    trace: Optional[list[Interpretation]] = None

    @property
    def conflict_witnesses(self) -> tuple[ConflictWitness, ...]:
        return () if self.conflict is None else self.conflict.witnesses


def _witnesses(cfg: LatticeConfig, raw, with_iteration: bool) -> ConflictReport:
    out = []
    iteration = None
    for tup in raw:
        if with_iteration:
            kind, iteration, atom, lo1, hi1, lo2, hi2 = tup
        else:
            kind, atom, lo1, hi1, lo2, hi2 = tup
        out.append(
            ConflictWitness(
                atom, Interval(lo1, hi1, cfg), Interval(lo2, hi2, cfg), kind
            )
        )
    return ConflictReport(tuple(out), iteration)


# -- satisfaction -------------------------------------------------------------


def head_value(program: Program, rule: Rule, interp: Interpretation) -> Interval:
    """The head annotation a rule contributes under the given state."""
    n = program.cfg.resolution
    anno = rule.head_anno
    if isinstance(anno, ConstAnno):
        iv = anno.interval
        return iv if iv.cfg == program.cfg else lattice.convert(iv, program.cfg)
    if isinstance(anno, GatedAndAnno):
        fires = all(
            t != 1 or interp.lowers[e.lit.index] == n
            for e, t in zip(rule.body, rule.theta)
        )
        return Interval(n, n, program.cfg) if fires else lattice.bottom(program.cfg)
    if isinstance(anno, SignSumAnno):
        x = interp.lowers[rule.body[0].lit.index]
        y = interp.lowers[rule.body[1].lit.index]
        fires = x + y > n
        return Interval(n, n, program.cfg) if fires else lattice.bottom(program.cfg)
    raise TypeError(f"unknown head annotation {anno!r}")


def body_satisfied(rule: Rule, interp: Interpretation) -> bool:
    """Binding-pattern entries are always satisfied; constants need μ ⊑ I(l)."""
    for entry in rule.body:
        if entry.anno is None:
            continue
        if not lattice.leq(entry.anno, interp.value(entry.lit)):
            return False
    return True


def satisfies(
    interp: Interpretation, target: Union[AnnotatedLiteral, Rule, Program],
    program: Optional[Program] = None,
) -> bool:
    """I ⊨ target for an annotated literal, a single rule, or a whole program.

    Rule satisfaction needs the owning program for grid context; passing a
    Program as the target checks every rule.
    """
    if not interp.is_conflict_free:
        raise UndefinedSatisfactionError(
            f"satisfaction is undefined on conflicted atoms {interp.conflicted_atoms()}"
        )
    if isinstance(target, AnnotatedLiteral):
        anno = target.anno
        if anno.cfg != interp.cfg:
            anno = lattice.convert(anno, interp.cfg)
        return lattice.leq(anno, interp.value(target.lit))
    if isinstance(target, Rule):
        if program is None:
            raise ValueError("rule satisfaction needs the owning program")
        if not body_satisfied(target, interp):
            return True
        mu = head_value(program, target, interp)
        return lattice.leq(mu, interp.value(target.head))
    if isinstance(target, Program):
        return all(satisfies(interp, rule, target) for rule in target.rules)
    raise TypeError(f"cannot check satisfaction of {target!r}")


# -- consequence operator and fixpoint ---------------------------------------


def immediate_consequence(
    program: Program, interp: Interpretation
) -> Union[Interpretation, ConflictReport]:
    """One synchronous application of the rule-firing operator.

    Every literal's new lower bound is the supremum of its current value and
    the annotations of its fired rules (a head [l,u] also raises the
    negation's lower bound to N-u). Returns a ConflictReport instead of a
    state when the collected annotations of some literal admit no common
    upper bound or an atom's paired bounds cross.
    """
    if not interp.is_conflict_free:
        raise UndefinedSatisfactionError("input interpretation is conflicted")
    cp = compiled(program)
    new_low, conflicts = _kernels.apply_once(cp, interp.lowers)
    if conflicts:
        return _witnesses(program.cfg, conflicts, with_iteration=False)
    return Interpretation(program.cfg, tuple(new_low))


def _run(program: Program, strict: bool, record_states: bool):
    cp = compiled(program)
    status, lowers, iterations, conflicts, incon_iter, states = _kernels.run_fixpoint(
        cp, strict, record_states
    )
    if status == _kernels.STATUS_BOUND_EXCEEDED:
        raise InternalInvariantError(
            f"fixpoint did not converge within {cp.max_iters} applications"
        )
    return status, lowers, iterations, conflicts, incon_iter, states


def least_fixpoint(program: Program, traced: bool = False) -> FixpointResult:
    """Iterate from all-bottom; halt at the fixpoint or the first conflict.

    A consistent program converges within height*|literals| applications
    (the final application confirms no change and is counted); exceeding the
    bound raises an internal invariant error.
    """
    status, lowers, iterations, conflicts, incon_iter, states = _run(
        program, strict=True, record_states=traced
    )
    conflicted = status == _kernels.STATUS_CONFLICT
    incon_true = incon_iter >= 0
    result = FixpointResult(
        program=program,
        final=Interpretation(program.cfg, tuple(lowers)),
        iterations=iterations,
        consistent=not (conflicted or incon_true),
        conflict=_witnesses(program.cfg, conflicts, True) if conflicts else None,
        incon_true=incon_true,
        incon_iteration=incon_iter,
        trace=None
        if states is None
        else [Interpretation(program.cfg, tuple(s)) for s in states],
    )
    return result


def iterate_states(program: Program, steps: int) -> list[Interpretation]:
    """The first `steps` iterates of the operator, run permissively.

    Conflicted states are included as raw lower-bound vectors (this is what
    the unrolled network computes); once the fixpoint is reached the final
    state repeats.
    """
    _, _, _, _, _, states = _run(program, strict=False, record_states=True)
    out = [Interpretation(program.cfg, tuple(s)) for s in states]
    while len(out) < steps:
        out.append(out[-1] if out else Interpretation.bottom(program))
    return out[:steps]


def entails(program: Program, query: AnnotatedLiteral) -> bool:
    """Does every model satisfy the query literal? Defined only when consistent."""
    result = least_fixpoint(program)
    if not result.consistent:
        raise InconsistentProgramError(
            "entailment is undefined for inconsistent programs",
            report=result.conflict,
        )
    anno = query.anno
    if anno.cfg != program.cfg:
        anno = lattice.convert(anno, program.cfg)
    if query.lit.atom >= program.n_atoms:
        # Unknown atom: its value is bottom in every model.
        return anno.is_bottom
    return lattice.leq(anno, result.final.value(query.lit))


def check_consistency(program: Program) -> FixpointResult:
    """Run the incon-augmented program permissively and read both detectors.

    The conflict-witness path and the incon path must agree program by
    program; a disagreement raises an internal invariant error. The returned
    result belongs to the augmented program (`result.program`), and its
    final state is the full lower-bound fixpoint even past a conflict.
    """
    augmented = add_inconsistency_rules(program)
    status, lowers, iterations, conflicts, incon_iter, _ = _run(
        augmented, strict=False, record_states=False
    )
    incon_true = incon_iter >= 0
    witnessed = bool(conflicts)
    if witnessed != incon_true:
        raise InternalInvariantError(
            f"conflict witnesses ({witnessed}) and incon ({incon_true}) disagree"
        )
    return FixpointResult(
        program=augmented,
        final=Interpretation(augmented.cfg, tuple(lowers)),
        iterations=iterations,
        consistent=not (witnessed or incon_true),
        conflict=_witnesses(augmented.cfg, conflicts, True) if conflicts else None,
        incon_true=incon_true,
        incon_iteration=incon_iter,
    )


# -- exhaustive oracle --------------------------------------------------------


@dataclass
class ModelSearchResult:
    model_count: int
    models: Optional[list[Interpretation]]
    entailed_bounds: Optional[dict[Literal, Interval]]

    @property
    def consistent(self) -> bool:
        return self.model_count > 0


def enumerate_models(
    program: Program, cap: int = 10_000_000, collect_models: bool = True
) -> ModelSearchResult:
    """Enumerate every conflict-free interpretation and filter the models.

    entailed_bounds maps each literal to the greatest annotation entailed in
    every model (the componentwise meet of the model values); it is None when
    there is no model. The per-atom state count is (N+1)(N+2)/2, and the
    total space must stay within `cap`.
    """
    cp = compiled(program)
    n = program.cfg.resolution
    per_atom = (n + 1) * (n + 2) // 2
    space = per_atom ** cp.n_atoms
    if space > cap:
        raise OracleTooLargeError(f"search space {space} exceeds cap {cap}")
    count, min_low, models = _kernels.brute_force_scan(cp, collect_models)
    bounds = None
    if count > 0:
        bounds = {}
        for lit in program.literals():
            lo = min_low[lit.index]
            hi = n - min_low[lit.index ^ 1]
            bounds[lit] = Interval(lo, hi, program.cfg)
    return ModelSearchResult(
        model_count=count,
        models=None
        if models is None
        else [Interpretation(program.cfg, m) for m in models],
        entailed_bounds=bounds,
    )
