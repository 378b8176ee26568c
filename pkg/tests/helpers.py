"""Independent oracles and small builders shared by the test modules.

Everything here deliberately avoids the code paths it is used to check:
the guarded-AND oracle never touches the arithmetic activation, the chain
search walks the raw order relation, and the model oracle enumerates
interpretations through the public satisfaction API rather than the
compiled scan.
"""

from __future__ import annotations

import itertools
import random

from gaplog import lattice
from gaplog.engine import Interpretation, satisfies
from gaplog.lattice import Interval, LatticeConfig
from gaplog.parser import parse_program
from gaplog.program import Program, with_thetas


def and_oracle(theta, x) -> int:
    """1 iff every gated-on input is 1 (empty gate set gives 1)."""
    for t, v in zip(theta, x):
        if t == 1 and v != 1:
            return -1
    return 1


def signed_program(text: str) -> Program:
    return parse_program(text, lattice.SIGNED)


def unit_program(text: str, n: int) -> Program:
    return parse_program(text, lattice.unit(n))


def hasse_longest_chain(cfg: LatticeConfig) -> int:
    """Longest bottom-to-top chain length by depth-first search over the
    strict order (memoized); counts elements including both endpoints."""
    elems = lattice.elements(cfg)
    above = {
        a: [b for b in elems if a != b and lattice.leq(a, b)] for a in elems
    }
    memo: dict[Interval, int] = {}

    def depth(e: Interval) -> int:
        if e not in memo:
            memo[e] = 1 + max((depth(b) for b in above[e]), default=0)
        return memo[e]

    return depth(lattice.bottom(cfg))


def reference_models(program: Program) -> list[Interpretation]:
    """Model enumeration through the public satisfaction API."""
    n = program.cfg.resolution
    pairs = [(p, q) for p in range(n + 1) for q in range(n + 1 - p)]
    out = []
    for combo in itertools.product(pairs, repeat=program.n_atoms):
        interp = Interpretation.from_pairs(program.cfg, combo)
        if satisfies(interp, program):
            out.append(interp)
    return out


def all_active(program: Program) -> Program:
    """Copy with every θ reset to all-ones (the DSL-expressible state)."""
    thetas = {
        (r.param_name, r.param_index): tuple([1] * len(r.body))
        for r in program.rules
        if r.is_parametrized
    }
    return with_thetas(program, thetas)


def name_structure(program: Program):
    """Rules as name-keyed tuples: the structure the text format carries.

    Atom ids depend on interning order and unused atoms are not expressible,
    so textual round-trips are compared on this view.
    """
    out = []
    for rule in program.rules:
        head = program.symbols.literal_name(rule.head)
        body = tuple(
            (
                program.symbols.literal_name(e.lit),
                None if e.anno is None else (e.anno.lower, e.anno.upper),
            )
            for e in rule.body
        )
        head_anno = (
            ("const", rule.head_anno.interval.lower, rule.head_anno.interval.upper)
            if hasattr(rule.head_anno, "interval")
            else (type(rule.head_anno).__name__,)
        )
        out.append(
            (head, head_anno, body, rule.param_name, rule.param_index, rule.theta)
        )
    return tuple(out)


def seeded(seed: int) -> random.Random:
    return random.Random(seed)
