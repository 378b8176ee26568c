"""Random program and interpretation generators for fuzzing and benchmarks.

All generators take an explicit `random.Random` so corpora are reproducible
from a seed. Annotation sampling is biased toward the top elements: uniform
sampling over the grid rarely fires anything, and conflict-rich corpora are
what the consistency properties need.
"""

from __future__ import annotations

import random
import string
from typing import Optional

from . import engine, lattice
from .lattice import Interval, LatticeConfig
from .program import (
    BodyLiteral,
    ConstAnno,
    GatedAndAnno,
    Literal,
    Program,
    Rule,
    make_program,
)


def _atom_names(n: int) -> list[str]:
    letters = string.ascii_lowercase
    if n <= len(letters):
        return [letters[i] for i in range(n)]
    return [f"x{i}" for i in range(n)]


def random_interval(rng: random.Random, cfg: LatticeConfig) -> Interval:
    n = cfg.resolution
    roll = rng.random()
    if roll < 0.40:
        return lattice.true_top(cfg)
    if roll < 0.65:
        return lattice.false_top(cfg)
    if roll < 0.80:
        return lattice.bottom(cfg)
    lo = rng.randint(0, n)
    up = rng.randint(lo, n)
    return Interval(lo, up, cfg)


def random_literal(rng: random.Random, n_atoms: int, allow_negation: bool) -> Literal:
    return Literal(
        rng.randrange(n_atoms), allow_negation and rng.random() < 0.35
    )


def random_program(
    rng: random.Random,
    cfg: LatticeConfig = lattice.SIGNED,
    n_atoms: int = 4,
    n_rules: int = 6,
    allow_negation: bool = True,
    param_fraction: float = 0.0,
    positive_true_only: bool = False,
) -> Program:
    """A random program; `positive_true_only` restricts to the always-
    consistent shape (positive literals, true-top heads and body tests)."""
    program = make_program(cfg, _atom_names(n_atoms))
    rules: list[Rule] = []
    param_counter = 0
    for _ in range(n_rules if n_atoms else 0):
        if positive_true_only:
            head = Literal(rng.randrange(n_atoms))
            head_anno = lattice.true_top(cfg)
            body_size = rng.randint(0, 2)
            body_atoms = rng.sample(range(n_atoms), min(body_size, n_atoms))
            body = tuple(
                BodyLiteral(
                    Literal(a),
                    lattice.true_top(cfg) if rng.random() < 0.7 else lattice.bottom(cfg),
                )
                for a in body_atoms
            )
            rules.append(Rule(head, ConstAnno(head_anno), body))
            continue
        if cfg.is_signed and rng.random() < param_fraction:
            head = random_literal(rng, n_atoms, allow_negation)
            size = rng.randint(1, min(3, 2 * n_atoms))
            pool = [Literal(a, neg) for a in range(n_atoms) for neg in (False, True)]
            cands = rng.sample(pool, size)
            theta = tuple(rng.choice((-1, 1)) for _ in range(size))
            param_counter += 1
            rules.append(
                Rule(
                    head,
                    GatedAndAnno(),
                    tuple(BodyLiteral(l) for l in cands),
                    param_name=f"p{param_counter}",
                    param_index=1,
                    theta=theta,
                )
            )
            continue
        head = random_literal(rng, n_atoms, allow_negation)
        head_anno = random_interval(rng, cfg)
        body_size = rng.randint(0, 3)
        pool = [
            Literal(a, neg)
            for a in range(n_atoms)
            for neg in ((False, True) if allow_negation else (False,))
        ]
        body_lits = rng.sample(pool, min(body_size, len(pool)))
        body = tuple(
            BodyLiteral(l, random_interval(rng, cfg)) for l in body_lits
        )
        rules.append(Rule(head, ConstAnno(head_anno), body))
    return Program(cfg, program.symbols, tuple(rules))


def random_consistent_program(
    rng: random.Random, max_tries: int = 200, **kwargs
) -> Program:
    for _ in range(max_tries):
        program = random_program(rng, **kwargs)
        if engine.check_consistency(program).consistent:
            return program
    raise RuntimeError("could not sample a consistent program")


def random_interpretation(rng: random.Random, program: Program) -> engine.Interpretation:
    """Uniform conflict-free lower-bound pairs per atom."""
    n = program.cfg.resolution
    pairs = [(p, q) for p in range(n + 1) for q in range(n + 1 - p)]
    return engine.Interpretation.from_pairs(
        program.cfg, [rng.choice(pairs) for _ in range(program.n_atoms)]
    )


def raise_interpretation(
    rng: random.Random, program: Program, base: engine.Interpretation
) -> engine.Interpretation:
    """A conflict-free state that dominates `base` in the knowledge order."""
    n = program.cfg.resolution
    out = []
    for atom in range(program.n_atoms):
        p0, q0 = base.lower_pos(atom), base.lower_neg(atom)
        choices = [
            (p, q)
            for p in range(p0, n + 1)
            for q in range(q0, n + 1 - p)
        ]
        out.append(rng.choice(choices))
    return engine.Interpretation.from_pairs(program.cfg, out)


def comparable_pair(
    rng: random.Random, program: Program
) -> tuple[engine.Interpretation, engine.Interpretation]:
    base = random_interpretation(rng, program)
    return base, raise_interpretation(rng, program, base)


def shuffled_rules(rng: random.Random, program: Program) -> Program:
    order = list(range(len(program.rules)))
    rng.shuffle(order)
    return Program(program.cfg, program.symbols, tuple(program.rules[i] for i in order))


def corpus(
    seed: int,
    count: int,
    consistent_only: bool = False,
    cfg: Optional[LatticeConfig] = None,
    max_atoms: int = 6,
    max_rules: int = 10,
    **kwargs,
) -> list[Program]:
    """A reproducible list of random programs with varied sizes."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n_atoms = rng.randint(1, max_atoms)
        n_rules = rng.randint(1, max_rules)
        make = random_consistent_program if consistent_only else random_program
        out.append(
            make(
                rng,
                cfg=cfg if cfg is not None else lattice.SIGNED,
                n_atoms=n_atoms,
                n_rules=n_rules,
                **kwargs,
            )
        )
    return out
