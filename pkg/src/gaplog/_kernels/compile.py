"""Flat array form of a program, shared by both kernel backends.

Rules are compiled to parallel arrays with a CSR body layout. Literal ids
follow `Literal.index` (positive even, negation odd; partner = id ^ 1). The
running state is one lower bound per literal; the upper bound of a literal is
resolution minus the partner's lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import lattice
from ..program import ConstAnno, GatedAndAnno, Program, SignSumAnno

KIND_CLASSICAL = 0
KIND_GATED_AND = 1
KIND_SIGN_SUM = 2


@dataclass
class CompiledProgram:
    n_atoms: int
    n_lits: int
    resolution: int
    incon_lit: int  # literal id of positive incon, or -1
    head_lit: np.ndarray
    kind: np.ndarray
    head_lo: np.ndarray
    head_hi: np.ndarray
    body_off: np.ndarray
    body_lit: np.ndarray
    body_lo: np.ndarray
    body_hi: np.ndarray
    body_theta: np.ndarray
    max_iters: int

    @property
    def n_rules(self) -> int:
        return len(self.head_lit)


def compile_program(program: Program) -> CompiledProgram:
    cfg = program.cfg
    n = cfg.resolution
    n_atoms = program.n_atoms
    n_lits = 2 * n_atoms

    head_lit, kind, head_lo, head_hi = [], [], [], []
    body_off = [0]
    body_lit, body_lo, body_hi, body_theta = [], [], [], []

    for rule in program.rules:
        head_lit.append(rule.head.index)
        if isinstance(rule.head_anno, ConstAnno):
            anno = rule.head_anno.interval
            if anno.cfg != cfg:
                anno = lattice.convert(anno, cfg)
            kind.append(KIND_CLASSICAL)
            head_lo.append(anno.lower)
            head_hi.append(anno.upper)
            for entry in rule.body:
                banno = entry.anno
                if banno.cfg != cfg:
                    banno = lattice.convert(banno, cfg)
                body_lit.append(entry.lit.index)
                body_lo.append(banno.lower)
                body_hi.append(banno.upper)
                body_theta.append(0)
        elif isinstance(rule.head_anno, GatedAndAnno):
            kind.append(KIND_GATED_AND)
            head_lo.append(0)
            head_hi.append(n)
            for entry, t in zip(rule.body, rule.theta):
                body_lit.append(entry.lit.index)
                body_lo.append(0)
                body_hi.append(n)
                body_theta.append(t)
        elif isinstance(rule.head_anno, SignSumAnno):
            kind.append(KIND_SIGN_SUM)
            head_lo.append(0)
            head_hi.append(n)
            for entry in rule.body:
                body_lit.append(entry.lit.index)
                body_lo.append(0)
                body_hi.append(n)
                body_theta.append(0)
        else:
            raise TypeError(f"cannot compile head annotation {rule.head_anno!r}")
        body_off.append(len(body_lit))

    incon_atom = program.incon_atom()
    return CompiledProgram(
        n_atoms=n_atoms,
        n_lits=n_lits,
        resolution=n,
        incon_lit=-1 if incon_atom is None else 2 * incon_atom,
        head_lit=np.asarray(head_lit, dtype=np.int32),
        kind=np.asarray(kind, dtype=np.int8),
        head_lo=np.asarray(head_lo, dtype=np.int32),
        head_hi=np.asarray(head_hi, dtype=np.int32),
        body_off=np.asarray(body_off, dtype=np.int32),
        body_lit=np.asarray(body_lit, dtype=np.int32),
        body_lo=np.asarray(body_lo, dtype=np.int32),
        body_hi=np.asarray(body_hi, dtype=np.int32),
        body_theta=np.asarray(body_theta, dtype=np.int8),
        max_iters=max(1, (n + 1) * n_lits),
    )


def compiled(program: Program) -> CompiledProgram:
    """Per-program cache of the compiled form (programs are immutable)."""
    cached = getattr(program, "_compiled_arrays", None)
    if cached is None:
        cached = compile_program(program)
        program._compiled_arrays = cached
    return cached
