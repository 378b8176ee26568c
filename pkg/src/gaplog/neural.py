"""The unrolled recurrent view of a signed-mode program.

The network state is the vector of signed lower bounds of all literals,
initially all -1. Each cell computes, per literal, one row per rule with
that head (parametrized rules evaluate the gated-AND activation, facts emit
their head annotation, classical rules emit their head lower bound when the
body test passes, sign-sum rows watch an atom pair) and max-pools the rows
together with the previous value, so one cell is exactly one application of
the engine's consequence operator. Rules whose head annotation constrains
the upper bound (e.g. a:[-1,-1]) additionally compile to a mirror row in the
negation's block, since on the coupled state they raise the negation's lower
bound.

The cell count needed for stationarity on consistent programs is
height * |literals|, the same bound as the engine's iteration count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import engine, lattice
from .errors import GaplogError
from .program import ConstAnno, GatedAndAnno, Literal, Program, SignSumAnno

ROW_CONST = 0
ROW_PARAM = 1
ROW_CLASSICAL = 2
ROW_SIGN_SUM = 3

CellState = tuple[int, ...]


def rule_activation(theta: Sequence[int], x: Sequence[int]) -> int:
    """sign(relu(1 + sum_j (1+θ_j)(x_j-1)/2)) with sign(0) = -1.

    Each term is 0 when θ_j=-1 or x_j=1 and -2 when θ_j=1 and x_j=-1, so the
    result is 1 exactly when every gated-on input is 1 (an empty gate set
    yields 1). Integer arithmetic throughout; the arithmetic form is the
    implementation and the guarded-AND reading is asserted against it in the
    tests.
    """
    if len(theta) != len(x):
        raise ValueError(f"length mismatch: θ has {len(theta)}, x has {len(x)}")
    for t, v in zip(theta, x):
        if t not in (-1, 1) or v not in (-1, 1):
            raise ValueError("θ and x entries must be -1 or 1")
    inner = 1
    for t, v in zip(theta, x):
        inner += (1 + t) * (v - 1) // 2
    z = inner if inner > 0 else 0  # relu
    return 1 if z > 0 else -1  # sign, sign(0) = -1


@dataclass(frozen=True)
class NetRow:
    kind: int
    rule_index: int  # source rule position in the program
    mirror: bool
    emit: int  # signed value produced on firing (CONST: always)
    lits: tuple[int, ...] = ()
    los: tuple[int, ...] = ()
    his: tuple[int, ...] = ()
    theta: tuple[int, ...] = ()


@dataclass(frozen=True)
class HeadBlock:
    literal: int
    rows: tuple[NetRow, ...]

    @property
    def rule_rows(self) -> int:
        """Rows from this literal's own rules (mirrors excluded)."""
        return sum(1 for r in self.rows if not r.mirror)


@dataclass
class UnrolledNet:
    program: Program
    n_lits: int
    depth: int
    blocks: tuple[HeadBlock, ...]  # indexed by literal id


def default_depth(program: Program) -> int:
    return max(1, lattice.height(program.cfg) * program.n_literals)


def compile_network(program: Program, depth: Optional[int] = None) -> UnrolledNet:
    """Compile a signed-mode program into per-literal row blocks."""
    if not program.cfg.is_signed:
        raise GaplogError("the unrolled network requires signed mode")
    n = program.cfg.resolution
    n_lits = program.n_literals
    rows: list[list[NetRow]] = [[] for _ in range(n_lits)]
    mirrors: list[list[NetRow]] = [[] for _ in range(n_lits)]

    for ri, rule in enumerate(program.rules):
        head = rule.head.index
        if isinstance(rule.head_anno, GatedAndAnno):
            rows[head].append(
                NetRow(
                    ROW_PARAM,
                    ri,
                    False,
                    1,
                    lits=tuple(e.lit.index for e in rule.body),
                    theta=tuple(rule.theta),
                )
            )
        elif isinstance(rule.head_anno, SignSumAnno):
            rows[head].append(
                NetRow(
                    ROW_SIGN_SUM,
                    ri,
                    False,
                    1,
                    lits=tuple(e.lit.index for e in rule.body),
                )
            )
        elif isinstance(rule.head_anno, ConstAnno):
            anno = rule.head_anno.interval
            if anno.cfg != program.cfg:
                anno = lattice.convert(anno, program.cfg)
            lits = tuple(e.lit.index for e in rule.body)
            bannos = [
                e.anno if e.anno.cfg == program.cfg else lattice.convert(e.anno, program.cfg)
                for e in rule.body
            ]
            los = tuple(b.lower for b in bannos)
            his = tuple(b.upper for b in bannos)
            kind = ROW_CONST if not rule.body else ROW_CLASSICAL
            rows[head].append(
                NetRow(kind, ri, False, 2 * anno.lower - 1, lits, los, his)
            )
            if anno.upper < n:
                # The head also certifies the negation up to N - upper.
                mirrors[head ^ 1].append(
                    NetRow(
                        kind, ri, True, 2 * (n - anno.upper) - 1, lits, los, his
                    )
                )
        else:
            raise TypeError(f"cannot compile head annotation {rule.head_anno!r}")

    blocks = tuple(
        HeadBlock(lit, tuple(rows[lit] + mirrors[lit])) for lit in range(n_lits)
    )
    return UnrolledNet(
        program=program,
        n_lits=n_lits,
        depth=depth if depth is not None else default_depth(program),
        blocks=blocks,
    )


def initial_state(net: UnrolledNet) -> CellState:
    return (-1,) * net.n_lits


def _row_output(row: NetRow, state: Sequence[int]) -> int:
    if row.kind == ROW_CONST:
        return row.emit
    if row.kind == ROW_PARAM:
        fires = all(
            t != 1 or state[lit] == 1 for t, lit in zip(row.theta, row.lits)
        )
        return 1 if fires else -1
    if row.kind == ROW_SIGN_SUM:
        return 1 if state[row.lits[0]] == 1 and state[row.lits[1]] == 1 else -1
    # classical: body conditions over the coupled bounds
    for lit, lo, hi in zip(row.lits, row.los, row.his):
        low = (state[lit] + 1) // 2
        up = 1 - (state[lit ^ 1] + 1) // 2
        if lo > low or up > hi:
            return -1
    return row.emit


def forward_cell(net: UnrolledNet, state: Sequence[int]) -> CellState:
    """One cell: per literal, max-pool its rows with the previous value."""
    out = []
    for block in net.blocks:
        best = state[block.literal]
        for row in block.rows:
            v = _row_output(row, state)
            if v > best:
                best = v
        out.append(best)
    return tuple(out)


def forward(net: UnrolledNet, steps: Optional[int] = None) -> CellState:
    state = initial_state(net)
    for _ in range(net.depth if steps is None else steps):
        state = forward_cell(net, state)
    return state


def forward_states(net: UnrolledNet, steps: Optional[int] = None) -> list[CellState]:
    """States after each of the first `steps` cells."""
    state = initial_state(net)
    out = []
    for _ in range(net.depth if steps is None else steps):
        state = forward_cell(net, state)
        out.append(state)
    return out


def find_mismatch(
    program: Program, net: Optional[UnrolledNet] = None, steps: Optional[int] = None
):
    """First (t, literal, engine_value, net_value) disagreement, or None.

    Compares the network state after t cells against the engine's t-th
    permissive iterate for every t up to the full convergence bound.
    """
    if net is None:
        net = compile_network(program)
    if steps is None:
        steps = net.depth
    engine_states = engine.iterate_states(program, steps)
    net_states = forward_states(net, steps)
    for t, (es, ns) in enumerate(zip(engine_states, net_states), start=1):
        signed = es.signed()
        if signed != ns:
            for lit in range(net.n_lits):
                if signed[lit] != ns[lit]:
                    return (t, lit, signed[lit], ns[lit])
    return None


def equivalence_check(
    program: Program, net: Optional[UnrolledNet] = None, steps: Optional[int] = None
) -> bool:
    """True iff cell t equals the engine's t-th iterate for all t <= steps."""
    return find_mismatch(program, net, steps) is None


def dump_network(net: UnrolledNet) -> str:
    """Human-readable block structure for debugging."""
    names = net.program.symbols
    kind_names = {
        ROW_CONST: "const",
        ROW_PARAM: "param",
        ROW_CLASSICAL: "rule",
        ROW_SIGN_SUM: "signsum",
    }
    lines = [f"unrolled net: {net.n_lits} literals, depth {net.depth}"]
    for block in net.blocks:
        if not block.rows:
            continue
        lit = Literal.from_index(block.literal)
        lines.append(f"block {names.literal_name(lit)}:")
        for row in block.rows:
            parts = [f"  {kind_names[row.kind]} r{row.rule_index}"]
            if row.mirror:
                parts.append("(mirror)")
            if row.lits:
                body = ", ".join(
                    names.literal_name(Literal.from_index(l)) for l in row.lits
                )
                parts.append(f"over [{body}]")
            if row.theta:
                parts.append(f"theta={list(row.theta)}")
            if row.kind in (ROW_CONST, ROW_CLASSICAL):
                parts.append(f"emit={row.emit}")
            lines.append(" ".join(parts))
    return "\n".join(lines)
