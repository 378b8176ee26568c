"""Learning θ gates of parametrized rules from labeled examples.

Forward passes are exact and binarized: gates are sign(latent weight) and all
activations live in {-1,1}. The loss is a hinge on the pre-relu affine value
of the gated-AND at the target's pooled row (the real surrogate; constant
rows and the initial state contribute their signed value). Backward follows
the unrolled cells: the loss reads the surrogate directly, interior cell-to-
cell hops go through the relu subgradient and the clipped straight-through
estimator of sign, max-pooling routes gradients to the argmax row (lowest
rule index on ties, previous value last), and gates receive the (x_j - 1)/2
factor of the gated-AND. Latent weights are clipped to [-1, 1] after every
update.

Consistency is policed through the reserved incon atom. Under the hard-check
policy an update whose post-state is inconsistent on any training example is
rejected and the step size shrinks; under the penalty policy each
inconsistent example adds a fixed λ to its loss.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import _kernels, lattice, neural
from ._kernels import compile_program
from .errors import DatasetError, OracleTooLargeError, TrainingError
from .program import (
    INCON,
    ConstAnno,
    Program,
    Rule,
    add_inconsistency_rules,
    param_rules,
    prune,
    with_thetas,
)

# -- datasets -----------------------------------------------------------------


@dataclass(frozen=True)
class TrainingExample:
    """Input literals injected as facts (+1 -> lit:[1,1], -1 -> no fact)."""

    inputs: Mapping[str, int]
    targets: Mapping[str, int]


def _check_example(example: TrainingExample) -> None:
    overlap = set(example.inputs) & set(example.targets)
    if overlap:
        raise DatasetError(f"literals {sorted(overlap)} are both inputs and targets")
    for name, value in itertools.chain(
        example.inputs.items(), example.targets.items()
    ):
        if value not in (-1, 1):
            raise DatasetError(f"{name}: values must be -1 or 1, got {value!r}")
        if name.lstrip("~") == INCON:
            raise DatasetError("incon is reserved and cannot appear in datasets")


def load_dataset(path) -> list[TrainingExample]:
    """Line-delimited JSON records {"inputs": {...}, "targets": {...}}."""
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                example = TrainingExample(
                    {k: int(v) for k, v in record["inputs"].items()},
                    {k: int(v) for k, v in record["targets"].items()},
                )
            except (ValueError, KeyError, TypeError) as exc:
                raise DatasetError(f"{path}:{line_no}: {exc}") from exc
            _check_example(example)
            out.append(example)
    return out


def dump_dataset(examples: Iterable[TrainingExample], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(
                json.dumps({"inputs": dict(ex.inputs), "targets": dict(ex.targets)})
            )
            fh.write("\n")


def exhaustive_rows(names: Sequence[str]) -> list[dict[str, int]]:
    """All 2^n signed assignments over the given input literal names."""
    out = []
    for bits in itertools.product((-1, 1), repeat=len(names)):
        out.append(dict(zip(names, bits)))
    return out


def generate_labels(
    truth: Program,
    input_rows: Iterable[Mapping[str, int]],
    target_names: Sequence[str],
) -> list[TrainingExample]:
    """Label input rows by running the ground-truth program on each."""
    input_rows = [dict(row) for row in input_rows]
    runner = _EngineRunner(truth, sorted({k for row in input_rows for k in row}))
    out = []
    for row in input_rows:
        lowers, _ = runner.run(row)
        targets = {}
        for name in target_names:
            lit = runner.augmented.symbols.parse_literal(name)
            if lit is None:
                raise DatasetError(f"target {name!r} is not an atom of the program")
            targets[name] = 2 * lowers[lit.index] - 1
        out.append(TrainingExample(dict(row), targets))
    return out


# -- configuration and results ------------------------------------------------

POLICY_HARD = "hard"
POLICY_PENALTY = "penalty"


@dataclass
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 200
    seed: int = 0
    policy: str = POLICY_HARD
    penalty_weight: float = 10.0
    shrink: float = 0.5
    init_high: float = 0.1
    fact_penalty: float = 0.01  # push on rules whose gates are all off
    depth: Optional[int] = None  # unroll length; default height * |literals|
    early_stop: bool = True
    forward_mode: str = "unrolled"  # or "engine": fixpoint kernel for metrics
    batch_size: Optional[int] = None  # None = full batch


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    hinge: float
    penalty: float
    accuracy: float
    consistency_rate: float
    accepted: bool
    learning_rate: float
    thetas: tuple[tuple[int, ...], ...]


@dataclass
class TrainResult:
    program: Program  # pruned, final gates applied
    trained: Program  # unpruned, final gates applied
    history: list[EpochRecord]
    final_accuracy: float
    final_consistency_rate: float
    accepted_epochs: int
    all_rejected: bool


@dataclass
class EvalResult:
    accuracy: float
    accuracy_per_target: dict[str, float]
    consistency_rate: float


# -- engine-backed per-example runner ------------------------------------------


def _with_input_atoms(program: Program, input_names: Sequence[str]) -> Program:
    """Extend the symbol table so dataset-only atoms exist as (rule-less)
    atoms before the incon rules are generated over them."""
    symbols = program.symbols.copy()
    for name in input_names:
        if name.lstrip("~") == INCON:
            raise DatasetError("incon is reserved and cannot appear in datasets")
        symbols.parse_literal(name, intern=True)
    return Program(program.cfg, symbols, program.rules)


class _EngineRunner:
    """Fixpoint runs with per-example input facts patched into the arrays."""

    def __init__(self, program: Program, input_names: Sequence[str]):
        if not program.cfg.is_signed:
            raise DatasetError("training and evaluation require signed mode")
        self.augmented = add_inconsistency_rules(
            _with_input_atoms(program, input_names)
        )
        symbols = self.augmented.symbols
        self.input_lits: dict[str, int] = {}
        rules = list(self.augmented.rules)
        bottom = lattice.bottom(program.cfg)
        self.fact_rows: dict[str, int] = {}
        for name in input_names:
            lit = symbols.parse_literal(name)
            self.fact_rows[name] = len(rules)
            rules.append(Rule(lit, ConstAnno(bottom)))
            self.input_lits[name] = lit.index
        patched = Program(self.augmented.cfg, symbols, tuple(rules))
        self.cp = compile_program(patched)
        self.n = program.cfg.resolution

    def patch_thetas(self, flat_theta: Sequence[int], slots: Sequence[int]) -> None:
        """Overwrite gate values of the compiled parametrized rules."""
        self.cp.body_theta[list(slots)] = np.asarray(flat_theta, dtype=np.int8)

    def run(self, inputs: Mapping[str, int]):
        for name, row in self.fact_rows.items():
            self.cp.head_lo[row] = self.n if inputs.get(name, -1) == 1 else 0
        _, lowers, _, conflicts, incon_iter, _ = _kernels.run_fixpoint(
            self.cp, False, False
        )
        consistent = not conflicts and incon_iter < 0
        return lowers, consistent


def evaluate(program: Program, data: Sequence[TrainingExample]) -> EvalResult:
    """Engine fixpoint per example; accuracy over target literals.

    Accuracy compares each target's entailed signed lower bound with its
    label (inconsistent examples still count toward accuracy; their share is
    reported separately as the consistency rate).
    """
    if not data:
        raise TrainingError("empty dataset")
    for ex in data:
        _check_example(ex)
    input_names = sorted({k for ex in data for k in ex.inputs})
    runner = _EngineRunner(program, input_names)
    symbols = runner.augmented.symbols
    per_target_hits: dict[str, int] = {}
    per_target_total: dict[str, int] = {}
    consistent_count = 0
    for ex in data:
        lowers, consistent = runner.run(ex.inputs)
        consistent_count += consistent
        for name, label in ex.targets.items():
            lit = symbols.parse_literal(name)
            if lit is None:
                raise DatasetError(f"target {name!r} is not an atom of the program")
            value = 2 * lowers[lit.index] - 1
            per_target_total[name] = per_target_total.get(name, 0) + 1
            per_target_hits[name] = per_target_hits.get(name, 0) + (value == label)
    total = sum(per_target_total.values())
    hits = sum(per_target_hits.values())
    return EvalResult(
        accuracy=hits / total if total else 1.0,
        accuracy_per_target={
            name: per_target_hits[name] / per_target_total[name]
            for name in sorted(per_target_total)
        },
        consistency_rate=consistent_count / len(data),
    )


# -- batched unrolled network ---------------------------------------------------

_ROW_INPUT = 100  # batch-only row kind: per-example input fact


@dataclass
class _BRow:
    kind: int
    head_lit: int
    gid: int
    emit: int = 0
    lits: tuple[int, ...] = ()
    req_lits: tuple[int, ...] = ()  # classical: literals that must be +1
    slot: int = -1  # param rows: index into the weight list
    input_col: int = -1


class _BatchNet:
    """The unrolled network of the incon-augmented program, batched over
    examples, with per-example input facts as extra constant rows."""

    def __init__(
        self,
        program: Program,
        data: Sequence[TrainingExample],
        depth: Optional[int] = None,
    ):
        if not data:
            raise TrainingError("empty dataset")
        for ex in data:
            _check_example(ex)
        self.program = program
        input_names = sorted({k for ex in data for k in ex.inputs})
        self.augmented = add_inconsistency_rules(
            _with_input_atoms(program, input_names)
        )
        symbols = self.augmented.symbols
        self.n_lits = self.augmented.n_literals
        self.depth = depth if depth is not None else neural.default_depth(self.augmented)
        self.incon_lit = 2 * self.augmented.incon_atom()
        self.n_ex = len(data)

        self.param_rule_indices = param_rules(self.augmented)
        self.rule_to_slot = {ri: s for s, ri in enumerate(self.param_rule_indices)}
        self.gate_counts = [
            len(self.augmented.rules[ri].body) for ri in self.param_rule_indices
        ]

        self.input_lits = []
        for name in input_names:
            lit = symbols.parse_literal(name)
            self.input_lits.append((name, lit.index))
        self.inputs = np.full((self.n_ex, len(self.input_lits)), -1, dtype=np.int8)
        for i, ex in enumerate(data):
            for j, (name, _) in enumerate(self.input_lits):
                self.inputs[i, j] = ex.inputs.get(name, -1)

        target_names = sorted({k for ex in data for k in ex.targets})
        self.target_lits = []
        for name in target_names:
            lit = symbols.parse_literal(name)
            if lit is None:
                raise DatasetError(f"target {name!r} is not an atom of the program")
            self.target_lits.append((name, lit.index))
        # 0 marks an absent target for that example.
        self.labels = np.zeros((self.n_ex, len(self.target_lits)), dtype=np.int8)
        for i, ex in enumerate(data):
            for j, (name, _) in enumerate(self.target_lits):
                self.labels[i, j] = ex.targets.get(name, 0)

        net = neural.compile_network(self.augmented)
        self.rows: list[_BRow] = []
        self.block_rows: list[list[int]] = [[] for _ in range(self.n_lits)]
        for block in net.blocks:
            for row in block.rows:
                gid = len(self.rows)
                if row.kind == neural.ROW_PARAM:
                    brow = _BRow(
                        neural.ROW_PARAM,
                        block.literal,
                        gid,
                        lits=row.lits,
                        slot=self.rule_to_slot[row.rule_index],
                    )
                elif row.kind == neural.ROW_SIGN_SUM:
                    brow = _BRow(
                        neural.ROW_SIGN_SUM, block.literal, gid, lits=row.lits
                    )
                else:
                    req = []
                    for lit, lo, hi in zip(row.lits, row.los, row.his):
                        if lo == 1:
                            req.append(lit)
                        if hi == 0:
                            req.append(lit ^ 1)
                    brow = _BRow(
                        row.kind,
                        block.literal,
                        gid,
                        emit=row.emit,
                        req_lits=tuple(req),
                    )
                self.rows.append(brow)
                self.block_rows[block.literal].append(gid)
        for col, (_, lit) in enumerate(self.input_lits):
            gid = len(self.rows)
            self.rows.append(_BRow(_ROW_INPUT, lit, gid, input_col=col))
            self.block_rows[lit].append(gid)
        self.param_row_gids = [
            r.gid for r in self.rows if r.kind == neural.ROW_PARAM
        ]

    def init_weights(self, rng: np.random.Generator, high: float) -> list[np.ndarray]:
        """All gates initially active: uniform in (0, high]."""
        return [
            high - rng.uniform(0.0, high, size=n) * (1 - 1e-9)
            for n in self.gate_counts
        ]

    @staticmethod
    def binarize(weights: Sequence[np.ndarray]) -> list[np.ndarray]:
        return [np.where(w > 0, 1, -1).astype(np.int8) for w in weights]

    def thetas_tuple(self, weights) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(v) for v in t) for t in self.binarize(weights))

    def theta_map(self, weights) -> dict[tuple[str, int], tuple[int, ...]]:
        out = {}
        for theta, ri in zip(self.binarize(weights), self.param_rule_indices):
            rule = self.augmented.rules[ri]
            out[(rule.param_name, rule.param_index)] = tuple(int(v) for v in theta)
        return out

    # -- forward -------------------------------------------------------------

    def forward(self, weights, soft: bool = False, record: bool = True):
        """Run all examples through the unrolled cells.

        Hard mode binarizes the gates and keeps every activation in {-1,1};
        soft mode is the surrogate network (gates = latent weights, sign
        replaced by hard-tanh) used by the finite-difference checks.
        """
        dtype = np.float64 if soft else np.int8
        gates = list(weights) if soft else self.binarize(weights)
        a = np.full((self.n_ex, self.n_lits), -1, dtype=dtype)
        states = [a]
        inners: list[dict[int, np.ndarray]] = []
        codes: list[np.ndarray] = []
        n_rows = len(self.rows)
        for _ in range(self.depth):
            r_mat = np.empty((self.n_ex, n_rows), dtype=dtype)
            cell_inner: dict[int, np.ndarray] = {}
            for row in self.rows:
                if row.kind == neural.ROW_PARAM:
                    x = a[:, list(row.lits)].astype(np.float64)
                    active = (1.0 + np.asarray(gates[row.slot], dtype=np.float64)) / 2.0
                    inner = 1.0 + (x - 1.0) @ active
                    if soft:
                        out = np.clip(inner, 0.0, 1.0)
                    else:
                        out = np.where(inner > 0, 1, -1)
                    cell_inner[row.gid] = inner
                elif row.kind == _ROW_INPUT:
                    out = self.inputs[:, row.input_col]
                elif row.kind == neural.ROW_SIGN_SUM:
                    s = a[:, row.lits[0]].astype(np.float64) + a[:, row.lits[1]]
                    if soft:
                        out = np.clip(s, -1.0, 1.0)
                    else:
                        out = np.where(s > 0, 1, -1)
                elif row.kind == neural.ROW_CONST:
                    out = np.full(self.n_ex, row.emit, dtype=dtype)
                else:  # classical
                    if row.req_lits:
                        ok = np.all(a[:, list(row.req_lits)] >= 1.0 - 1e-9, axis=1)
                        out = np.where(ok, row.emit, -1)
                    else:
                        out = np.full(self.n_ex, row.emit, dtype=dtype)
                r_mat[:, row.gid] = out
            new_a = np.array(a, dtype=dtype)
            cell_codes = np.full((self.n_ex, self.n_lits), -1, dtype=np.int32)
            for lit in range(self.n_lits):
                gids = self.block_rows[lit]
                if not gids:
                    continue
                stacked = np.concatenate(
                    [r_mat[:, gids], a[:, lit : lit + 1]], axis=1
                )
                best = np.argmax(stacked, axis=1)
                new_a[:, lit] = stacked[np.arange(self.n_ex), best]
                cell_codes[:, lit] = np.where(
                    best < len(gids), np.take(gids, np.minimum(best, len(gids) - 1)), -1
                )
            a = new_a
            if record:
                states.append(a)
                inners.append(cell_inner)
                codes.append(cell_codes)
        if record:
            return _Trace(self, states, inners, codes, soft)
        return a

    def consistency(self, final_a: np.ndarray) -> np.ndarray:
        return final_a[:, self.incon_lit] < 1.0 - 1e-9


@dataclass
class _Trace:
    net: _BatchNet
    states: list[np.ndarray]  # length depth+1, states[0] = all -1
    inners: list[dict[int, np.ndarray]]  # per cell: gid -> inner values
    codes: list[np.ndarray]  # per cell: source gid or -1 (previous value)
    soft: bool

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def surrogate(self, ex: int, lit: int) -> float:
        """Pre-sign surrogate of the final value: the producing row's pre-relu
        affine value for gated-AND rows, else the produced signed value."""
        t = len(self.codes)
        while t > 0:
            gid = int(self.codes[t - 1][ex, lit])
            if gid < 0:
                t -= 1
                continue
            row = self.net.rows[gid]
            if row.kind == neural.ROW_PARAM:
                return float(self.inners[t - 1][gid][ex])
            return float(self.states[t][ex, lit])
        return -1.0  # initial state

    def predictions(self) -> np.ndarray:
        cols = [lit for _, lit in self.net.target_lits]
        return self.final[:, cols]


def _losses(trace: _Trace, policy: str, penalty_weight: float):
    """Per-example hinge (+ penalty) and the surrogate matrix."""
    net = trace.net
    n_ex = net.n_ex
    yhat = np.zeros((n_ex, len(net.target_lits)))
    for j, (_, lit) in enumerate(net.target_lits):
        for ex in range(n_ex):
            yhat[ex, j] = trace.surrogate(ex, lit)
    labels = net.labels.astype(np.float64)
    present = net.labels != 0
    hinge = np.maximum(0.0, 1.0 - labels * yhat) * present
    hinge_per_example = hinge.sum(axis=1)
    consistent = net.consistency(trace.final)
    penalty_per_example = np.where(
        ~consistent, penalty_weight if policy == POLICY_PENALTY else 0.0, 0.0
    )
    return hinge, hinge_per_example, penalty_per_example, yhat, consistent


def example_loss(y: int, surrogate: float) -> float:
    """Hinge term of one target: max(0, 1 - y * surrogate)."""
    return max(0.0, 1.0 - y * surrogate)


def backward(
    trace: _Trace,
    weights: Sequence[np.ndarray],
    policy: str = POLICY_HARD,
    penalty_weight: float = 10.0,
    fact_penalty: float = 0.0,
) -> list[np.ndarray]:
    """Mean-loss gradients with respect to the latent weights."""
    net = trace.net
    n_ex = net.n_ex
    gates = list(weights) if trace.soft else net.binarize(weights)
    hinge, _, _, yhat, consistent = _losses(trace, policy, penalty_weight)
    labels = net.labels.astype(np.float64)
    scale = 1.0 / n_ex

    depth = len(trace.codes)
    grad_w = [np.zeros_like(np.asarray(w, dtype=np.float64)) for w in weights]
    # g_y: direct surrogate chain (loss reads pre-relu values, no masks);
    # g_x: masked chain through sign(relu(.)) between cells.
    g_y = np.zeros((n_ex, net.n_lits))
    g_x = np.zeros((n_ex, net.n_lits))
    for j, (_, lit) in enumerate(net.target_lits):
        active = (hinge[:, j] > 0) & (net.labels[:, j] != 0)
        g_y[:, lit] += np.where(active, -labels[:, j] * scale, 0.0)
    if policy == POLICY_PENALTY and net.incon_lit >= 0:
        # d/dv of λ(1+v)/2 routed at the violating examples only.
        g_x[:, net.incon_lit] += np.where(~consistent, penalty_weight / 2 * scale, 0.0)

    for t in range(depth, 0, -1):
        codes = trace.codes[t - 1]
        prev = trace.states[t - 1]
        ng_y = np.zeros_like(g_y)
        ng_x = np.zeros_like(g_x)
        pass_mask = codes == -1
        ng_y += g_y * pass_mask
        ng_x += g_x * pass_mask
        for gid in net.param_row_gids:
            row = net.rows[gid]
            hit = codes[:, row.head_lit] == gid
            if not hit.any():
                continue
            inner = trace.inners[t - 1][gid]
            ste = ((inner > 0) & (inner <= 1.0)).astype(np.float64)
            g_inner = g_y[:, row.head_lit] * hit + g_x[:, row.head_lit] * hit * ste
            if not g_inner.any():
                continue
            x = prev[:, list(row.lits)].astype(np.float64)
            grad_w[row.slot] += g_inner @ ((x - 1.0) / 2.0)
            theta = np.asarray(gates[row.slot], dtype=np.float64)
            ng_x[:, list(row.lits)] += np.outer(g_inner, (1.0 + theta) / 2.0)
        for brow in net.rows:
            if brow.kind != neural.ROW_SIGN_SUM:
                continue
            hit = codes[:, brow.head_lit] == brow.gid
            if not hit.any():
                continue
            g = (g_x[:, brow.head_lit] + g_y[:, brow.head_lit]) * hit
            if trace.soft:
                s = prev[:, brow.lits[0]] + prev[:, brow.lits[1]]
                g = g * ((np.abs(s) < 1.0).astype(np.float64))
            for lit in brow.lits:
                ng_x[:, lit] += g
        g_y, g_x = ng_y, ng_x

    if fact_penalty:
        for slot, theta in enumerate(net.binarize(weights)):
            if np.all(theta == -1):
                grad_w[slot] -= fact_penalty
    return grad_w


# -- training loop --------------------------------------------------------------


def train(
    program: Program,
    data: Sequence[TrainingExample],
    config: Optional[TrainConfig] = None,
) -> TrainResult:
    """Full-batch descent on the latent gate weights.

    Each epoch computes the gradient at the current (binarized) gates,
    proposes a clipped step, and under the hard-check policy accepts it only
    if every training example stays consistent; a rejected step halves the
    learning rate. Raises TrainingError when the program has no parametrized
    rules, the dataset is empty, the initial state is already inconsistent
    under hard-check, or every epoch was rejected.
    """
    config = config or TrainConfig()
    if not data:
        raise TrainingError("empty dataset")
    if not param_rules(program):
        raise TrainingError("the program has no parametrized rules to train")
    if config.policy not in (POLICY_HARD, POLICY_PENALTY):
        raise TrainingError(f"unknown policy {config.policy!r}")

    net = _BatchNet(program, data, depth=config.depth)
    rng = np.random.default_rng(config.seed)
    weights = net.init_weights(rng, config.init_high)
    lr = config.learning_rate
    batch = config.batch_size
    if batch is not None and not (1 <= batch <= net.n_ex):
        raise TrainingError(f"batch size {batch} out of range")

    engine_runner = None
    if config.forward_mode == "engine":
        engine_runner = _EngineRunner(
            program, sorted({k for ex in data for k in ex.inputs})
        )
        theta_slots = _theta_slots(engine_runner.cp)

    def consistent_everywhere(ws) -> bool:
        if engine_runner is not None:
            flat = [int(v) for t in net.binarize(ws) for v in t]
            engine_runner.patch_thetas(flat, theta_slots)
            return all(engine_runner.run(ex.inputs)[1] for ex in data)
        final = net.forward(ws, record=False)
        return bool(net.consistency(final).all())

    if config.policy == POLICY_HARD and not consistent_everywhere(weights):
        raise TrainingError(
            "initial gates are already inconsistent on a training example "
            "under the hard-check policy"
        )

    history: list[EpochRecord] = []
    accepted_epochs = 0
    for epoch in range(config.epochs):
        trace = net.forward(weights)
        hinge, hinge_ex, penalty_ex, _, consistent = _losses(
            trace, config.policy, config.penalty_weight
        )
        preds = trace.predictions()
        present = net.labels != 0
        acc = (
            float(((preds == net.labels) & present).sum() / present.sum())
            if present.any()
            else 1.0
        )
        if batch is not None and batch < net.n_ex:
            chosen = sorted(rng.choice(net.n_ex, size=batch, replace=False).tolist())
            sub_net = _BatchNet(program, [data[i] for i in chosen], depth=config.depth)
            grad_trace = sub_net.forward(weights)
        else:
            grad_trace = trace
        grads = backward(
            grad_trace,
            weights,
            policy=config.policy,
            penalty_weight=config.penalty_weight,
            fact_penalty=config.fact_penalty,
        )
        candidate = [
            np.clip(w - lr * g, -1.0, 1.0) for w, g in zip(weights, grads)
        ]
        accepted = True
        if config.policy == POLICY_HARD and not consistent_everywhere(candidate):
            accepted = False
        record = EpochRecord(
            epoch=epoch,
            loss=float(hinge_ex.mean() + penalty_ex.mean()),
            hinge=float(hinge_ex.mean()),
            penalty=float(penalty_ex.mean()),
            accuracy=acc,
            consistency_rate=float(consistent.mean()),
            accepted=accepted,
            learning_rate=lr,
            thetas=net.thetas_tuple(candidate if accepted else weights),
        )
        history.append(record)
        if accepted:
            weights = candidate
            accepted_epochs += 1
        else:
            lr *= config.shrink
        if (
            config.early_stop
            and accepted
            and record.hinge == 0.0
            and record.consistency_rate == 1.0
        ):
            break

    all_rejected = accepted_epochs == 0 and bool(history)
    if all_rejected and config.policy == POLICY_HARD:
        raise TrainingError(
            "every update was rejected by the hard consistency check",
            history=history,
        )

    trained = with_thetas(program, net.theta_map(weights))
    pruned = prune(trained)
    final_eval = evaluate(pruned, data)
    return TrainResult(
        program=pruned,
        trained=trained,
        history=history,
        final_accuracy=final_eval.accuracy,
        final_consistency_rate=final_eval.consistency_rate,
        accepted_epochs=accepted_epochs,
        all_rejected=all_rejected,
    )


def _theta_slots(cp) -> list[int]:
    """Flat body positions of the gated-AND rules in a compiled program."""
    slots = []
    for r in range(cp.n_rules):
        if cp.kind[r] == 1:
            slots.extend(range(cp.body_off[r], cp.body_off[r + 1]))
    return slots


# -- exhaustive gate-assignment oracle -------------------------------------------


@dataclass
class OracleResult:
    error: int
    assignments: list[tuple[tuple[int, ...], ...]]
    scored: int


def discrete_oracle(
    program: Program, data: Sequence[TrainingExample], cap: int = 2**20
) -> OracleResult:
    """Score every θ assignment by 0-1 target error; return the argmin set.

    The argmin set is ordered by (number of active gates, lexicographic).
    Programs made only of parametrized rules whose candidates are all dataset
    inputs are scored by a vectorized truth-table pass; anything else runs
    the fixpoint engine per example and assignment.
    """
    rules = param_rules(program)
    if not rules:
        raise TrainingError("the program has no parametrized rules")
    sizes = [len(program.rules[ri].body) for ri in rules]
    space = 1
    for n in sizes:
        space <<= n
        if space > cap:
            raise OracleTooLargeError(f"gate space exceeds cap {cap}")
    for ex in data:
        _check_example(ex)

    symbols = program.symbols
    head_lits = {program.rules[ri].head.index for ri in rules}
    flat_ok = len(rules) == len(program.rules)
    cand_names = []
    for ri in rules:
        for entry in program.rules[ri].body:
            name = symbols.literal_name(entry.lit)
            cand_names.append(name)
            if entry.lit.index in head_lits:
                flat_ok = False
    if flat_ok:
        for name in cand_names:
            if any(name not in ex.inputs for ex in data):
                flat_ok = False
                break

    per_rule_assignments = [
        list(itertools.product((1, -1), repeat=n)) for n in sizes
    ]

    if flat_ok:
        scores = _flat_oracle_scores(
            program, data, rules, per_rule_assignments
        )
    else:
        scores = _engine_oracle_scores(program, data, rules, per_rule_assignments)

    best = min(scores.values())
    argmin = [a for a, s in scores.items() if s == best]
    argmin.sort(key=lambda a: (sum(v == 1 for t in a for v in t), a))
    return OracleResult(error=best, assignments=argmin, scored=len(scores))


def _flat_oracle_scores(program, data, rules, per_rule_assignments):
    symbols = program.symbols
    n_ex = len(data)
    all_ones = (1 << n_ex) - 1

    def bits(fn) -> int:
        out = 0
        for i, ex in enumerate(data):
            if fn(ex):
                out |= 1 << i
        return out

    # Per rule, per assignment: the set of examples the gated AND fires on.
    fire_bits = []
    for ri, assignments in zip(rules, per_rule_assignments):
        names = [symbols.literal_name(e.lit) for e in program.rules[ri].body]
        value_bits = [bits(lambda ex, n=n: ex.inputs[n] == 1) for n in names]
        per_assignment = []
        for theta in assignments:
            mask = all_ones
            for t, vb in zip(theta, value_bits):
                if t == 1:
                    mask &= vb
            per_assignment.append(mask)
        fire_bits.append(per_assignment)

    heads = [program.rules[ri].head for ri in rules]
    target_info = []
    for name in sorted({k for ex in data for k in ex.targets}):
        lit = symbols.parse_literal(name)
        if lit is None:
            raise DatasetError(f"target {name!r} is not an atom of the program")
        base = bits(lambda ex, n=name: ex.inputs.get(n, -1) == 1)
        label_pos = bits(lambda ex, n=name: ex.targets.get(n, 0) == 1)
        present = bits(lambda ex, n=name: n in ex.targets)
        rule_ids = [i for i, h in enumerate(heads) if h.index == lit.index]
        target_info.append((base, label_pos, present, rule_ids))

    scores: dict[tuple, int] = {}
    for combo in itertools.product(*[range(len(a)) for a in per_rule_assignments]):
        err = 0
        for base, label_pos, present, rule_ids in target_info:
            pred = base
            for i in rule_ids:
                pred |= fire_bits[i][combo[i]]
            err += ((pred ^ label_pos) & present).bit_count()
        key = tuple(per_rule_assignments[i][c] for i, c in enumerate(combo))
        scores[key] = err
    return scores


def _engine_oracle_scores(program, data, rules, per_rule_assignments):
    input_names = sorted({k for ex in data for k in ex.inputs})
    runner = _EngineRunner(program, input_names)
    slots = _theta_slots(runner.cp)
    symbols = runner.augmented.symbols
    target_cols = {}
    for name in sorted({k for ex in data for k in ex.targets}):
        lit = symbols.parse_literal(name)
        if lit is None:
            raise DatasetError(f"target {name!r} is not an atom of the program")
        target_cols[name] = lit.index
    scores: dict[tuple, int] = {}
    for combo in itertools.product(*per_rule_assignments):
        flat = [v for theta in combo for v in theta]
        runner.patch_thetas(flat, slots)
        err = 0
        for ex in data:
            lowers, _ = runner.run(ex.inputs)
            for name, label in ex.targets.items():
                if 2 * lowers[target_cols[name]] - 1 != label:
                    err += 1
        scores[tuple(combo)] = err
    return scores
