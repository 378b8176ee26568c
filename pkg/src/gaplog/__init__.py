"""gaplog: annotated logic programs over an interval lower semi-lattice.

Library surface:

- `lattice`: exact interval annotations, knowledge order, supremum, negation
- `program` / `parser`: rule AST, validation, pruning, incon rules, text DSL
- `engine`: interpretations, consequence operator, fixpoint, entailment,
  consistency checking, exhaustive model oracle
- `neural`: the equivalent unrolled recurrent network
- `trainer`: binarized gate learning with straight-through gradients
- `cli`: the `gaplog` command

The fixpoint and enumeration kernels run on a compiled C extension when it
built, with a pure-Python fallback (`gaplog._kernels.BACKEND` names the one
in use; set GAPLOG_BACKEND=python to force the fallback).
"""

from ._kernels import BACKEND
from .lattice import Conflict, Interval, LatticeConfig, LatticeMode, SIGNED, unit
from .program import (
    AnnotatedLiteral,
    Literal,
    Program,
    Rule,
    add_inconsistency_rules,
    prune,
    validate,
)
from .parser import parse_program, serialize
from .engine import (
    ConflictReport,
    FixpointResult,
    Interpretation,
    check_consistency,
    entails,
    enumerate_models,
    immediate_consequence,
    least_fixpoint,
    satisfies,
)
from .neural import UnrolledNet, compile_network, equivalence_check, forward, rule_activation
from .trainer import TrainConfig, TrainingExample, discrete_oracle, evaluate, train

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Conflict",
    "Interval",
    "LatticeConfig",
    "LatticeMode",
    "SIGNED",
    "unit",
    "AnnotatedLiteral",
    "Literal",
    "Program",
    "Rule",
    "add_inconsistency_rules",
    "prune",
    "validate",
    "parse_program",
    "serialize",
    "ConflictReport",
    "FixpointResult",
    "Interpretation",
    "check_consistency",
    "entails",
    "enumerate_models",
    "immediate_consequence",
    "least_fixpoint",
    "satisfies",
    "UnrolledNet",
    "compile_network",
    "equivalence_check",
    "forward",
    "rule_activation",
    "TrainConfig",
    "TrainingExample",
    "discrete_oracle",
    "evaluate",
    "train",
    "__version__",
]
