"""Command-line front end.

Subcommands: eval, query, check, train, prune. Exit codes: 0 on success
(consistent / entailed), 1 for not-entailed or inconsistent, 2 for usage or
input errors, 3 for internal invariant violations. Output is deterministic
for fixed inputs and flags; `--json` switches to machine-readable records
with the same fields.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from . import engine, lattice, parser, trainer
from .errors import GaplogError, InconsistentProgramError, InternalInvariantError
from .lattice import LatticeConfig, LatticeMode
from .program import Literal, Program, prune as prune_program
from .trainer import TrainConfig

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _lattice_config(args) -> LatticeConfig:
    if args.mode == "signed":
        if args.resolution != 1:
            raise GaplogError("signed mode uses resolution 1")
        return lattice.SIGNED
    return LatticeConfig(LatticeMode.UNIT, args.resolution)


def _load_program(path: str, cfg: LatticeConfig) -> Program:
    with open(path, "r", encoding="utf-8") as fh:
        return parser.parse_program(fh.read(), cfg)


def _interval_json(iv: lattice.Interval) -> list:
    lo, up = iv.values()
    return [_num(lo), _num(up)]


def _num(value: Fraction):
    return int(value) if value.denominator == 1 else float(value)


def _witness_lines(program: Program, report: engine.ConflictReport) -> list[str]:
    lines = []
    for w in report.witnesses:
        name = program.symbols.name(w.atom)
        lines.append(
            f"INCONSISTENT at iter {report.iteration}: atom {name}: {w.mu} vs {w.mu_prime}"
        )
    return lines


def _print_trace(program: Program, result: engine.FixpointResult) -> None:
    previous = engine.Interpretation.bottom(program)
    for k, state in enumerate(result.trace or [], start=1):
        for lit_idx, (old, new) in enumerate(zip(previous.lowers, state.lowers)):
            if old != new:
                lit = Literal.from_index(lit_idx)
                lo, hi = state.raw_bounds(lit)
                name = program.symbols.literal_name(lit)
                iv = lattice.Interval(lo, max(lo, hi), program.cfg)
                print(f"iter {k}: {name} -> {iv}")
        previous = state


def cmd_eval(args) -> int:
    cfg = _lattice_config(args)
    program = _load_program(args.program, cfg)
    result = engine.least_fixpoint(program, traced=args.trace)
    if args.trace and result.trace:
        _print_trace(program, result)
    if not result.consistent:
        if args.json:
            print(json.dumps({"consistent": False, "iterations": result.iterations}))
        else:
            for line in _witness_lines(program, result.conflict or engine.ConflictReport(())):
                print(line)
        return EXIT_NEGATIVE
    values = {}
    for atom in range(program.n_atoms):
        iv = result.final.value(Literal(atom))
        if not iv.is_bottom:
            values[program.symbols.name(atom)] = iv
    if args.json:
        print(
            json.dumps(
                {
                    "consistent": True,
                    "iterations": result.iterations,
                    "literals": {k: _interval_json(v) for k, v in values.items()},
                }
            )
        )
    else:
        for name, iv in values.items():
            print(f"{name} -> {iv}")
        print(f"iterations: {result.iterations}")
    return EXIT_OK


def cmd_query(args) -> int:
    cfg = _lattice_config(args)
    program = _load_program(args.program, cfg)
    query = parser.parse_annotated_literal(args.literal, cfg, program.symbols)
    entailed = engine.entails(program, query)
    if args.json:
        print(json.dumps({"entailed": entailed}))
    else:
        print("ENTAILED" if entailed else "NOT-ENTAILED")
    return EXIT_OK if entailed else EXIT_NEGATIVE


def cmd_check(args) -> int:
    cfg = _lattice_config(args)
    program = _load_program(args.program, cfg)
    result = engine.check_consistency(program)
    if args.json:
        payload = {"consistent": result.consistent, "iterations": result.iterations}
        if not result.consistent and result.conflict:
            payload["witnesses"] = [
                {
                    "atom": result.program.symbols.name(w.atom),
                    "mu": _interval_json(w.mu),
                    "mu_prime": _interval_json(w.mu_prime),
                    "iteration": result.conflict.iteration,
                }
                for w in result.conflict.witnesses
            ]
        print(json.dumps(payload))
    else:
        if result.consistent:
            print("CONSISTENT")
        else:
            print("INCONSISTENT")
            if result.conflict:
                for line in _witness_lines(result.program, result.conflict):
                    print(line)
    return EXIT_OK if result.consistent else EXIT_NEGATIVE


def _write_program(program: Program, out: Optional[str]) -> None:
    text = parser.serialize(program)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_train(args) -> int:
    cfg = _lattice_config(args)
    if not cfg.is_signed:
        raise GaplogError("training requires signed mode")
    program = _load_program(args.program, cfg)
    data = trainer.load_dataset(args.data)
    policy, lam = _parse_policy(args.policy)
    config = TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=args.seed,
        policy=policy,
        penalty_weight=lam,
        depth=args.k,
    )
    result = trainer.train(program, data, config)
    _write_program(result.program, args.out)
    report = {
        "epochs_run": len(result.history),
        "accepted_epochs": result.accepted_epochs,
        "final_accuracy": result.final_accuracy,
        "final_consistency_rate": result.final_consistency_rate,
        "history": [
            {
                "epoch": rec.epoch,
                "loss": rec.loss,
                "hinge": rec.hinge,
                "penalty": rec.penalty,
                "accuracy": rec.accuracy,
                "consistency_rate": rec.consistency_rate,
                "accepted": rec.accepted,
                "learning_rate": rec.learning_rate,
            }
            for rec in result.history
        ],
    }
    if args.json:
        print(json.dumps(report))
    else:
        for rec in result.history:
            flag = "" if rec.accepted else " REJECTED"
            print(
                f"epoch {rec.epoch}: loss={rec.loss:.6g} acc={rec.accuracy:.4f} "
                f"consistent={rec.consistency_rate:.4f}{flag}"
            )
        print(
            f"final: accuracy={result.final_accuracy:.4f} "
            f"consistency={result.final_consistency_rate:.4f} "
            f"accepted={result.accepted_epochs}/{len(result.history)}"
        )
    return EXIT_OK


def _parse_policy(text: str) -> tuple[str, float]:
    if text == "hard":
        return trainer.POLICY_HARD, 10.0
    if text.startswith("penalty:"):
        return trainer.POLICY_PENALTY, float(text.split(":", 1)[1])
    if text == "penalty":
        return trainer.POLICY_PENALTY, 10.0
    raise GaplogError(f"unknown policy {text!r} (use hard or penalty:LAMBDA)")


def cmd_prune(args) -> int:
    cfg = _lattice_config(args)
    program = _load_program(args.program, cfg)
    _write_program(prune_program(program), args.out)
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="gaplog",
        description="Annotated logic programs: evaluate, query, check, train, prune.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, dataset=False):
        p.add_argument("program", help="program file in the gaplog DSL")
        if dataset:
            p.add_argument("data", help="JSONL dataset of training examples")
        p.add_argument("--mode", choices=("unit", "signed"), default="signed")
        p.add_argument("--resolution", type=int, default=1, metavar="N")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("eval", help="print the fixpoint annotations")
    common(p)
    p.add_argument("--trace", action="store_true", help="print per-iteration changes")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("query", help="decide entailment of LIT:[l,u]")
    common(p)
    p.add_argument("literal", help="annotated literal, e.g. b:[0.5,1]")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("check", help="consistency check with witnesses")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("train", help="learn parametrized rule gates")
    common(p, dataset=True)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=None, help="unroll depth override")
    p.add_argument(
        "--policy",
        default="hard",
        help="inconsistency policy: hard (default) or penalty:LAMBDA",
    )
    p.add_argument("--out", help="write the learned pruned program here")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("prune", help="erase gated-off candidates")
    common(p)
    p.add_argument("--out", help="write the pruned program here")
    p.set_defaults(fn=cmd_prune)

    return top


def main(argv: Optional[list[str]] = None) -> int:
    arg_parser = build_arg_parser()
    try:
        args = arg_parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.fn(args)
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InconsistentProgramError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (GaplogError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())
