"""Engine semantics: satisfaction, the consequence operator, fixpoints,
entailment, consistency, and agreement with the exhaustive model oracle."""

import pytest

from gaplog import engine, lattice, randgen
from gaplog.engine import (
    ConflictReport,
    Interpretation,
    check_consistency,
    entails,
    enumerate_models,
    immediate_consequence,
    iterate_states,
    least_fixpoint,
    satisfies,
)
from gaplog.errors import (
    InconsistentProgramError,
    OracleTooLargeError,
    UndefinedSatisfactionError,
)
from gaplog.parser import parse_annotated_literal, parse_program
from gaplog.program import AnnotatedLiteral, Literal, make_program

from helpers import reference_models, seeded, signed_program, unit_program

U10 = lattice.unit(10)


def u10(text):
    return unit_program(text, 10)


def q(program, text):
    return parse_annotated_literal(text, program.cfg, program.symbols)


CHAIN = "a : [1,1] <- .\nb : [0.8,1] <- a : [0.5,1]."
CONFLICT = "a : [-1,-1] <- .\na : [1,1] <- ."


class TestInterpretation:
    def test_coupling(self):
        i = Interpretation.from_pairs(lattice.SIGNED, [(1, 0)])
        assert i.value(Literal(0)) == lattice.true_top(lattice.SIGNED)
        assert i.value(Literal(0, True)) == lattice.false_top(lattice.SIGNED)
        assert i.value(Literal(0)) == lattice.negate(i.value(Literal(0, True)))

    def test_signed_pair_examples(self):
        # lower pairs in signed values: (a, ~a) -> value of a
        cases = {
            (1, 0): (1, 1),   # +1 / -1 -> [1,1]
            (0, 0): (0, 1),   # -1 / -1 -> bottom
            (0, 1): (0, 0),   # -1 / +1 -> [0,0]
        }
        for pair, coords in cases.items():
            i = Interpretation.from_pairs(lattice.SIGNED, [pair])
            assert i.raw_bounds(Literal(0)) == coords

    def test_conflict_detection(self):
        i = Interpretation.from_pairs(lattice.SIGNED, [(1, 1)])
        assert i.conflicted_atoms() == [0]
        with pytest.raises(UndefinedSatisfactionError):
            i.value(Literal(0))

    def test_preceq(self):
        lo = Interpretation.from_pairs(lattice.SIGNED, [(0, 0), (0, 0)])
        hi = Interpretation.from_pairs(lattice.SIGNED, [(1, 0), (0, 1)])
        assert lo.preceq(hi)
        assert not hi.preceq(lo)


class TestSatisfies:
    def test_literal(self):
        p = u10("a : [1,1] <- .")
        i = Interpretation.from_pairs(U10, [(10, 0)])
        assert satisfies(i, q(p, "a:[0.5,1]"))

    def test_bottom_always_satisfied(self):
        p = u10("a : [1,1] <- .")
        i = Interpretation.bottom(p)
        assert satisfies(i, q(p, "a:[0,1]"))

    def test_vacuous_rule(self):
        p = signed_program("a : [1,1] <- b : [1,1].")
        i = Interpretation.bottom(p)
        assert satisfies(i, p.rules[0], p)

    def test_program(self):
        p = u10(CHAIN)
        good = Interpretation.from_pairs(U10, [(10, 0), (8, 0)])
        bad = Interpretation.from_pairs(U10, [(10, 0), (0, 0)])
        assert satisfies(good, p)
        assert not satisfies(bad, p)

    def test_conflicted_interpretation_rejected(self):
        p = signed_program("a : [1,1] <- .")
        i = Interpretation.from_pairs(lattice.SIGNED, [(1, 1)])
        with pytest.raises(UndefinedSatisfactionError):
            satisfies(i, q(p, "a:[1,1]"))


class TestImmediateConsequence:
    def test_single_fact_fires(self):
        p = signed_program("a : [1,1] <- .")
        out = immediate_consequence(p, Interpretation.bottom(p))
        assert isinstance(out, Interpretation)
        assert out.value(Literal(0)) == lattice.true_top(lattice.SIGNED)

    def test_conflicting_facts_report(self):
        p = signed_program(CONFLICT)
        out = immediate_consequence(p, Interpretation.bottom(p))
        assert isinstance(out, ConflictReport)
        kinds = {(w.atom, w.kind) for w in out.witnesses}
        assert (0, 1) in kinds  # no-common-upper-bound pair on atom a
        pair = next(w for w in out.witnesses if w.kind == 1)
        assert {str(pair.mu), str(pair.mu_prime)} == {"[-1,-1]", "[1,1]"}

    def test_empty_program_identity(self):
        p = make_program(lattice.SIGNED, ["a", "b"])
        i = Interpretation.from_pairs(lattice.SIGNED, [(1, 0), (0, 0)])
        assert immediate_consequence(p, i) == i


class TestLeastFixpoint:
    def test_chain(self):
        p = u10(CHAIN)
        r = least_fixpoint(p)
        assert r.consistent
        assert r.final.value(Literal(0)) == lattice.from_values(U10, 1, 1)
        assert r.final.value(Literal(1)) == lattice.from_values(U10, 0.8, 1)
        assert r.iterations <= 3

    def test_empty_program(self):
        p = make_program(lattice.SIGNED, ["a"])
        r = least_fixpoint(p)
        assert r.final == Interpretation.bottom(p)
        assert r.iterations == 1

    def test_conflict_reported(self):
        r = least_fixpoint(signed_program(CONFLICT))
        assert not r.consistent
        assert r.conflict is not None
        w = r.conflict.witnesses[0]
        assert (str(w.mu), str(w.mu_prime)) == ("[-1,-1]", "[1,1]")

    def test_traced_states(self):
        p = u10(CHAIN)
        r = least_fixpoint(p, traced=True)
        assert len(r.trace) == r.iterations
        assert r.trace[-1] == r.final
        assert r.trace[0].value(Literal(0)) == lattice.from_values(U10, 1, 1)

    def test_bound_never_exceeded(self):
        rng = seeded(77)
        for _ in range(150):
            p = randgen.random_program(
                rng, n_atoms=rng.randint(1, 5), n_rules=rng.randint(1, 9)
            )
            r = least_fixpoint(p)
            bound = max(1, lattice.height(p.cfg) * p.n_literals)
            assert r.iterations <= bound

    def test_rule_order_irrelevant(self):
        rng = seeded(78)
        for _ in range(60):
            p = randgen.random_program(
                rng, n_atoms=rng.randint(1, 5), n_rules=rng.randint(2, 9)
            )
            r1 = least_fixpoint(p)
            r2 = least_fixpoint(randgen.shuffled_rules(rng, p))
            assert r1.final == r2.final
            assert r1.consistent == r2.consistent


class TestEntails:
    def test_examples(self):
        p = u10(CHAIN)
        assert entails(p, q(p, "b:[0.5,1]"))
        assert entails(p, q(p, "b:[0,1]"))
        assert not entails(p, q(p, "b:[1,1]"))

    def test_unknown_atom_is_bottom(self):
        p = signed_program("a : [1,1] <- .")
        assert entails(p, q(p, "zz:[-1,1]"))
        assert not entails(p, q(p, "zz:[1,1]"))

    def test_inconsistent_program_rejected(self):
        p = signed_program(CONFLICT)
        with pytest.raises(InconsistentProgramError) as err:
            entails(p, q(p, "a:[1,1]"))
        assert err.value.report is not None


class TestCheckConsistency:
    def test_direct_contradiction(self):
        r = check_consistency(signed_program("a : [1,1] <- . ~a : [1,1] <- ."))
        assert not r.consistent
        assert r.incon_true

    def test_consistent_program(self):
        r = check_consistency(signed_program("a : [1,1] <- ."))
        assert r.consistent
        assert not r.incon_true

    def test_positive_true_programs_always_consistent(self):
        rng = seeded(11)
        for _ in range(80):
            p = randgen.random_program(
                rng,
                n_atoms=rng.randint(1, 5),
                n_rules=rng.randint(1, 8),
                positive_true_only=True,
            )
            assert check_consistency(p).consistent

    def test_detection_paths_agree(self):
        rng = seeded(12)
        for _ in range(200):
            p = randgen.random_program(
                rng, n_atoms=rng.randint(1, 5), n_rules=rng.randint(1, 9)
            )
            r = check_consistency(p)  # raises if the two paths disagree
            assert r.incon_true == (not r.consistent)


class TestEnumerateModels:
    def test_single_fact(self):
        p = signed_program("a : [1,1] <- .")
        r = enumerate_models(p)
        assert r.model_count == 1
        assert all(
            m.value(Literal(0)) == lattice.true_top(lattice.SIGNED) for m in r.models
        )
        assert r.entailed_bounds[Literal(0)] == lattice.true_top(lattice.SIGNED)

    def test_empty_program_one_atom(self):
        p = make_program(lattice.SIGNED, ["a"])
        r = enumerate_models(p)
        assert r.model_count == 3
        assert r.entailed_bounds[Literal(0)] == lattice.bottom(lattice.SIGNED)

    def test_inconsistent_program(self):
        r = enumerate_models(signed_program(CONFLICT))
        assert r.model_count == 0
        assert r.models == []
        assert r.entailed_bounds is None

    def test_cap(self):
        p = make_program(lattice.SIGNED, [f"x{i}" for i in range(8)])
        with pytest.raises(OracleTooLargeError):
            enumerate_models(p, cap=100)

    def test_matches_reference_enumeration(self):
        rng = seeded(13)
        for _ in range(40):
            cfg = rng.choice([lattice.SIGNED, lattice.unit(2)])
            p = randgen.random_program(
                rng, cfg=cfg, n_atoms=rng.randint(1, 3), n_rules=rng.randint(0, 6),
                param_fraction=0.2 if cfg.is_signed else 0.0,
            )
            fast = enumerate_models(p)
            slow = reference_models(p)
            assert fast.model_count == len(slow)
            assert (fast.models or []) == slow


class TestAgreementProperties:
    def test_entailment_matches_models(self):
        rng = seeded(14)
        for _ in range(60):
            p = randgen.random_consistent_program(
                rng, n_atoms=rng.randint(1, 4), n_rules=rng.randint(1, 8)
            )
            bounds = enumerate_models(p, collect_models=False).entailed_bounds
            for lit in p.literals():
                for el in lattice.elements(p.cfg):
                    expected = lattice.leq(el, bounds[lit])
                    assert entails(p, AnnotatedLiteral(lit, el)) == expected

    def test_consistency_matches_models(self):
        rng = seeded(15)
        for _ in range(120):
            cfg = rng.choice([lattice.SIGNED, lattice.unit(2)])
            p = randgen.random_program(
                rng, cfg=cfg, n_atoms=rng.randint(1, 3), n_rules=rng.randint(1, 7)
            )
            c = check_consistency(p).consistent
            m = enumerate_models(p, collect_models=False).model_count > 0
            assert c == m

    def test_inflationary_and_monotone(self):
        rng = seeded(16)
        checked = 0
        for _ in range(120):
            p = randgen.random_program(
                rng, n_atoms=rng.randint(1, 5), n_rules=rng.randint(1, 8),
                param_fraction=0.25,
            )
            for _ in range(6):
                i1, i2 = randgen.comparable_pair(rng, p)
                o1 = immediate_consequence(p, i1)
                o2 = immediate_consequence(p, i2)
                if isinstance(o1, ConflictReport) or isinstance(o2, ConflictReport):
                    continue
                checked += 1
                assert i1.preceq(o1)
                assert i2.preceq(o2)
                assert o1.preceq(o2)
        assert checked > 100


class TestIterateStates:
    def test_padding_after_convergence(self):
        p = signed_program("a : [1,1] <- .")
        states = iterate_states(p, 6)
        assert len(states) == 6
        assert states[0] == states[-1]

    def test_permissive_past_conflict(self):
        p = signed_program("a : [1,1] <- . ~a : [1,1] <- . b : [1,1] <- a : [1,1].")
        states = iterate_states(p, 4)
        # the machine keeps deriving b even though a is crossed
        assert states[-1].lower_pos(1) == 1
