"""The gated-AND activation and the unrolled network's engine equivalence."""

import itertools

import pytest

from gaplog import lattice, neural, randgen
from gaplog.neural import (
    compile_network,
    dump_network,
    equivalence_check,
    find_mismatch,
    forward,
    forward_cell,
    forward_states,
    initial_state,
    rule_activation,
)
from gaplog.program import Literal, add_inconsistency_rules

from helpers import and_oracle, seeded, signed_program


class TestActivation:
    def test_examples(self):
        assert rule_activation((1, 1), (1, 1)) == 1
        assert rule_activation((1, 1), (1, -1)) == -1
        assert rule_activation((1, -1), (1, -1)) == 1

    def test_empty_gates_fire(self):
        assert rule_activation((), ()) == 1
        assert rule_activation((-1, -1), (-1, -1)) == 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rule_activation((1,), (1, 1))

    def test_bad_values(self):
        with pytest.raises(ValueError):
            rule_activation((0,), (1,))

    @pytest.mark.parametrize("n", range(0, 7))
    def test_matches_and_oracle_exhaustive(self, n):
        for theta in itertools.product((-1, 1), repeat=n):
            for x in itertools.product((-1, 1), repeat=n):
                assert rule_activation(theta, x) == and_oracle(theta, x)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_monotone_in_inputs(self, n):
        for theta in itertools.product((-1, 1), repeat=n):
            for x in itertools.product((-1, 1), repeat=n):
                base = rule_activation(theta, x)
                for j in range(n):
                    if x[j] == -1:
                        raised = list(x)
                        raised[j] = 1
                        assert rule_activation(theta, tuple(raised)) >= base


class TestForwardCell:
    def test_fact_row_fires(self):
        p = signed_program("a : [1,1] <- .")
        net = compile_network(p)
        out = forward_cell(net, initial_state(net))
        assert out[Literal(0).index] == 1

    def test_ruleless_literal_passthrough(self):
        p = signed_program("a : [1,1] <- .")
        net = compile_network(p)
        state = (-1, -1, 1, -1)  # b set by hand
        out = forward_cell(net, state)
        assert out[2] == 1

    def test_max_pool_over_rows(self):
        p = signed_program("a : [1,1] <- b : [1,1]. a : [1,1] <- .")
        net = compile_network(p)
        out = forward_cell(net, initial_state(net))
        # first rule emits -1 (body unsatisfied), second fires; pool takes 1
        assert out[0] == 1

    def test_mirror_row_raises_negation(self):
        p = signed_program("a : [-1,-1] <- .")
        net = compile_network(p)
        out = forward_cell(net, initial_state(net))
        assert out[Literal(0, True).index] == 1
        assert out[Literal(0).index] == -1

    def test_block_row_counts(self):
        p = signed_program(
            "a : [1,1] <- . a : [1,1] <- b : [1,1]. param r(2) : a <- ?b."
        )
        net = compile_network(p)
        block = net.blocks[Literal(0).index]
        assert block.rule_rows == p.rule_count_for(Literal(0)) == 4


class TestForward:
    CHAIN = "a : [1,1] <- . b : [1,1] <- a : [1,1]. c : [1,1] <- b : [1,1]."

    def test_zero_steps(self):
        net = compile_network(signed_program(self.CHAIN))
        assert forward(net, 0) == initial_state(net)

    def test_chain_converts_one_literal_per_cell(self):
        net = compile_network(signed_program(self.CHAIN))
        after1 = forward(net, 1)
        assert (after1[0], after1[2], after1[4]) == (1, -1, -1)
        after3 = forward(net, 3)
        assert (after3[0], after3[2], after3[4]) == (1, 1, 1)

    def test_default_depth_is_convergence_bound(self):
        p = signed_program(self.CHAIN)
        net = compile_network(p)
        assert net.depth == lattice.height(p.cfg) * p.n_literals

    def test_stationary_at_depth(self):
        net = compile_network(signed_program(self.CHAIN))
        states = forward_states(net)
        assert states[-1] == states[-2]


class TestEquivalence:
    def test_chain_program(self):
        assert equivalence_check(signed_program(TestForward.CHAIN))

    def test_random_mixed_programs(self):
        rng = seeded(21)
        for _ in range(150):
            p = randgen.random_program(
                rng,
                n_atoms=rng.randint(1, 5),
                n_rules=rng.randint(1, 9),
                param_fraction=0.35,
            )
            assert find_mismatch(p) is None

    def test_conflicting_program_flags_through_incon_at_same_step(self):
        p = add_inconsistency_rules(
            signed_program("a : [1,1] <- . ~a : [1,1] <- .")
        )
        assert equivalence_check(p)
        net = compile_network(p)
        states = forward_states(net, 3)
        incon_idx = 2 * p.incon_atom()
        from gaplog.engine import iterate_states

        engine_states = iterate_states(p, 3)
        for t in range(3):
            assert (states[t][incon_idx] == 1) == (
                engine_states[t].lower_pos(p.incon_atom()) == 1
            )

    def test_unit_mode_rejected(self):
        from gaplog.errors import GaplogError
        from gaplog.parser import parse_program

        p = parse_program("a : [1,1] <- .", lattice.unit(10))
        with pytest.raises(GaplogError):
            compile_network(p)


class TestDump:
    def test_structure_listing(self):
        p = signed_program("a : [-1,-1] <- . param r(1) : b <- ?a, ?~c.")
        text = dump_network(compile_network(p))
        assert "block ~a:" in text
        assert "(mirror)" in text
        assert "theta=" in text
