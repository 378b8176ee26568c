"""DSL parsing, serialization, and the round-trip property."""

import pytest

from gaplog import lattice
from gaplog.errors import ParseError
from gaplog.parser import parse_annotated_literal, parse_program, serialize
from gaplog.program import ConstAnno, GatedAndAnno, Literal, prune, validate

from helpers import all_active, name_structure, seeded

U10 = lattice.unit(10)


class TestParse:
    def test_single_fact(self):
        p = parse_program("a : [1.0,1.0] <- .", U10)
        (rule,) = p.rules
        assert rule.is_fact
        assert rule.head == Literal(0)
        assert rule.head_anno.interval == lattice.from_values(U10, 1, 1)

    def test_rule_with_body(self):
        p = parse_program("b : [0.8,1.0] <- a : [0.5,1.0].", U10)
        (rule,) = p.rules
        assert len(rule.body) == 1
        assert rule.body[0].anno == lattice.from_values(U10, 0.5, 1.0)

    def test_negated_literals(self):
        p = parse_program("~a : [1,1] <- ~b : [-1,1].", lattice.SIGNED)
        (rule,) = p.rules
        assert rule.head == Literal(0, True)
        assert rule.body[0].lit == Literal(1, True)

    def test_duplicate_body_literal_rejected(self):
        with pytest.raises(ParseError, match="duplicate body literal"):
            parse_program(
                "a : [0.2,0.4] <- a : [0.3,1.0], a : [0.5,1.0].", U10
            )

    def test_off_grid_rejected(self):
        with pytest.raises(ParseError):
            parse_program("a : [0.33,1.0] <- .", U10)

    def test_negated_incon_rejected(self):
        with pytest.raises(ParseError, match="~incon"):
            parse_program("a : [1,1] <- ~incon : [1,1].", lattice.SIGNED)

    def test_syntax_error_has_position(self):
        with pytest.raises(ParseError) as err:
            parse_program("a : [1,1] <-\nb [0,1].", U10)
        assert err.value.line == 2

    def test_comments_and_whitespace(self):
        p = parse_program(
            "// header\n a : [1,1] <- . // trailing\n\n", lattice.SIGNED
        )
        assert len(p.rules) == 1

    def test_rational_values(self):
        p = parse_program("a : [1/3,2/3] <- .", lattice.unit(3))
        assert p.rules[0].head_anno.interval == lattice.Interval(1, 2, lattice.unit(3))

    def test_param_rule_expansion(self):
        p = parse_program("param r(2) : a <- ?b, ?~c.", lattice.SIGNED)
        assert len(p.rules) == 2
        for i, rule in enumerate(p.rules, start=1):
            assert isinstance(rule.head_anno, GatedAndAnno)
            assert rule.param_index == i
            assert rule.theta == (1, 1)
            assert [e.lit for e in rule.body] == [Literal(1), Literal(2, True)]
        assert validate(p) == []

    def test_param_requires_signed(self):
        with pytest.raises(ParseError, match="signed"):
            parse_program("param r(1) : a <- ?b.", U10)

    def test_param_duplicate_candidate(self):
        with pytest.raises(ParseError, match="duplicate candidate"):
            parse_program("param r(1) : a <- ?b, ?b.", lattice.SIGNED)

    def test_annotated_literal_query(self):
        p = parse_program("a : [1,1] <- .", lattice.SIGNED)
        q = parse_annotated_literal("~a:[-1,-1]", lattice.SIGNED, p.symbols)
        assert q.lit == Literal(0, True)
        assert q.anno == lattice.false_top(lattice.SIGNED)


class TestSerialize:
    def test_empty_program_has_header(self):
        p = parse_program("", lattice.SIGNED)
        text = serialize(p)
        assert text.startswith("//")
        assert parse_program(text, lattice.SIGNED).rules == ()

    def test_fact_round_trip(self):
        p = parse_program("a : [1,1] <- .", lattice.SIGNED)
        assert parse_program(serialize(p), lattice.SIGNED).rules == p.rules

    def test_param_round_trip(self):
        p = parse_program("param r(2) : a <- ?b, ?~c.", lattice.SIGNED)
        q = parse_program(serialize(p), lattice.SIGNED)
        assert q.rules == p.rules
        assert q.symbols.names() == p.symbols.names()

    def test_trained_theta_requires_prune(self):
        from gaplog.program import with_thetas

        p = parse_program("param r(1) : a <- ?b, ?c.", lattice.SIGNED)
        trained = with_thetas(p, {("r", 1): (1, -1)})
        with pytest.raises(ValueError, match="prune"):
            serialize(trained)
        pruned = prune(trained)
        text = serialize(pruned)
        assert parse_program(text, lattice.SIGNED).rules == pruned.rules

    def test_pruned_param_is_classical_syntax(self):
        p = parse_program("param r(1) : a <- ?b.", lattice.SIGNED)
        text = serialize(prune(p))
        assert "param" not in text
        assert "a : [1,1] <- b : [1,1]." in text

    @pytest.mark.parametrize("seed", range(40))
    def test_random_round_trip(self, seed):
        from gaplog import randgen

        rng = seeded(seed)
        cfg = rng.choice([lattice.SIGNED, lattice.unit(2), lattice.unit(10)])
        p = randgen.random_program(
            rng,
            cfg=cfg,
            n_atoms=rng.randint(1, 6),
            n_rules=rng.randint(0, 10),
            param_fraction=0.3 if cfg.is_signed else 0.0,
        )
        p = all_active(p)
        text = serialize(p)
        q = parse_program(text, cfg)
        assert name_structure(q) == name_structure(p)
        assert serialize(q) == text
