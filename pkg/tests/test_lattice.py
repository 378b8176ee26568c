"""Lattice laws: ordering, supremum, negation, height, conversion."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaplog import lattice
from gaplog.errors import ConfigMismatchError, ConversionError, OffGridError
from gaplog.lattice import Conflict, Interval, LatticeConfig, LatticeMode

from helpers import hasse_longest_chain

U10 = lattice.unit(10)


def iv(lo, up, cfg=U10):
    return lattice.from_values(cfg, lo, up)


class TestConfig:
    def test_signed_is_resolution_one(self):
        with pytest.raises(ValueError):
            LatticeConfig(LatticeMode.SIGNED, 2)

    def test_resolution_positive(self):
        with pytest.raises(ValueError):
            lattice.unit(0)

    def test_invalid_interval_rejected(self):
        with pytest.raises(ValueError):
            Interval(2, 1, U10)
        with pytest.raises(ValueError):
            Interval(0, 11, U10)


class TestLeq:
    def test_bottom_below_top(self):
        assert lattice.leq(iv(0, 1), iv(1, 1))

    def test_reflexive_points(self):
        for k in range(11):
            a = Interval(k, k, U10)
            assert lattice.leq(a, a)

    def test_overlapping_intervals_incomparable(self):
        assert not lattice.leq(iv(0.2, 0.6), iv(0.5, 0.9))
        assert not lattice.leq(iv(0.5, 0.9), iv(0.2, 0.6))

    def test_mixed_config_rejected(self):
        with pytest.raises(ConfigMismatchError):
            lattice.leq(iv(0, 1), lattice.bottom(lattice.SIGNED))


class TestSup:
    def test_bottom_is_identity(self):
        assert lattice.sup([iv(0, 1), iv(0.4, 0.9)]) == iv(0.4, 0.9)

    def test_distinct_tops_conflict(self):
        result = lattice.sup([iv(0, 0), iv(1, 1)])
        assert isinstance(result, Conflict)

    def test_componentwise(self):
        assert lattice.sup([iv(0.2, 0.6), iv(0.5, 0.9)]) == iv(0.5, 0.6)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            lattice.sup([])


class TestNegate:
    def test_formula(self):
        assert lattice.negate(iv(0.2, 0.7)) == iv(0.3, 0.8)

    def test_bottom_self_negating(self):
        assert lattice.negate(iv(0, 1)) == iv(0, 1)

    def test_involution(self):
        a = iv(0.1, 0.4)
        assert lattice.negate(lattice.negate(a)) == a


class TestHeight:
    def test_values(self):
        assert lattice.height(lattice.unit(1)) == 2
        assert lattice.height(lattice.SIGNED) == 2
        assert lattice.height(U10) == 11

    @pytest.mark.parametrize("n", range(1, 7))
    def test_matches_longest_chain_search(self, n):
        cfg = lattice.unit(n)
        assert lattice.height(cfg) == hasse_longest_chain(cfg)


class TestExhaustiveLaws:
    """Order axioms and least-upper-bound property for N <= 4."""

    @pytest.mark.parametrize("n", range(1, 5))
    def test_partial_order(self, n):
        elems = lattice.elements(lattice.unit(n))
        for a in elems:
            assert lattice.leq(a, a)
        for a, b in itertools.product(elems, repeat=2):
            if lattice.leq(a, b) and lattice.leq(b, a):
                assert a == b
        for a, b, c in itertools.product(elems, repeat=3):
            if lattice.leq(a, b) and lattice.leq(b, c):
                assert lattice.leq(a, c)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_sup_is_least_upper_bound(self, n):
        elems = lattice.elements(lattice.unit(n))
        for a, b in itertools.combinations_with_replacement(elems, 2):
            s = lattice.sup([a, b])
            uppers = [c for c in elems if lattice.leq(a, c) and lattice.leq(b, c)]
            if isinstance(s, Conflict):
                assert not uppers
            else:
                assert lattice.leq(a, s) and lattice.leq(b, s)
                for c in uppers:
                    assert lattice.leq(s, c)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_negate_preserves_order(self, n):
        # Negation flips the interval, not the knowledge order.
        elems = lattice.elements(lattice.unit(n))
        for a, b in itertools.product(elems, repeat=2):
            if lattice.leq(a, b):
                assert lattice.leq(lattice.negate(a), lattice.negate(b))


class TestConvert:
    def test_signed_unit1_relabelling(self):
        a = lattice.from_values(lattice.SIGNED, -1, 1)
        b = lattice.convert(a, lattice.unit(1))
        assert (b.lower, b.upper) == (0, 1)
        assert lattice.convert(b, lattice.SIGNED) == a

    def test_exact_upscale(self):
        a = iv(0.5, 1.0, lattice.unit(2))
        b = lattice.convert(a, U10)
        assert b == iv(0.5, 1.0)

    def test_inexact_rejected(self):
        a = Interval(1, 3, lattice.unit(3))
        with pytest.raises(ConversionError):
            lattice.convert(a, U10)

    @given(st.integers(1, 6), st.integers(1, 4), st.data())
    @settings(max_examples=100, deadline=None)
    def test_round_trip_through_multiple(self, n, factor, data):
        cfg = lattice.unit(n)
        big = lattice.unit(n * factor)
        lo = data.draw(st.integers(0, n))
        up = data.draw(st.integers(lo, n))
        a = Interval(lo, up, cfg)
        assert lattice.convert(lattice.convert(a, big), cfg) == a


class TestText:
    def test_signed_rendering(self):
        cfg = lattice.SIGNED
        assert str(lattice.bottom(cfg)) == "[-1,1]"
        assert str(lattice.true_top(cfg)) == "[1,1]"
        assert str(lattice.false_top(cfg)) == "[-1,-1]"

    def test_unit_rendering(self):
        assert str(iv(0.5, 1.0)) == "[0.5,1]"
        assert str(iv(0.8, 1.0)) == "[0.8,1]"
        assert str(Interval(1, 2, lattice.unit(3))) == "[1/3,2/3]"

    def test_off_grid_rejected(self):
        with pytest.raises(OffGridError):
            lattice.from_values(U10, 0.33, 1.0)

    @given(st.integers(1, 12), st.data())
    @settings(max_examples=200, deadline=None)
    def test_format_parse_round_trip(self, n, data):
        from fractions import Fraction

        cfg = lattice.unit(n)
        k = data.draw(st.integers(0, n))
        text = lattice.format_value(cfg, k)
        if "/" in text:
            num, den = text.split("/")
            value = Fraction(int(num), int(den))
        else:
            value = Fraction(text)
        assert value == Fraction(k, n)
