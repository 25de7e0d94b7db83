"""
Randomized checks of the algebraic identities extraction relies on
"""

import pytest
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from mvlogic.models.term import (
    Var, crelu, eval_term, min_max_encode, mv_not, mv_odot, mv_oplus,
)

CHECKS = 10_000
unit = st.fractions(min_value=0, max_value=1, max_denominator=97)


def random_unit(rng, denominator=97):
    return Fraction(int(rng.integers(0, denominator + 1)), denominator)


def random_affine_value(rng):
    return Fraction(int(rng.integers(-400, 401)), 97)


class TestPeelingIdentity:
    """sigma(f) = (sigma(f - m x) + m x) * sigma(f - m x + 1)"""

    def test_integer_unit_peel(self, rng):
        """Test the exact identity with m = 1"""
        for _ in range(CHECKS):
            f, x = random_affine_value(rng), random_unit(rng)
            rest = f - x
            assert crelu(f) == mv_odot(mv_oplus(crelu(rest), x), crelu(rest + 1))

    def test_fractional_peel(self, rng):
        """Test the identity for m in [0,1] in exact arithmetic"""
        for _ in range(CHECKS):
            f, x, m = random_affine_value(rng), random_unit(rng), random_unit(rng, 16)
            rest = f - m * x
            assert crelu(f) == mv_odot(mv_oplus(crelu(rest), m * x), crelu(rest + 1))

    def test_real_peel(self, rng):
        """Test the identity in double precision"""
        for _ in range(CHECKS):
            f, x, m = float(rng.uniform(-4, 4)), float(rng.uniform()), float(rng.uniform())
            rest = f - m * x
            peeled = mv_odot(mv_oplus(crelu(rest), m * x), crelu(rest + 1))
            assert crelu(f) == pytest.approx(peeled, abs=1e-12)

    def test_negation(self, rng):
        """Test sigma(f) = ~sigma(1 - f)"""
        for _ in range(CHECKS):
            f = random_affine_value(rng)
            assert crelu(f) == mv_not(crelu(1 - f))


class TestDivisionIdentity:
    """s * sigma(f) = sum of sigma(s f - i) for i < s"""

    def test_sum_of_shifted_copies(self, rng):
        """Test the identity for s up to 12"""
        for _ in range(CHECKS):
            s = int(rng.integers(1, 13))
            f = random_affine_value(rng)
            assert s * crelu(f) == sum(crelu(s * f - i) for i in range(s))

    def test_divided_sum_never_saturates(self, rng):
        """Test the oplus of the divided copies equals their plain sum"""
        for _ in range(CHECKS):
            s = int(rng.integers(1, 13))
            f = random_affine_value(rng)
            total = Fraction(0)
            for i in range(s):
                total = mv_oplus(total, Fraction(crelu(s * f - i), s))
            assert total == crelu(f)


class TestMinMaxEncodings:
    """Test min and max expressed with MV connectives"""

    def test_min(self, rng):
        """Test ~(~x * y) * y is min(x, y)"""
        t = min_max_encode('min', Var(1), Var(2))
        for _ in range(CHECKS):
            x, y = random_unit(rng), random_unit(rng)
            assert eval_term(t, [x, y]) == min(x, y)

    def test_max(self, rng):
        """Test ~(~x + y) + y is max(x, y)"""
        t = min_max_encode('max', Var(1), Var(2))
        for _ in range(CHECKS):
            x, y = random_unit(rng), random_unit(rng)
            assert eval_term(t, [x, y]) == max(x, y)


class TestMvAxioms:
    """Test the standard algebra satisfies the MV-algebra axioms"""

    @settings(max_examples=500)
    @given(unit, unit, unit)
    def test_oplus_is_commutative_monoid(self, x, y, z):
        """Test commutativity, associativity and the neutral element"""
        assert mv_oplus(x, y) == mv_oplus(y, x)
        assert mv_oplus(x, mv_oplus(y, z)) == mv_oplus(mv_oplus(x, y), z)
        assert mv_oplus(x, 0) == x

    @settings(max_examples=500)
    @given(unit, unit)
    def test_negation_axioms(self, x, y):
        """Test involution, absorption by 1 and the Lukasiewicz axiom"""
        assert mv_not(mv_not(x)) == x
        assert mv_oplus(x, mv_not(0)) == mv_not(0)
        assert (mv_oplus(mv_not(mv_oplus(mv_not(x), y)), y)
                == mv_oplus(mv_not(mv_oplus(mv_not(y), x)), x))

    @settings(max_examples=500)
    @given(unit, unit)
    def test_odot_is_dual(self, x, y):
        """Test x * y = ~(~x + ~y)"""
        assert mv_odot(x, y) == mv_not(mv_oplus(mv_not(x), mv_not(y)))

    @pytest.mark.parametrize('name,axiom', [
        ('associativity', lambda x, y, z: mv_oplus(x, mv_oplus(y, z)) == mv_oplus(mv_oplus(x, y), z)),
        ('commutativity', lambda x, y, z: mv_oplus(x, y) == mv_oplus(y, x)),
        ('neutral zero', lambda x, y, z: mv_oplus(x, 0) == x),
        ('involution', lambda x, y, z: mv_not(mv_not(x)) == x),
        ('absorbing one', lambda x, y, z: mv_oplus(x, mv_not(0)) == mv_not(0)),
        ('lukasiewicz', lambda x, y, z: (mv_oplus(mv_not(mv_oplus(mv_not(x), y)), y)
                                         == mv_oplus(mv_not(mv_oplus(mv_not(y), x)), x))),
        ('odot duality', lambda x, y, z: mv_odot(x, y) == mv_not(mv_oplus(mv_not(x), mv_not(y)))),
    ])
    def test_axioms_on_random_grid(self, rng, name, axiom):
        """Test each axiom at 10^4 random rational points"""
        for _ in range(CHECKS):
            x, y, z = random_unit(rng), random_unit(rng), random_unit(rng)
            assert axiom(x, y, z), f"{name} fails at {x}, {y}, {z}"
