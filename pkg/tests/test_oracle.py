"""
Unit tests for the equivalence oracle and piecewise-linear functions
"""

import pytest
from fractions import Fraction

from mvlogic.models.pwl import Pwl1D
from mvlogic.models.term import Delta, Var, eval_term, random_term, term_length
from mvlogic.models.term_syntax import parse_term
from mvlogic.services.compiler import sawtooth_pwl
from mvlogic.services.oracle import (
    OracleError, count_breakpoints, farey_points, find_grid_witness, grid_equal,
    pwl_equal, pwl_witness, sample_pwl, term_pwl, trace_pwl, verify_terms,
)

HALF = Fraction(1, 2)
G = '(x1 + x1) * ~(x1 * x1)'


class TestPwl1D:
    """Test piecewise-linear validation"""

    def test_needs_two_points(self):
        """Test a single point is refused"""
        with pytest.raises(ValueError, match="at least two points"):
            Pwl1D(((Fraction(0), Fraction(0)),))

    def test_must_span_unit_interval(self):
        """Test breakpoints start at 0 and end at 1"""
        with pytest.raises(ValueError, match="start at 0 and end at 1"):
            Pwl1D(((Fraction(0), Fraction(0)), (HALF, Fraction(1))))

    def test_strictly_increasing(self):
        """Test repeated abscissae are refused"""
        with pytest.raises(ValueError, match="strictly increasing"):
            Pwl1D(((Fraction(0), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(1), Fraction(1))))

    def test_values_in_range(self):
        """Test values above 1 are refused"""
        with pytest.raises(ValueError, match="must lie in"):
            Pwl1D(((Fraction(0), Fraction(0)), (Fraction(1), Fraction(2))))

    def test_minimality(self):
        """Test a collinear interior point is refused but from_points drops it"""
        points = ((Fraction(0), Fraction(0)), (HALF, HALF), (Fraction(1), Fraction(1)))
        with pytest.raises(ValueError, match="not minimal"):
            Pwl1D(points)
        assert Pwl1D.from_points(points).interior_count == 0

    def test_evaluation_and_slopes(self):
        """Test interpolation and slopes of g"""
        g = sawtooth_pwl(1)
        assert g(Fraction(1, 4)) == HALF
        assert g.slopes == [2, -2]


class TestBreakpoints:
    """Test breakpoint sampling and tracing"""

    def test_farey_sequence(self):
        """Test F_3"""
        assert list(farey_points(3)) == [
            Fraction(0), Fraction(1, 3), HALF, Fraction(2, 3), Fraction(1),
        ]

    def test_hat_term_has_one_breakpoint(self):
        """Test g has its only breakpoint at 1/2"""
        assert count_breakpoints(parse_term(G, 1)) == 1
        assert term_pwl(parse_term(G, 1)).interior == [HALF]

    def test_variable_has_none(self):
        """Test x1 is linear"""
        assert count_breakpoints(Var(1)) == 0

    def test_sampling_matches_tracing(self):
        """Test both methods agree on random univariate terms"""
        for seed in range(80):
            t = random_term(1 + seed % 10, 1, seed)
            sampled = sample_pwl(lambda x: eval_term(t, [x]), max(term_length(t), 1))
            assert pwl_equal(sampled, trace_pwl(t))

    def test_breakpoint_denominators_bounded_by_length(self):
        """Test breakpoints of a length-L term have denominators at most L"""
        for seed in range(80):
            t = random_term(2 + seed % 9, 1, seed)
            for x in trace_pwl(t).interior:
                assert x.denominator <= term_length(t)

    def test_trace_handles_division(self):
        """Test d2(x1) is x / 2"""
        assert trace_pwl(Delta(2, Var(1))).points == ((0, 0), (1, HALF))

    def test_trace_rejects_multivariate_terms(self):
        """Test tracing needs a single variable"""
        with pytest.raises(OracleError, match="x1 only"):
            trace_pwl(parse_term('x1 + x2', 2))

    def test_trace_rejects_scaled_terms(self):
        """Test tracing needs an MV or DMV term"""
        with pytest.raises(OracleError, match="MV or DMV"):
            trace_pwl(parse_term('s0.5(x1)', 1))

    def test_long_terms_are_traced(self):
        """Test terms longer than sample_limit still give exact forms"""
        g = parse_term(G, 1)
        t = parse_term(f'({G}) * ({G}) + ({G}) * ({G}) + ({G}) * ({G}) + x1', 1)
        assert term_length(t) > 24
        assert pwl_equal(term_pwl(t, sample_limit=8), term_pwl(t, sample_limit=48))
        assert pwl_equal(term_pwl(g, sample_limit=1), sawtooth_pwl(1))

    def test_witness_between_functions(self):
        """Test the witness of x1 vs g is the peak of g"""
        witness = pwl_witness(term_pwl(Var(1)), sawtooth_pwl(1))
        assert witness == (HALF, HALF, Fraction(1))


class TestGrid:
    """Test seeded grid comparison"""

    def test_equal_functions(self):
        """Test a term against itself"""
        t = parse_term('x1 * ~x2 + x3', 3)
        f = lambda p: eval_term(t, p)
        assert grid_equal(f, f, 3)

    def test_witness_is_reproducible(self):
        """Test the same seed gives the same witness"""
        f = lambda p: eval_term(parse_term('x1 + x2', 2), p)
        g = lambda p: eval_term(parse_term('x1 * x2', 2), p)
        first = find_grid_witness(f, g, 2, seed=5)
        assert first is not None
        assert find_grid_witness(f, g, 2, seed=5) == first

    def test_tolerance(self):
        """Test eps absorbs small differences"""
        f = lambda p: 0.5
        g = lambda p: 0.5 + 1e-12
        assert not grid_equal(f, g, 1)
        assert grid_equal(f, g, 1, eps=1e-9)


class TestVerifyTerms:
    """Test the verify entry point"""

    def test_equivalent_terms(self):
        """Test x1 + x1 equals ~(~x1 * ~x1)"""
        verdict = verify_terms(parse_term('x1 + x1', 1), parse_term('~(~x1 * ~x1)', 1))
        assert verdict.equivalent
        assert verdict.describe() == 'EQUIVALENT'

    def test_inequivalent_terms(self):
        """Test x1 + x1 against x1"""
        verdict = verify_terms(parse_term('x1 + x1', 1), parse_term('x1', 1))
        assert not verdict.equivalent
        assert verdict.describe() == 'NOT EQUIVALENT at (1/2): 1 vs 1/2'

    def test_grid_mode(self):
        """Test De Morgan over two variables"""
        verdict = verify_terms(parse_term('x1 * x2', 2), parse_term('~(~x1 + ~x2)', 2), mode='grid')
        assert verdict.equivalent

    def test_grid_mode_witness(self):
        """Test grid mode reports a witness point"""
        verdict = verify_terms(parse_term('x1', 2), parse_term('x2', 2), mode='grid')
        assert not verdict.equivalent
        assert len(verdict.witness) == 2

    def test_breakpoints_need_univariate_terms(self):
        """Test breakpoint mode refuses x2"""
        with pytest.raises(OracleError, match="x1 only"):
            verify_terms(parse_term('x1', 2), parse_term('x2', 2))

    def test_unknown_mode(self):
        """Test an unknown mode"""
        with pytest.raises(OracleError, match="Unknown mode"):
            verify_terms(Var(1), Var(1), mode='symbolic')
