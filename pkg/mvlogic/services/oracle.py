"""
Equivalence Oracle
Exact breakpoint comparison for univariate MV/DMV terms and seeded rational
grid comparison for any arity.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from mvlogic.config import config
from mvlogic.models.pwl import Point, Pwl1D, minimal_points
from mvlogic.models.scalar import format_value
from mvlogic.models.term import (
    Delta, LogicTier, Not, Odot, Term, Var, Zero, children,
    eval_term, logic_tier, term_arity, term_length,
)

logger = logging.getLogger(__name__)

PointFunction = Callable[[Sequence[Fraction]], object]


class EquivalenceError(Exception):
    """Raised when two functions that should agree differ at a witness point"""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class OracleError(ValueError):
    """Raised when a comparison mode does not apply to the given terms"""
    pass


def farey_points(n: int):
    """All fractions a/b in [0,1] with b <= n, in increasing order"""
    a, b, c, d = 0, 1, 1, n
    yield Fraction(0)
    while c <= n:
        k = (n + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
        yield Fraction(a, b)


def sample_pwl(f: Callable[[Fraction], Fraction], limit: int) -> Pwl1D:
    """
    Breakpoints of f found by sampling every a/b with b <= limit

    A sample is a breakpoint when the secant slopes to its left and right
    neighbours differ; this is exact whenever all breakpoints of f have
    denominator at most ``limit``.
    """
    xs = list(farey_points(max(limit, 1)))
    ys = [Fraction(f(x)) for x in xs]
    kept: List[Point] = [(xs[0], ys[0])]
    for i in range(1, len(xs) - 1):
        left = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])
        right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        if left != right:
            kept.append((xs[i], ys[i]))
    kept.append((xs[-1], ys[-1]))
    return Pwl1D(minimal_points(kept))


def _univariate(t: Term) -> Callable[[Fraction], Fraction]:
    return lambda x: eval_term(t, [x])


def _interpolate(points: Sequence[Point], xs: Sequence[Fraction]) -> List[Fraction]:
    values = []
    j = 0
    for x in xs:
        while points[j + 1][0] < x:
            j += 1
        (x0, y0), (x1, y1) = points[j], points[j + 1]
        values.append(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    return values


def _clamped_sum(a: Sequence[Point], b: Sequence[Point], odot: bool) -> Tuple[Point, ...]:
    """Pointwise min(1, a + b) or max(0, a + b - 1) with kinks where a + b = 1"""
    xs = sorted({x for x, _ in a} | {x for x, _ in b})
    sums = [u + v for u, v in zip(_interpolate(a, xs), _interpolate(b, xs))]
    points: List[Point] = [(xs[0], sums[0])]
    for i in range(1, len(xs)):
        s0, s1 = sums[i - 1], sums[i]
        if (s0 - 1) * (s1 - 1) < 0:
            x0, x1 = xs[i - 1], xs[i]
            points.append((x0 + (1 - s0) * (x1 - x0) / (s1 - s0), Fraction(1)))
        points.append((xs[i], s1))
    if odot:
        return tuple((x, max(Fraction(0), s - 1)) for x, s in points)
    return tuple((x, min(Fraction(1), s)) for x, s in points)


def trace_pwl(t: Term) -> Pwl1D:
    """
    Exact piecewise-linear form of a univariate MV/DMV term

    Raises:
        OracleError: If the term has more than one variable or uses Scale
    """
    if term_arity(t) > 1:
        raise OracleError("Breakpoint tracing needs a term over x1 only")
    if logic_tier(t) is LogicTier.RMV:
        raise OracleError("Breakpoint tracing needs an MV or DMV term")

    traced: Dict[int, Tuple[Point, ...]] = {}
    stack = [t]
    while stack:
        node = stack[-1]
        if id(node) in traced:
            stack.pop()
            continue
        pending = [kid for kid in children(node) if id(kid) not in traced]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if isinstance(node, Zero):
            points = ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(0)))
        elif isinstance(node, Var):
            points = ((Fraction(0), Fraction(0)), (Fraction(1), Fraction(1)))
        elif isinstance(node, Not):
            points = tuple((x, 1 - y) for x, y in traced[id(node.child)])
        elif isinstance(node, Delta):
            points = tuple((x, y / node.divisor) for x, y in traced[id(node.child)])
        else:
            points = _clamped_sum(
                traced[id(node.left)], traced[id(node.right)], isinstance(node, Odot)
            )
        traced[id(node)] = minimal_points(points)
    return Pwl1D(traced[id(t)])


def term_pwl(t: Term, sample_limit: int = None) -> Pwl1D:
    """Minimal breakpoint form of a univariate term, by sampling or by tracing"""
    sample_limit = sample_limit or config.sample_limit
    length = term_length(t)
    if logic_tier(t) is LogicTier.MV and term_arity(t) <= 1 and length <= sample_limit:
        return sample_pwl(_univariate(t), max(length, 1))
    logger.debug(f"Tracing breakpoints of a term of length {length}")
    return trace_pwl(t)


def count_breakpoints(t: Term) -> int:
    """Interior breakpoints of a univariate MV term"""
    if term_arity(t) > 1:
        raise OracleError("Breakpoints are defined for terms over x1 only")
    return sample_pwl(_univariate(t), max(term_length(t), 1)).interior_count


def pwl_equal(a: Pwl1D, b: Pwl1D) -> bool:
    return a.points == b.points


def pwl_witness(a: Pwl1D, b: Pwl1D) -> Optional[Tuple[Fraction, Fraction, Fraction]]:
    """A breakpoint of either function where they differ, or None"""
    for x in sorted(set(a.interior) | set(b.interior) | {Fraction(0), Fraction(1)}):
        if a(x) != b(x):
            return x, a(x), b(x)
    return None


def grid_points(arity: int, denominator: int, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        numerators = rng.integers(0, denominator + 1, size=arity)
        yield [Fraction(int(n), denominator) for n in numerators]


def find_grid_witness(f: PointFunction, g: PointFunction, arity: int, denominator: int = None,
                      samples: int = None, seed: int = 0, eps: float = None):
    """
    First sampled grid point where f and g differ

    Returns:
        (point, f(point), g(point)) or None when every sample agrees
    """
    denominator = denominator or config.grid_denominator
    samples = samples or config.grid_samples
    for point in grid_points(arity, denominator, samples, seed):
        a, b = f(point), g(point)
        if (a != b) if eps is None else abs(a - b) > eps:
            return point, a, b
    return None


def grid_equal(f: PointFunction, g: PointFunction, arity: int, denominator: int = None,
               samples: int = None, seed: int = 0, eps: float = None) -> bool:
    """Agreement on seeded grid samples; False is a proof of inequivalence"""
    return find_grid_witness(f, g, arity, denominator, samples, seed, eps) is None


@dataclass
class Verdict:
    equivalent: bool
    mode: str
    witness: Optional[List[Fraction]] = None
    values: Optional[Tuple] = None

    def describe(self) -> str:
        if self.equivalent:
            return 'EQUIVALENT'
        point = ','.join(str(v) for v in self.witness)
        left, right = (format_value(v) for v in self.values)
        return f"NOT EQUIVALENT at ({point}): {left} vs {right}"


def verify_terms(a: Term, b: Term, mode: str = 'breakpoints', arity: int = None,
                 denominator: int = None, samples: int = None, seed: int = 0) -> Verdict:
    """
    Compare two terms' functions

    Args:
        mode: 'breakpoints' (univariate MV/DMV, exact) or 'grid'
        arity: Grid dimension; defaults to the larger term arity
    """
    if mode == 'breakpoints':
        if max(term_arity(a), term_arity(b), arity or 0) > 1:
            raise OracleError("Breakpoint mode compares terms over x1 only")
        witness = pwl_witness(term_pwl(a), term_pwl(b))
        if witness is None:
            return Verdict(True, mode)
        return Verdict(False, mode, [witness[0]], witness[1:])
    if mode == 'grid':
        arity = arity or max(term_arity(a), term_arity(b), 1)
        real = LogicTier.RMV in (logic_tier(a), logic_tier(b))
        found = find_grid_witness(
            lambda p: eval_term(a, p), lambda p: eval_term(b, p), arity,
            denominator, samples, seed, config.eps if real else None,
        )
        if found is None:
            return Verdict(True, mode)
        return Verdict(False, mode, found[0], found[1:])
    raise OracleError(f"Unknown mode {mode!r}, expected 'breakpoints' or 'grid'")
