"""
Lukasiewicz Logic Terms
Immutable term trees for MV, DMV (division) and RMV (real scaling) logic,
evaluation in the standard algebra on [0,1] and structural utilities.

Terms built by extraction share sub-terms heavily, so every traversal here
memoizes on object identity instead of hashing whole sub-trees.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Mapping, Sequence, Union

import numpy as np

from mvlogic.models.scalar import Scalar, check_point


class TermDomainError(ValueError):
    """Raised when a term is built or used outside its domain"""
    pass


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Var:
    index: int

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 1:
            raise TermDomainError(f"Variable index must be >= 1, got {self.index!r}")


@dataclass(frozen=True)
class Not:
    child: 'Term'


@dataclass(frozen=True)
class Oplus:
    left: 'Term'
    right: 'Term'


@dataclass(frozen=True)
class Odot:
    left: 'Term'
    right: 'Term'


@dataclass(frozen=True)
class Delta:
    """Division by a positive integer: delta_i(t) = t / i"""
    divisor: int
    child: 'Term'

    def __post_init__(self):
        if not isinstance(self.divisor, int) or self.divisor < 1:
            raise TermDomainError(f"Delta divisor must be >= 1, got {self.divisor!r}")


@dataclass(frozen=True)
class Scale:
    """Multiplication by a real factor in [0,1]"""
    factor: float
    child: 'Term'

    def __post_init__(self):
        if not 0 <= self.factor <= 1:
            raise TermDomainError(f"Scale factor must lie in [0,1], got {self.factor!r}")


Term = Union[Zero, Var, Not, Oplus, Odot, Delta, Scale]

ZERO = Zero()
ONE = Not(ZERO)


class LogicTier(str, Enum):
    MV = 'mv'
    DMV = 'dmv'
    RMV = 'rmv'


def is_zero(t: Term) -> bool:
    return isinstance(t, Zero)


def is_one(t: Term) -> bool:
    return isinstance(t, Not) and isinstance(t.child, Zero)


def children(t: Term) -> tuple:
    if isinstance(t, (Oplus, Odot)):
        return (t.left, t.right)
    if isinstance(t, (Not, Delta, Scale)):
        return (t.child,)
    return ()


# Standard algebra on [0,1]

def mv_oplus(a, b):
    return min(1, a + b)


def mv_odot(a, b):
    return max(0, a + b - 1)


def mv_not(a):
    return 1 - a


def relu(x):
    return max(0, x)


def crelu(x):
    return min(1, max(0, x))


def _fold(t: Term, leaf: Callable[[Term], object], node: Callable[[Term, tuple], object]):
    """Post-order fold over the shared DAG, visiting each distinct node once"""
    memo: Dict[int, object] = {}
    stack = [t]
    while stack:
        current = stack[-1]
        key = id(current)
        if key in memo:
            stack.pop()
            continue
        kids = children(current)
        pending = [kid for kid in kids if id(kid) not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if kids:
            memo[key] = node(current, tuple(memo[id(kid)] for kid in kids))
        else:
            memo[key] = leaf(current)
    return memo[id(t)]


def term_length(t: Term) -> int:
    """Number of variable occurrences in the fully expanded term"""
    return _fold(
        t,
        lambda leaf: 1 if isinstance(leaf, Var) else 0,
        lambda _node, values: sum(values),
    )


def term_arity(t: Term) -> int:
    """Largest variable index occurring in the term (0 for closed terms)"""
    return _fold(
        t,
        lambda leaf: leaf.index if isinstance(leaf, Var) else 0,
        lambda _node, values: max(values),
    )


def logic_tier(t: Term) -> LogicTier:
    def combine(node, values):
        tier = max(values, key=_TIER_ORDER.index)
        if isinstance(node, Scale):
            return LogicTier.RMV
        if isinstance(node, Delta) and tier is LogicTier.MV:
            return LogicTier.DMV
        return tier

    return _fold(t, lambda _leaf: LogicTier.MV, combine)


_TIER_ORDER = [LogicTier.MV, LogicTier.DMV, LogicTier.RMV]


def eval_term(t: Term, point: Sequence[Scalar]):
    """
    Evaluate a term in the standard algebra

    Args:
        t: Term to evaluate
        point: Values for x1..xn, each in [0,1]

    Returns:
        Exact Fraction for MV/DMV terms, float for terms containing Scale

    Raises:
        PointError: If the point is too short or leaves [0,1]
    """
    check_point(point, term_arity(t))
    real = logic_tier(t) is LogicTier.RMV
    values = [float(v) if real else Fraction(v) for v in point]
    zero = 0.0 if real else Fraction(0)

    def leaf(node):
        if isinstance(node, Var):
            return values[node.index - 1]
        return zero

    def combine(node, args):
        if isinstance(node, Not):
            return mv_not(args[0])
        if isinstance(node, Oplus):
            return mv_oplus(args[0], args[1])
        if isinstance(node, Odot):
            return mv_odot(args[0], args[1])
        if isinstance(node, Delta):
            return args[0] / node.divisor if real else Fraction(args[0], node.divisor)
        return node.factor * args[0]

    result = _fold(t, leaf, combine)
    return float(result) if real else Fraction(result)


def _rebuild(node: Term, kids: tuple) -> Term:
    """Copy of node with new children, reusing node when nothing changed"""
    if all(new is old for new, old in zip(kids, children(node))):
        return node
    if isinstance(node, Oplus):
        return Oplus(kids[0], kids[1])
    if isinstance(node, Odot):
        return Odot(kids[0], kids[1])
    if isinstance(node, Not):
        return Not(kids[0])
    if isinstance(node, Delta):
        return Delta(node.divisor, kids[0])
    return Scale(node.factor, kids[0])


def substitute(t: Term, bindings: Mapping[int, Term], memo: Dict[int, Term] = None) -> Term:
    """
    Replace every bound Var(i) by bindings[i]

    A memo shared between calls with the same bindings keeps the result a DAG.
    """
    if memo is None:
        memo = {}
    stack = [t]
    while stack:
        current = stack[-1]
        if id(current) in memo:
            stack.pop()
            continue
        kids = children(current)
        pending = [kid for kid in kids if id(kid) not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if isinstance(current, Var):
            memo[id(current)] = bindings.get(current.index, current)
        elif kids:
            memo[id(current)] = _rebuild(current, tuple(memo[id(kid)] for kid in kids))
        else:
            memo[id(current)] = current
    return memo[id(t)]


def rewrite_node(node: Term) -> Term:
    """
    Apply the local simplification rules to one node whose children are
    already simplified
    """
    if isinstance(node, Not):
        if isinstance(node.child, Not):
            return node.child.child
        return node
    if isinstance(node, Oplus):
        left, right = node.left, node.right
        if is_zero(left):
            return right
        if is_zero(right):
            return left
        if is_one(left) or is_one(right):
            return ONE
        return node
    if isinstance(node, Odot):
        left, right = node.left, node.right
        if is_one(left):
            return right
        if is_one(right):
            return left
        if is_zero(left) or is_zero(right):
            return ZERO
        return node
    if isinstance(node, Delta):
        if node.divisor == 1:
            return node.child
        if is_zero(node.child):
            return ZERO
        return node
    if isinstance(node, Scale):
        if node.factor == 1:
            return node.child
        if node.factor == 0 or is_zero(node.child):
            return ZERO
        return node
    return node


def simplify(t: Term) -> Term:
    """Bottom-up rewriting with the unit/absorption/double-negation rules"""
    return _fold(
        t,
        lambda leaf: leaf,
        lambda node, kids: rewrite_node(_rebuild(node, kids)),
    )


def min_max_encode(kind: str, a: Term, b: Term) -> Term:
    """Encode min(a, b) or max(a, b) with the MV connectives"""
    if kind == 'min':
        return Odot(Not(Odot(Not(a), b)), b)
    if kind == 'max':
        return Oplus(Not(Oplus(Not(a), b)), b)
    raise TermDomainError(f"Unknown encoding {kind!r}, expected 'min' or 'max'")


def random_term(length: int, arity: int, seed: int) -> Term:
    """
    Random MV term of exact length by recursive length splitting

    Args:
        length: Number of variable occurrences (>= 1)
        arity: Variables are drawn uniformly from x1..x_arity
        seed: Non-negative integer seed; equal seeds give equal terms
    """
    if length < 1:
        raise TermDomainError(f"Term length must be >= 1, got {length}")
    if arity < 1:
        raise TermDomainError(f"Arity must be >= 1, got {arity}")
    rng = np.random.default_rng(seed)
    return _grow(rng, length, arity)


def _grow(rng: np.random.Generator, length: int, arity: int) -> Term:
    if length == 1:
        leaf = Var(int(rng.integers(1, arity + 1)))
        return Not(leaf) if rng.integers(2) else leaf
    connective = Oplus if rng.integers(2) == 0 else Odot
    split = int(rng.integers(1, length))
    node = connective(_grow(rng, split, arity), _grow(rng, length - split, arity))
    return Not(node) if rng.integers(2) else node
