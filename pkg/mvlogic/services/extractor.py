"""
Network to Term Extraction

A clipped neuron sigma(f) with f = sum m_i x_i + b is turned into a term by
peeling one unit (or, for real weights, at most one unit) off the
coefficient m_p of largest magnitude (positive first on ties, then lowest
index):

    sigma(f) = (sigma(f - m x_p) + m x_p) * sigma(f - m x_p + 1)

where '+' and '*' are the Lukasiewicz connectives. When m_p is negative the
neuron is negated first, sigma(f) = ~sigma(1 - f). Constant
neurons fold to 0 or 1. Rational neurons are reduced to integer ones through
s * sigma(f) = sum_{i<s} sigma(s f - i).

Whole networks are lowered to clipped ReLUs, every neuron is extracted over
fresh variables standing for the previous layer, and the layer terms are
substituted into each other.
"""

import logging
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from mvlogic.config import config
from mvlogic.models.network import Activation, AffineRow, Network, eval_network, to_kind
from mvlogic.models.scalar import ScalarKind
from mvlogic.models.term import (
    ONE, ZERO, Delta, LogicTier, Not, Odot, Oplus, Scale, Term, Var,
    is_zero, rewrite_node, substitute, term_length,
)
from mvlogic.services.lowering import ExtractionError, output_range, relu_to_crelu

logger = logging.getLogger(__name__)


class RangeViolationError(ExtractionError):
    """Raised when a network output leaves [0,1] at a concrete point"""

    def __init__(self, message: str, witness: Sequence[Fraction], value):
        super().__init__(message)
        self.witness = list(witness)
        self.value = value


class CapExceededError(ExtractionError):
    """Raised when a configured size cap would be exceeded"""

    def __init__(self, message: str, required):
        super().__init__(message)
        self.required = required


class NeuronMemo:
    """Thread-safe insert-or-get cache of neuron terms keyed on (coeffs, bias)"""

    def __init__(self):
        self._terms: Dict[Hashable, Term] = {}
        self._lock = threading.Lock()

    def get(self, key: Hashable) -> Optional[Term]:
        with self._lock:
            return self._terms.get(key)

    def insert(self, key: Hashable, term: Term) -> Term:
        """Store term unless another caller got there first; return the stored term"""
        with self._lock:
            return self._terms.setdefault(key, term)

    def __contains__(self, key: Hashable) -> bool:
        with self._lock:
            return key in self._terms

    def __len__(self) -> int:
        with self._lock:
            return len(self._terms)


# Peeling engine

class _Peeler:
    """
    Iterative peeling over (coeffs, bias) states

    Integer mode peels exactly one unit per step and folds exactly; real
    mode peels min(1, m_p) and folds with tolerance eps.
    """

    def __init__(self, memo: NeuronMemo, real: bool = False, eps: float = 0.0):
        self.memo = memo
        self.real = real
        self.eps = eps
        self.tag = 'real' if real else 'int'

    def _normalize(self, coeffs: Tuple, bias) -> Tuple[Tuple, object]:
        if self.real:
            coeffs = tuple(0.0 if abs(c) <= self.eps else float(c) for c in coeffs)
            bias = float(bias)
        return coeffs, bias

    def _fold(self, coeffs: Tuple, bias) -> Optional[Term]:
        high = bias + sum(c for c in coeffs if c > 0)
        low = bias + sum(c for c in coeffs if c < 0)
        if high <= self.eps:
            return ZERO
        if low >= 1 - self.eps:
            return ONE
        if self.real and not any(coeffs):
            return Scale(bias, ONE)
        return None

    def _plan(self, coeffs: Tuple, bias):
        """('term', t) | ('negate', state) | ('peel', index, amount, low_state, high_state)"""
        folded = self._fold(coeffs, bias)
        if folded is not None:
            return ('term', folded)
        pivot = max(
            (i for i, c in enumerate(coeffs) if c != 0),
            key=lambda i: (abs(coeffs[i]), coeffs[i] > 0, -i),
        )
        if coeffs[pivot] < 0:
            return ('negate', self._normalize(tuple(-c for c in coeffs), 1 - bias))
        amount = min(1, coeffs[pivot]) if self.real else 1
        reduced = list(coeffs)
        reduced[pivot] = coeffs[pivot] - amount
        reduced = tuple(reduced)
        return (
            'peel', pivot, amount,
            self._normalize(reduced, bias),
            self._normalize(reduced, bias + 1),
        )

    def _key(self, state) -> Hashable:
        return (self.tag,) + state

    def _leaf(self, index: int, amount) -> Term:
        if self.real and amount != 1:
            return Scale(float(amount), Var(index + 1))
        return Var(index + 1)

    def solve(self, coeffs: Tuple, bias) -> Term:
        root = self._normalize(tuple(coeffs), bias)
        stack = [root]
        while stack:
            state = stack[-1]
            if self._key(state) in self.memo:
                stack.pop()
                continue
            plan = self._plan(*state)
            if plan[0] == 'term':
                self.memo.insert(self._key(state), plan[1])
                stack.pop()
                continue
            needed = [plan[1]] if plan[0] == 'negate' else [plan[3], plan[4]]
            missing = [s for s in needed if self._key(s) not in self.memo]
            if missing:
                stack.extend(missing)
                continue
            stack.pop()
            if plan[0] == 'negate':
                term = rewrite_node(Not(self.memo.get(self._key(plan[1]))))
            else:
                _, pivot, amount, low_state, high_state = plan
                low = self.memo.get(self._key(low_state))
                high = self.memo.get(self._key(high_state))
                joined = rewrite_node(Oplus(low, self._leaf(pivot, amount)))
                term = rewrite_node(Odot(joined, high))
            self.memo.insert(self._key(state), term)
        return self.memo.get(self._key(root))


def _as_integers(row: AffineRow) -> Tuple[Tuple[int, ...], int]:
    values = []
    for value in row.scalars():
        exact = Fraction(value)
        if isinstance(value, float) or exact.denominator != 1:
            raise ExtractionError(f"Integer extraction needs integer weights, got {value!r}")
        values.append(int(exact))
    return tuple(values[:-1]), values[-1]


def extract_neuron_integer(row: AffineRow, memo: NeuronMemo = None) -> Term:
    """
    MV term equal to sigma(row) on [0,1]^n

    Raises:
        ExtractionError: If a weight is not an integer
    """
    coeffs, bias = _as_integers(row)
    return _Peeler(memo if memo is not None else NeuronMemo()).solve(coeffs, bias)


def extract_neuron_rational(row: AffineRow, memo: NeuronMemo = None, max_lcm: int = None) -> Term:
    """
    DMV term equal to sigma(row) on [0,1]^n

    Args:
        row: Neuron with rational weights
        memo: Shared cache for the integer sub-problems
        max_lcm: Cap on the common denominator s (config.max_lcm by default)

    Raises:
        CapExceededError: If s exceeds the cap; ``required`` holds s
    """
    max_lcm = max_lcm or config.max_lcm
    memo = memo if memo is not None else NeuronMemo()
    values = []
    for value in row.scalars():
        if isinstance(value, float):
            raise ExtractionError(f"Rational extraction needs exact weights, got {value!r}")
        values.append(Fraction(value))
    s = math.lcm(*(v.denominator for v in values))
    if s > max_lcm:
        raise CapExceededError(
            f"Common denominator {s} exceeds max_lcm={max_lcm}", required=s
        )
    coeffs = tuple(int(v * s) for v in values[:-1])
    bias = int(values[-1] * s)
    peeler = _Peeler(memo)
    if s == 1:
        return peeler.solve(coeffs, bias)

    high = values[-1] + sum(v for v in values[:-1] if v > 0)
    low = values[-1] + sum(v for v in values[:-1] if v < 0)
    if high <= 0:
        return ZERO
    if low >= 1:
        return ONE

    result: Optional[Term] = None
    for i in range(s):
        part = peeler.solve(coeffs, bias - i)
        if is_zero(part):
            continue
        piece = rewrite_node(Delta(s, part))
        result = piece if result is None else rewrite_node(Oplus(result, piece))
    return result if result is not None else ZERO


def extract_neuron_real(row: AffineRow, memo: NeuronMemo = None, eps: float = None,
                        max_magnitude: float = None) -> Term:
    """
    RMV term within eps of sigma(row) on [0,1]^n

    Raises:
        CapExceededError: If a coefficient magnitude exceeds the cap
        ExtractionError: On non-finite weights
    """
    eps = config.eps if eps is None else eps
    max_magnitude = max_magnitude or config.max_real_magnitude
    values = [float(v) for v in row.scalars()]
    for value in values:
        if not math.isfinite(value):
            raise ExtractionError(f"Real extraction needs finite weights, got {value!r}")
    worst = max(abs(v) for v in values[:-1])
    if worst > max_magnitude:
        raise CapExceededError(
            f"Coefficient magnitude {worst} exceeds max_real_magnitude={max_magnitude}",
            required=worst,
        )
    peeler = _Peeler(memo if memo is not None else NeuronMemo(), real=True, eps=eps)
    return peeler.solve(tuple(values[:-1]), values[-1])


# Whole networks

_LOGIC_KINDS = {
    LogicTier.MV: (ScalarKind.INTEGER,),
    LogicTier.DMV: (ScalarKind.INTEGER, ScalarKind.RATIONAL),
    LogicTier.RMV: (ScalarKind.INTEGER, ScalarKind.RATIONAL, ScalarKind.REAL),
}


@dataclass
class ExtractionResult:
    term: Term
    length: int
    logic: LogicTier
    lowered: Network
    neuron_terms: List[List[Term]] = field(default_factory=list)
    range_certified: bool = True


def _range_check_points(dim: int, denominator: int, samples: int):
    """Every grid point when the grid is small, otherwise seeded random grid points"""
    if (denominator + 1) ** dim <= samples:
        for flat in range((denominator + 1) ** dim):
            point = []
            for _ in range(dim):
                flat, digit = divmod(flat, denominator + 1)
                point.append(Fraction(digit, denominator))
            yield point
        return
    rng = np.random.default_rng(0)
    for _ in range(samples):
        yield [Fraction(int(n), denominator) for n in rng.integers(0, denominator + 1, size=dim)]


def _check_range(net: Network, eps: float) -> bool:
    """
    True when interval bounds certify outputs in [0,1]

    Raises:
        RangeViolationError: If a grid point maps outside [0,1]
    """
    slack = eps if net.scalar_kind is ScalarKind.REAL else 0
    (low, high), = output_range(net)
    if low >= -slack and high <= 1 + slack:
        return True
    for point in _range_check_points(net.input_dim, config.grid_denominator, config.grid_samples):
        value = eval_network(net, point)[0]
        if value < -slack or value > 1 + slack:
            raise RangeViolationError(
                f"Network output {value} at {[str(p) for p in point]} is outside [0,1]",
                witness=point,
                value=value,
            )
    logger.info(
        f"Output bounds [{low}, {high}] are not certified within [0,1]; no grid point "
        f"violates the range, applying sigma to the output"
    )
    return False


def extract_network(net: Network, logic, max_lcm: int = None, eps: float = None,
                    max_magnitude: float = None) -> ExtractionResult:
    """
    Extract a term whose term function equals the network function

    Args:
        net: Network with a single output mapping [0,1]^n into [0,1]
        logic: 'mv', 'dmv' or 'rmv'; must admit the network's weight kind
        max_lcm: Rational denominator cap
        eps: Real folding tolerance
        max_magnitude: Real coefficient cap

    Returns:
        ExtractionResult with the term, its length, the lowered network and
        the per-layer neuron terms before substitution

    Raises:
        ExtractionError: On unsupported logic or output dimension
        RangeViolationError: If the network output leaves [0,1]
        CapExceededError: If a rational or real cap is exceeded
    """
    try:
        logic = LogicTier(logic)
    except ValueError:
        raise ExtractionError(f"Unknown logic {logic!r}, expected mv, dmv or rmv")
    if net.scalar_kind not in _LOGIC_KINDS[logic]:
        raise ExtractionError(
            f"Logic {logic.value} cannot express {net.scalar_kind.value} weights"
        )
    if net.output_dim != 1:
        raise ExtractionError(f"Extraction needs a single output, network has {net.output_dim}")
    eps = config.eps if eps is None else eps

    certified = _check_range(net, eps)
    work = net
    if logic is LogicTier.RMV and net.scalar_kind is ScalarKind.RATIONAL:
        work = to_kind(net, ScalarKind.REAL)
    lowered = relu_to_crelu(work) if work.activation is Activation.RELU else work
    logger.info(f"Lowered network widths {net.widths} -> {lowered.widths}")

    extract: Callable[[AffineRow], Term]
    memo = NeuronMemo()
    if lowered.scalar_kind is ScalarKind.INTEGER:
        extract = lambda r: extract_neuron_integer(r, memo)
    elif lowered.scalar_kind is ScalarKind.RATIONAL:
        extract = lambda r: extract_neuron_rational(r, memo, max_lcm)
    else:
        extract = lambda r: extract_neuron_real(r, memo, eps, max_magnitude)

    neuron_terms: List[List[Term]] = []
    previous: Optional[List[Term]] = None
    for position, layer in enumerate(lowered.layers, start=1):
        local = [extract(r) for r in layer]
        neuron_terms.append(local)
        if previous is None:
            current = local
        else:
            bindings = {j + 1: t for j, t in enumerate(previous)}
            shared: Dict[int, Term] = {}
            current = [substitute(t, bindings, shared) for t in local]
        logger.debug(f"Layer {position}: extracted {len(local)} neuron terms, memo size {len(memo)}")
        previous = current

    term = previous[0]
    length = term_length(term)
    logger.info(f"Extracted {logic.value} term of length {length}")
    return ExtractionResult(
        term=term,
        length=length,
        logic=logic,
        lowered=lowered,
        neuron_terms=neuron_terms,
        range_certified=certified,
    )

