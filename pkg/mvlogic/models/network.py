"""
Feed-forward networks on the unit cube
Fully connected layers with ReLU (rho) or clipped ReLU (sigma) activations
between affine maps, evaluated exactly for integer and rational weights.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Sequence, Tuple

from mvlogic.models.scalar import PointError, Scalar, ScalarKind, check_point, coerce, is_exact
from mvlogic.models.term import crelu, relu

logger = logging.getLogger(__name__)


class NetworkShapeError(ValueError):
    """Raised when layer dimensions do not chain or networks cannot be combined"""
    pass


class Activation(str, Enum):
    RELU = 'relu'
    CRELU = 'crelu'

    def apply(self, value):
        return relu(value) if self is Activation.RELU else crelu(value)


class OutputActivation(str, Enum):
    SAME = 'same'
    NONE = 'none'


@dataclass(frozen=True)
class AffineRow:
    """One neuron's pre-activation: sum(coeffs[i] * x[i]) + bias"""
    coeffs: Tuple[Scalar, ...]
    bias: Scalar

    def __post_init__(self):
        if not self.coeffs:
            raise NetworkShapeError("Affine row must have at least one coefficient")

    @property
    def width(self) -> int:
        return len(self.coeffs)

    def apply(self, values: Sequence[Scalar]) -> Scalar:
        total = self.bias
        for coeff, value in zip(self.coeffs, values):
            if coeff:
                total = total + coeff * value
        return total

    def shifted(self, amount) -> 'AffineRow':
        return AffineRow(self.coeffs, self.bias - amount)

    def negated(self) -> 'AffineRow':
        return AffineRow(tuple(-c for c in self.coeffs), -self.bias)

    def scalars(self) -> Tuple[Scalar, ...]:
        return self.coeffs + (self.bias,)

    def converted(self, kind: ScalarKind) -> 'AffineRow':
        return AffineRow(tuple(coerce(c, kind) for c in self.coeffs), coerce(self.bias, kind))

    def bounds(self, boxes: Sequence[Tuple[Scalar, Scalar]]) -> Tuple[Scalar, Scalar]:
        """Interval of the row over a box given as per-input (low, high) pairs"""
        low = high = self.bias
        for coeff, (box_low, box_high) in zip(self.coeffs, boxes):
            if coeff > 0:
                low = low + coeff * box_low
                high = high + coeff * box_high
            elif coeff < 0:
                low = low + coeff * box_high
                high = high + coeff * box_low
        return low, high


Layer = Tuple[AffineRow, ...]


def row(coeffs, bias) -> AffineRow:
    """Shorthand constructor accepting any sequence of coefficients"""
    return AffineRow(tuple(coeffs), bias)


@dataclass(frozen=True)
class Network:
    """
    Layered network: affine map, activation, affine map, ..., affine map

    The activation is applied after every affine map except the last, which
    is activated only when ``output_activation`` is SAME.
    """
    layers: Tuple[Layer, ...]
    input_dim: int
    activation: Activation = Activation.RELU
    output_activation: OutputActivation = OutputActivation.NONE
    scalar_kind: ScalarKind = ScalarKind.INTEGER

    def __post_init__(self):
        errors = chaining_errors(self.layers, self.input_dim)
        if errors:
            raise NetworkShapeError('; '.join(errors))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def output_dim(self) -> int:
        return len(self.layers[-1])

    @property
    def widths(self) -> List[int]:
        return [len(layer) for layer in self.layers]

    def scalars(self):
        for layer in self.layers:
            for r in layer:
                yield from r.scalars()

    def replace(self, **changes) -> 'Network':
        fields = dict(
            layers=self.layers,
            input_dim=self.input_dim,
            activation=self.activation,
            output_activation=self.output_activation,
            scalar_kind=self.scalar_kind,
        )
        fields.update(changes)
        return Network(**fields)


def chaining_errors(layers: Sequence[Layer], input_dim: int) -> List[str]:
    errors = []
    if input_dim < 1:
        errors.append(f"Input dimension must be >= 1, got {input_dim}")
    if not layers:
        errors.append("Network must have at least one layer")
        return errors
    width = input_dim
    for position, layer in enumerate(layers, start=1):
        if not layer:
            errors.append(f"Layer {position} has no neurons")
            return errors
        for r in layer:
            if r.width != width:
                errors.append(
                    f"Layer {position} row has {r.width} coefficients, expected {width}"
                )
                return errors
        width = len(layer)
    return errors


def eval_network(net: Network, point: Sequence[Scalar]) -> List[Scalar]:
    """
    Evaluate a network at a point of the unit cube

    Raises:
        PointError: If the point has the wrong dimension or leaves [0,1]
    """
    if len(point) != net.input_dim:
        raise PointError(f"Point has {len(point)} components, expected {net.input_dim}")
    check_point(point, net.input_dim)
    if is_exact(net.scalar_kind):
        values = [Fraction(v) for v in point]
    else:
        values = [float(v) for v in point]
    last = net.depth - 1
    for position, layer in enumerate(net.layers):
        outputs = [r.apply(values) for r in layer]
        if position < last or net.output_activation is OutputActivation.SAME:
            outputs = [net.activation.apply(v) for v in outputs]
        values = outputs
    return values


def identity_network(dim: int, kind: ScalarKind = ScalarKind.INTEGER) -> Network:
    """Single affine layer passing every input through"""
    one, zero = coerce(1, kind), coerce(0, kind)
    layer = tuple(
        row((one if j == i else zero for j in range(dim)), zero) for i in range(dim)
    )
    return Network((layer,), dim, scalar_kind=kind)


def to_kind(net: Network, kind: ScalarKind) -> Network:
    """Copy of the network with every scalar converted to ``kind``"""
    layers = tuple(tuple(r.converted(kind) for r in layer) for layer in net.layers)
    return net.replace(layers=layers, scalar_kind=kind)


def _check_compatible(a: Network, b: Network):
    if a.scalar_kind is not b.scalar_kind:
        raise NetworkShapeError(
            f"Scalar kinds differ: {a.scalar_kind.value} vs {b.scalar_kind.value}"
        )
    if a.activation is not b.activation:
        raise NetworkShapeError(
            f"Activations differ: {a.activation.value} vs {b.activation.value}"
        )


def _split_output(layer: Layer) -> Layer:
    """Rows t followed by rows -t, so that t = rho(t) - rho(-t) downstream"""
    return layer + tuple(r.negated() for r in layer)


def _recombine(layer: Layer) -> Layer:
    """Rows of the next map rewritten to read (rho(t), rho(-t)) pairs"""
    return tuple(
        row(tuple(r.coeffs) + tuple(-c for c in r.coeffs), r.bias) for r in layer
    )


def compose_networks(outer: Network, inner: Network) -> Network:
    """
    Network computing outer(inner(x)) with depth outer.depth + inner.depth

    When the inner network activates its output the layers are stacked;
    otherwise the inner output t is carried through rho(t) - rho(-t).

    Raises:
        NetworkShapeError: On dimension, kind or activation mismatch
    """
    _check_compatible(outer, inner)
    if inner.output_dim != outer.input_dim:
        raise NetworkShapeError(
            f"Inner output dimension {inner.output_dim} does not match "
            f"outer input dimension {outer.input_dim}"
        )
    if inner.output_activation is OutputActivation.SAME:
        layers = inner.layers + outer.layers
    else:
        if inner.activation is not Activation.RELU:
            raise NetworkShapeError(
                "Cannot compose a clipped-ReLU network whose output is affine"
            )
        layers = (
            inner.layers[:-1]
            + (_split_output(inner.layers[-1]),)
            + (_recombine(outer.layers[0]),)
            + outer.layers[1:]
        )
    return outer.replace(layers=layers, input_dim=inner.input_dim)


def _extend_depth(net: Network, depth: int) -> Network:
    """Pad a ReLU network with identity-passing layers up to ``depth``"""
    if net.activation is not Activation.RELU or net.output_activation is not OutputActivation.NONE:
        raise NetworkShapeError("Only ReLU networks with affine output can be padded")
    layers = net.layers
    kind = net.scalar_kind
    while len(layers) < depth:
        width = len(layers[-1])
        passthrough = identity_network(width, kind).layers[0]
        layers = (
            layers[:-1]
            + (_split_output(layers[-1]),)
            + (_recombine(passthrough),)
        )
    return net.replace(layers=layers)


def _pad_row(r: AffineRow, before: int, after: int, zero) -> AffineRow:
    return AffineRow((zero,) * before + r.coeffs + (zero,) * after, r.bias)


def parallel_networks(first: Network, second: Network) -> Network:
    """
    Network computing (first(x), second(x)) on a shared input

    The shallower network is padded so both have equal depth.
    """
    _check_compatible(first, second)
    if first.input_dim != second.input_dim:
        raise NetworkShapeError(
            f"Input dimensions differ: {first.input_dim} vs {second.input_dim}"
        )
    depth = max(first.depth, second.depth)
    first = _extend_depth(first, depth)
    second = _extend_depth(second, depth)
    zero = coerce(0, first.scalar_kind)
    layers = [first.layers[0] + second.layers[0]]
    for a_layer, b_layer, a_prev, b_prev in zip(
        first.layers[1:], second.layers[1:], first.layers, second.layers
    ):
        left = tuple(_pad_row(r, 0, len(b_prev), zero) for r in a_layer)
        right = tuple(_pad_row(r, len(a_prev), 0, zero) for r in b_layer)
        layers.append(left + right)
    logger.debug(f"Parallel composition of depth {depth}")
    return first.replace(layers=tuple(layers))
