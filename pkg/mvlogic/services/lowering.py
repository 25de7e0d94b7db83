"""
Bound Propagation and ReLU to Clipped-ReLU Lowering

Interval bounds over [0,1]^n are propagated layer by layer. A ReLU neuron
whose pre-activation t stays below B is replaced by the clipped copies
sigma(t), sigma(t - 1), ..., sigma(t - ceil(B) + 1), whose sum equals rho(t).
Copies that vanish on the whole input box are not emitted, and identical
rows are merged by adding their outgoing weights.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from mvlogic.models.network import (
    Activation, AffineRow, Network, OutputActivation, chaining_errors,
)
from mvlogic.models.scalar import Scalar, ScalarKind, coerce, matches_kind
from mvlogic.models.term import crelu, relu

logger = logging.getLogger(__name__)

Box = List[Tuple[Scalar, Scalar]]


class ExtractionError(ValueError):
    """Raised when a network cannot be translated into a term"""
    pass


@dataclass(frozen=True)
class NeuronBound:
    """Sound pre-activation interval of one neuron"""
    lower: Scalar
    upper: Scalar


def _unit_box(kind: ScalarKind, dim: int) -> Box:
    return [(coerce(0, kind), coerce(1, kind))] * dim


def _activate(bound: NeuronBound, activation: Activation) -> Tuple[Scalar, Scalar]:
    if activation is Activation.RELU:
        return relu(bound.lower), relu(bound.upper)
    return crelu(bound.lower), crelu(bound.upper)


def _check_finite(net: Network):
    if net.scalar_kind is ScalarKind.REAL:
        for value in net.scalars():
            if not math.isfinite(value):
                raise ExtractionError(f"Network has a non-finite weight {value!r}")


def propagate_bounds(net: Network) -> List[List[NeuronBound]]:
    """
    Pre-activation bounds of every neuron, one list per layer

    Exact for Integer and Rational weights.
    """
    _check_finite(net)
    box = _unit_box(net.scalar_kind, net.input_dim)
    table = []
    for layer in net.layers:
        bounds = [NeuronBound(*r.bounds(box)) for r in layer]
        table.append(bounds)
        box = [_activate(b, net.activation) for b in bounds]
    return table


def output_range(net: Network) -> List[Tuple[Scalar, Scalar]]:
    """Bounds of the network outputs, tightened through the clipped lowering"""
    lowered = relu_to_crelu(net) if net.activation is Activation.RELU else net
    bounds = propagate_bounds(lowered)[-1]
    if net.output_activation is OutputActivation.NONE:
        return [(b.lower, b.upper) for b in bounds]
    return [_activate(b, net.activation) for b in bounds]


def relu_to_crelu(net: Network) -> Network:
    """
    Pointwise-equal clipped-ReLU network

    The output activation flag is kept, so an activated ReLU output becomes a
    clipped one; this is exact whenever the network maps into [0,1].

    Raises:
        ExtractionError: If the network has non-finite weights
    """
    if net.activation is Activation.CRELU:
        return net
    _check_finite(net)
    kind = net.scalar_kind
    zero = coerce(0, kind)
    box = _unit_box(kind, net.input_dim)
    rows: Sequence[AffineRow] = net.layers[0]
    layers = []
    for layer_index in range(1, net.depth):
        index: Dict[AffineRow, int] = {}
        lowered: List[AffineRow] = []
        out_box: Box = []
        expansion: List[List[int]] = []
        for r in rows:
            low, high = r.bounds(box)
            copies = []
            for k in range(max(0, math.ceil(high))):
                copy = r.shifted(coerce(k, kind))
                if copy not in index:
                    index[copy] = len(lowered)
                    lowered.append(copy)
                    out_box.append((crelu(low - k), crelu(high - k)))
                copies.append(index[copy])
            expansion.append(copies)
        if not lowered:
            # every neuron is dead; keep one constant-zero neuron for chaining
            lowered.append(AffineRow((zero,) * len(box), zero))
            out_box.append((zero, zero))
        logger.debug(
            f"Layer {layer_index}: {len(rows)} ReLU neurons -> {len(lowered)} clipped neurons"
        )
        layers.append(tuple(lowered))
        box = out_box
        rows = [_reroute(r, expansion, len(lowered), zero) for r in net.layers[layer_index]]
    layers.append(tuple(rows))

    result = Network(
        layers=tuple(layers),
        input_dim=net.input_dim,
        activation=Activation.CRELU,
        output_activation=net.output_activation,
        scalar_kind=kind,
    )
    if net.output_activation is OutputActivation.SAME:
        upper = max(r.bounds(box)[1] for r in rows)
        if upper > 1:
            logger.debug(
                "Output rho replaced by sigma with output bound %s; exact only where the "
                "network stays in [0,1]", upper,
            )
    return result


def _reroute(r: AffineRow, expansion: List[List[int]], width: int, zero) -> AffineRow:
    """Rewrite a row over original neurons as a row over their clipped copies"""
    coeffs = [zero] * width
    for coeff, copies in zip(r.coeffs, expansion):
        for target in copies:
            coeffs[target] = coeffs[target] + coeff
    return AffineRow(tuple(coeffs), r.bias)


@dataclass
class ValidationReport:
    """Outcome of validate_network; report-only, never raises"""
    kind_violations: List[str] = field(default_factory=list)
    shape_errors: List[str] = field(default_factory=list)
    output_bounds: Optional[List[Tuple[Scalar, Scalar]]] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.kind_violations and not self.shape_errors

    def to_dict(self):
        return {
            'ok': self.ok,
            'kind_violations': self.kind_violations,
            'shape_errors': self.shape_errors,
            'output_bounds': (
                None if self.output_bounds is None
                else [[str(low), str(high)] for low, high in self.output_bounds]
            ),
            'warnings': self.warnings,
        }


def validate_network(net: Network, expect_range: bool = True) -> ValidationReport:
    """
    Check kind homogeneity, dimension chaining and (optionally) the output range

    Args:
        net: Network to inspect
        expect_range: Compute output bounds and warn when they leave [0,1]
    """
    report = ValidationReport()
    kind = net.scalar_kind
    for position, layer in enumerate(net.layers, start=1):
        for neuron, r in enumerate(layer, start=1):
            bad = [v for v in r.scalars() if not matches_kind(v, kind)]
            if bad:
                report.kind_violations.append(
                    f"Layer {position} neuron {neuron}: {bad[0]!r} is not a {kind.value} scalar"
                )
    report.shape_errors.extend(chaining_errors(net.layers, net.input_dim))

    if expect_range and report.ok:
        try:
            report.output_bounds = output_range(net)
        except ExtractionError as e:
            report.warnings.append(str(e))
            return report
        for output, (low, high) in enumerate(report.output_bounds, start=1):
            if low < 0 or high > 1:
                report.warnings.append(
                    f"Output {output} bounds [{low}, {high}] exceed [0,1]"
                )
    return report
