"""
Term to Network Compilation
Builds ReLU networks realizing MV/DMV/RMV terms from per-connective gadgets,
plus the sawtooth reference networks and the one-hidden-layer network of a
univariate piecewise-linear function.
"""

import logging
from fractions import Fraction
from typing import Dict, List

from mvlogic.config import config
from mvlogic.models.network import (
    AffineRow, Network, OutputActivation, compose_networks,
    parallel_networks, row, to_kind,
)
from mvlogic.models.pwl import Pwl1D
from mvlogic.models.scalar import ScalarKind, narrowest_kind
from mvlogic.models.term import (
    Delta, LogicTier, Not, Odot, Oplus, Scale, Term, TermDomainError, Var, Zero,
    children, logic_tier, term_arity,
)

logger = logging.getLogger(__name__)

_TIER_KIND = {
    LogicTier.MV: ScalarKind.INTEGER,
    LogicTier.DMV: ScalarKind.RATIONAL,
    LogicTier.RMV: ScalarKind.REAL,
}


class CompileError(ValueError):
    """Raised when a network cannot be built for the requested input"""
    pass


def _affine(coeffs, bias, dim: int = None) -> Network:
    r = row(coeffs, bias)
    return Network(((r,),), dim or r.width)


def gadget(kind: str, parameter=None) -> Network:
    """
    Network for a single connective

    Args:
        kind: 'oplus', 'odot', 'not', 'delta' or 'scale'
        parameter: Divisor for 'delta', factor in [0,1] for 'scale'

    Returns:
        Two-layer ReLU network for the binary connectives, an affine
        network for the unary ones; output is affine in both cases
    """
    if kind == 'oplus':
        # x + y capped at 1: 1 - rho(1 - x - y)
        return Network(((row((-1, -1), 1),), (row((-1,), 1),)), 2)
    if kind == 'odot':
        return Network(((row((1, 1), -1),), (row((1,), 0),)), 2)
    if kind == 'not':
        return _affine((-1,), 1)
    if kind == 'delta':
        if not isinstance(parameter, int) or parameter < 1:
            raise CompileError(f"Delta divisor must be a positive integer, got {parameter!r}")
        return _affine((Fraction(1, parameter),), 0)
    if kind == 'scale':
        if parameter is None or not 0 <= parameter <= 1:
            raise CompileError(f"Scale factor must lie in [0,1], got {parameter!r}")
        return _affine((float(parameter),), 0.0)
    raise CompileError(f"Unknown gadget {kind!r}")


def _merge_affine(outer: Network, inner: Network) -> Network:
    """
    Concatenate two networks, fusing the inner output map with the outer
    input map (valid because the inner output is not activated)
    """
    inner_last = inner.layers[-1]
    fused = []
    for r in outer.layers[0]:
        coeffs = [0] * inner_last[0].width
        bias = r.bias
        for weight, inner_row in zip(r.coeffs, inner_last):
            if not weight:
                continue
            bias = bias + weight * inner_row.bias
            for j, c in enumerate(inner_row.coeffs):
                coeffs[j] = coeffs[j] + weight * c
        fused.append(AffineRow(tuple(coeffs), bias))
    layers = inner.layers[:-1] + (tuple(fused),) + outer.layers[1:]
    return outer.replace(layers=layers, input_dim=inner.input_dim)


def compile_term(t: Term, arity: int = None) -> Network:
    """
    Compile a term into a ReLU network with affine output

    Args:
        t: Term to compile
        arity: Input dimension; defaults to the largest variable index

    Returns:
        Network of scalar kind Integer (MV), Rational (DMV) or Real (RMV)
        computing the term function on [0,1]^arity
    """
    arity = arity or max(term_arity(t), 1)
    if term_arity(t) > arity:
        raise TermDomainError(f"Term uses x{term_arity(t)} but arity is {arity}")
    kind = _TIER_KIND[logic_tier(t)]

    built: Dict[int, Network] = {}
    stack = [t]
    while stack:
        node = stack[-1]
        if id(node) in built:
            stack.pop()
            continue
        pending = [kid for kid in children(node) if id(kid) not in built]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        built[id(node)] = _compile_node(node, arity, built)

    net = to_kind(built[id(t)], kind)
    logger.debug(f"Compiled term into network with widths {net.widths}")
    return net


def _compile_node(node: Term, arity: int, built: Dict[int, Network]) -> Network:
    if isinstance(node, Zero):
        return _affine((0,) * arity, 0)
    if isinstance(node, Var):
        return _affine(tuple(1 if j == node.index - 1 else 0 for j in range(arity)), 0)
    if isinstance(node, Not):
        return _merge_affine(gadget('not'), built[id(node.child)])
    if isinstance(node, Delta):
        return _merge_affine(gadget('delta', node.divisor), built[id(node.child)])
    if isinstance(node, Scale):
        return _merge_affine(gadget('scale', node.factor), built[id(node.child)])
    pair = parallel_networks(built[id(node.left)], built[id(node.right)])
    name = 'oplus' if isinstance(node, Oplus) else 'odot'
    return _merge_affine(gadget(name), pair)


def hat_network() -> Network:
    """The hat function g(x) = 2*rho(x) - 4*rho(x - 1/2) as a two-layer network"""
    return Network(
        ((row((2,), 0), row((2,), -1)), (row((1, -2), 0),)),
        1,
        output_activation=OutputActivation.SAME,
    )


def build_sawtooth(arch: str, s: int) -> Network:
    """
    Sawtooth g_s as a deep or a shallow ReLU network

    Args:
        arch: 'deep' (hat network composed s times) or 'shallow'
            (one hidden layer of width 2^s)
        s: Number of compositions, >= 1
    """
    if not isinstance(s, int) or s < 1:
        raise CompileError(f"Sawtooth order must be a positive integer, got {s!r}")
    if arch == 'deep':
        net = hat_network()
        for _ in range(s - 1):
            net = compose_networks(hat_network(), net)
        return net
    if arch == 'shallow':
        if s > config.max_shallow_s:
            raise CompileError(
                f"Shallow sawtooth of order {s} exceeds the width budget "
                f"(max_shallow_s={config.max_shallow_s})"
            )
        width = 2 ** s
        hidden = tuple(row((width,), -k) for k in range(width))
        out = tuple(1 if k == 0 else (-2 if k % 2 else 2) for k in range(width))
        return Network((hidden, (row(out, 0),)), 1, output_activation=OutputActivation.SAME)
    raise CompileError(f"Unknown architecture {arch!r}, expected 'deep' or 'shallow'")


def sawtooth_pwl(s: int) -> Pwl1D:
    """Reference g_s: zigzag through (k / 2^s, k mod 2)"""
    if s < 1:
        raise CompileError(f"Sawtooth order must be a positive integer, got {s!r}")
    n = 2 ** s
    return Pwl1D(tuple((Fraction(k, n), Fraction(k % 2)) for k in range(n + 1)))


def build_shallow_from_pwl(f: Pwl1D) -> Network:
    """
    One-hidden-layer ReLU network of a univariate piecewise-linear function

    f(x) = f(0) + slope_0 * rho(x) + sum_k (dslope_k / b_k) * rho(b_k x - a_k)
    for interior breakpoints a_k / b_k. The weights are integers whenever f is
    a McNaughton function.
    """
    slopes = f.slopes
    hidden: List[AffineRow] = [row((Fraction(1),), Fraction(0))]
    weights: List[Fraction] = [slopes[0]]
    for x, left, right in zip(f.interior, slopes, slopes[1:]):
        hidden.append(row((Fraction(x.denominator),), Fraction(-x.numerator)))
        weights.append((right - left) / x.denominator)
    output = row(weights, f.points[0][1])
    net = Network((tuple(hidden), (output,)), 1, scalar_kind=ScalarKind.RATIONAL)
    kind = narrowest_kind(net.scalars())
    logger.debug(f"Shallow network with {len(hidden)} hidden neurons, kind {kind.value}")
    return to_kind(net, kind)
