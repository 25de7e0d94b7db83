"""
Network JSON serialization

Document layout (version 1):

    {
      "version": 1,
      "scalar_kind": "int" | "rational" | "real",
      "activation": "relu" | "crelu",
      "output_activation": "same" | "none",
      "input_dim": n,
      "layers": [{"weights": [[...], ...], "bias": [...]}, ...]
    }

Integers are JSON numbers, rationals "p/q" strings and reals shortest
round-trip decimal strings.
"""

import json
from typing import Any, Dict

from mvlogic.models.network import Activation, AffineRow, Network, NetworkShapeError, OutputActivation
from mvlogic.models.scalar import ScalarKind, format_scalar, parse_scalar

FORMAT_VERSION = 1


class NetworkFormatError(ValueError):
    """Raised when a network document is malformed"""
    pass


def network_to_dict(net: Network) -> Dict[str, Any]:
    kind = net.scalar_kind
    return {
        'version': FORMAT_VERSION,
        'scalar_kind': kind.value,
        'activation': net.activation.value,
        'output_activation': net.output_activation.value,
        'input_dim': net.input_dim,
        'layers': [
            {
                'weights': [[format_scalar(c, kind) for c in r.coeffs] for r in layer],
                'bias': [format_scalar(r.bias, kind) for r in layer],
            }
            for layer in net.layers
        ],
    }


def encode_network(net: Network) -> bytes:
    return json.dumps(network_to_dict(net), indent=2).encode('utf-8')


def _enum(enum_cls, raw, field: str):
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ', '.join(member.value for member in enum_cls)
        raise NetworkFormatError(f"Field '{field}' must be one of {allowed}, got {raw!r}")


def network_from_dict(data: Any) -> Network:
    """
    Build a network from a decoded JSON document

    Raises:
        NetworkFormatError: On missing fields, kind/value mismatch or
            non-chaining dimensions
    """
    if not isinstance(data, dict):
        raise NetworkFormatError("Network document must be a JSON object")
    missing = [
        field for field in ('version', 'scalar_kind', 'activation', 'output_activation',
                            'input_dim', 'layers')
        if field not in data
    ]
    if missing:
        raise NetworkFormatError(f"Missing fields: {', '.join(missing)}")
    if data['version'] != FORMAT_VERSION:
        raise NetworkFormatError(f"Unsupported format version {data['version']!r}")
    kind = _enum(ScalarKind, data['scalar_kind'], 'scalar_kind')
    activation = _enum(Activation, data['activation'], 'activation')
    output_activation = _enum(OutputActivation, data['output_activation'], 'output_activation')
    input_dim = data['input_dim']
    if not isinstance(input_dim, int) or isinstance(input_dim, bool) or input_dim < 1:
        raise NetworkFormatError(f"Field 'input_dim' must be a positive integer, got {input_dim!r}")
    if not isinstance(data['layers'], list) or not data['layers']:
        raise NetworkFormatError("Field 'layers' must be a non-empty list")

    layers = []
    for position, layer in enumerate(data['layers'], start=1):
        if not isinstance(layer, dict) or 'weights' not in layer or 'bias' not in layer:
            raise NetworkFormatError(f"Layer {position} must have 'weights' and 'bias'")
        weights, bias = layer['weights'], layer['bias']
        if not isinstance(weights, list) or not isinstance(bias, list):
            raise NetworkFormatError(f"Layer {position} weights and bias must be lists")
        if len(weights) != len(bias):
            raise NetworkFormatError(
                f"Layer {position} has {len(weights)} weight rows but {len(bias)} biases"
            )
        rows = []
        for weight_row, raw_bias in zip(weights, bias):
            if not isinstance(weight_row, list) or not weight_row:
                raise NetworkFormatError(f"Layer {position} weight rows must be non-empty lists")
            try:
                coeffs = tuple(parse_scalar(value, kind) for value in weight_row)
                rows.append(AffineRow(coeffs, parse_scalar(raw_bias, kind)))
            except ValueError as e:
                raise NetworkFormatError(f"Layer {position}: {e}")
        layers.append(tuple(rows))

    try:
        return Network(
            layers=tuple(layers),
            input_dim=input_dim,
            activation=activation,
            output_activation=output_activation,
            scalar_kind=kind,
        )
    except NetworkShapeError as e:
        raise NetworkFormatError(f"Non-chaining dimensions: {e}")


def decode_network(payload: bytes) -> Network:
    try:
        data = json.loads(payload)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise NetworkFormatError(f"Invalid network JSON: {e}")
    return network_from_dict(data)
