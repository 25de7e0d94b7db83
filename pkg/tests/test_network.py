"""
Unit tests for networks, scalar kinds and the network JSON codec
"""

import json
import pytest
from fractions import Fraction

from mvlogic.models.network import (
    Activation, AffineRow, Network, NetworkShapeError, OutputActivation,
    compose_networks, eval_network, identity_network, parallel_networks, row, to_kind,
)
from mvlogic.models.network_codec import (
    FORMAT_VERSION, NetworkFormatError, decode_network, encode_network,
    network_from_dict, network_to_dict,
)
from mvlogic.models.scalar import (
    PointError, ScalarKind, coerce, format_scalar, narrowest_kind, parse_point, parse_scalar,
)

HALF, QUARTER = Fraction(1, 2), Fraction(1, 4)


def grid_1d(denominator):
    return [[Fraction(k, denominator)] for k in range(denominator + 1)]


def random_integer_network(rng):
    """Random integer ReLU network with weights in [-3, 3]"""
    input_dim = int(rng.integers(1, 4))
    width = input_dim
    layers = []
    for _ in range(int(rng.integers(1, 4))):
        out = int(rng.integers(1, 5))
        layers.append(tuple(
            row([int(w) for w in rng.integers(-3, 4, size=width)], int(rng.integers(-3, 4)))
            for _ in range(out)
        ))
        width = out
    return Network(tuple(layers), input_dim)


class TestScalars:
    """Test scalar kinds and their text forms"""

    def test_coerce_per_kind(self):
        """Test coercion to the Python type of each kind"""
        assert coerce(3, ScalarKind.RATIONAL) == Fraction(3)
        assert isinstance(coerce(3, ScalarKind.RATIONAL), Fraction)
        assert coerce(Fraction(4, 2), ScalarKind.INTEGER) == 2
        assert isinstance(coerce(1, ScalarKind.REAL), float)

    def test_coerce_rejects_non_integers(self):
        """Test a fraction cannot become an integer"""
        with pytest.raises(ValueError, match="not an integer"):
            coerce(Fraction(1, 2), ScalarKind.INTEGER)

    def test_coerce_rejects_non_finite(self):
        """Test infinities are refused"""
        with pytest.raises(ValueError, match="Non-finite"):
            coerce(float('inf'), ScalarKind.REAL)

    def test_narrowest_kind(self):
        """Test the smallest exact kind is chosen"""
        assert narrowest_kind([1, Fraction(2)]) is ScalarKind.INTEGER
        assert narrowest_kind([1, Fraction(1, 3)]) is ScalarKind.RATIONAL
        assert narrowest_kind([Fraction(1, 3), 0.5]) is ScalarKind.REAL

    def test_text_forms(self):
        """Test JSON forms of each kind"""
        assert format_scalar(Fraction(1, 3), ScalarKind.RATIONAL) == '1/3'
        assert parse_scalar('1/3', ScalarKind.RATIONAL) == Fraction(1, 3)
        assert parse_scalar(2, ScalarKind.RATIONAL) == Fraction(2)
        assert format_scalar(0.1, ScalarKind.REAL) == '0.1'
        assert parse_scalar('0.1', ScalarKind.REAL) == 0.1
        assert format_scalar(-2, ScalarKind.INTEGER) == -2

    def test_parse_scalar_rejects_wrong_forms(self):
        """Test kind/value mismatches"""
        with pytest.raises(ValueError, match="Expected an integer"):
            parse_scalar('1/2', ScalarKind.INTEGER)
        with pytest.raises(ValueError, match="Invalid rational"):
            parse_scalar('1/0', ScalarKind.RATIONAL)
        with pytest.raises(ValueError, match="Boolean"):
            parse_scalar(True, ScalarKind.INTEGER)

    def test_parse_point(self):
        """Test comma-separated points parse to exact rationals"""
        assert parse_point('1/2, 0, 0.25') == [HALF, Fraction(0), QUARTER]
        with pytest.raises(PointError, match="Invalid point component"):
            parse_point('1/2,abc')
        with pytest.raises(PointError, match="at least one component"):
            parse_point('  ')


class TestNetworkStructure:
    """Test network construction and validation"""

    def test_properties(self, phi_g):
        """Test depth, widths and output dimension"""
        assert phi_g.depth == 2
        assert phi_g.widths == [2, 1]
        assert phi_g.output_dim == 1
        assert list(phi_g.scalars()) == [2, 0, 2, -1, 1, -2, 0]

    def test_rows_must_chain(self):
        """Test a row with the wrong width is rejected"""
        with pytest.raises(NetworkShapeError, match="expected 1"):
            Network(((row((1, 1), 0),),), 1)

    def test_network_needs_layers(self):
        """Test an empty network is rejected"""
        with pytest.raises(NetworkShapeError, match="at least one layer"):
            Network((), 1)

    def test_row_needs_coefficients(self):
        """Test an affine row without coefficients is rejected"""
        with pytest.raises(NetworkShapeError, match="at least one coefficient"):
            AffineRow((), 0)

    def test_row_bounds(self):
        """Test interval of an affine row over a box"""
        assert row((2, -1), 1).bounds([(0, 1), (0, 1)]) == (0, 3)

    def test_to_kind(self, phi_g):
        """Test conversion keeps values and changes the kind"""
        rational = to_kind(phi_g, ScalarKind.RATIONAL)
        assert rational.scalar_kind is ScalarKind.RATIONAL
        assert all(isinstance(v, Fraction) for v in rational.scalars())
        assert eval_network(rational, [QUARTER]) == eval_network(phi_g, [QUARTER])


class TestEvalNetwork:
    """Test exact network evaluation"""

    def test_hat_network_at_half(self, phi_g):
        """Test g(1/2) = 1"""
        assert eval_network(phi_g, [HALF]) == [1]

    def test_identity_network(self):
        """Test the identity affine map"""
        assert eval_network(identity_network(1), [Fraction(3, 10)]) == [Fraction(3, 10)]

    def test_tau_network(self, tau_network):
        """Test the (x + x) * ~y network at (1/2, 0)"""
        assert eval_network(tau_network, [HALF, Fraction(0)]) == [1]

    def test_clipped_activation(self, psi_g):
        """Test the clipped network agrees with the hat function"""
        assert eval_network(psi_g, [QUARTER]) == [HALF]
        assert eval_network(psi_g, [Fraction(3, 4)]) == [HALF]

    def test_wrong_dimension(self, phi_g):
        """Test points of the wrong dimension are rejected"""
        with pytest.raises(PointError, match="expected 1"):
            eval_network(phi_g, [HALF, HALF])

    def test_point_outside_cube(self, phi_g):
        """Test points outside [0,1] are rejected"""
        with pytest.raises(PointError, match="outside"):
            eval_network(phi_g, [Fraction(2)])

    def test_real_network_uses_floats(self):
        """Test real networks evaluate in double precision"""
        net = Network(((row((0.5,), 0.25),),), 1, scalar_kind=ScalarKind.REAL)
        value = eval_network(net, [HALF])[0]
        assert isinstance(value, float)
        assert value == pytest.approx(0.5)


class TestComposition:
    """Test sequential and parallel composition"""

    def test_hat_composed_with_itself(self, phi_g):
        """Test g(g(1/4)) = 1 with depth 4"""
        net = compose_networks(phi_g, phi_g)
        assert net.depth == 4
        assert eval_network(net, [QUARTER]) == [1]

    def test_identity_after_network(self, phi_g):
        """Test composing with the identity keeps the function"""
        net = compose_networks(identity_network(1), phi_g)
        for point in grid_1d(16):
            assert eval_network(net, point) == eval_network(phi_g, point)

    def test_affine_inner_output_uses_split(self, phi_g):
        """Test an affine inner output is carried as rho(t) - rho(-t)"""
        net = compose_networks(phi_g, identity_network(1))
        assert net.depth == 3
        assert net.widths == [2, 2, 1]
        for point in grid_1d(16):
            assert eval_network(net, point) == eval_network(phi_g, point)

    def test_kind_mismatch(self, phi_g):
        """Test networks of different kinds cannot be composed"""
        with pytest.raises(NetworkShapeError, match="Scalar kinds differ"):
            compose_networks(phi_g, to_kind(phi_g, ScalarKind.RATIONAL))

    def test_dimension_mismatch(self, phi_g):
        """Test inner output must match outer input"""
        with pytest.raises(NetworkShapeError, match="does not match"):
            compose_networks(phi_g, identity_network(2))

    def test_clipped_affine_inner_rejected(self, psi_g):
        """Test a clipped network with affine output cannot be an inner network"""
        inner = psi_g.replace(output_activation=OutputActivation.NONE)
        with pytest.raises(NetworkShapeError, match="clipped-ReLU"):
            compose_networks(psi_g, inner)

    def test_parallel_networks(self):
        """Test (x1, rho(x1 + x2 - 1)) on a shared input"""
        first = Network(((row((1, 0), 0),),), 2)
        second = Network(((row((1, 1), -1),), (row((1,), 0),)), 2)
        net = parallel_networks(first, second)
        assert net.depth == 2
        assert net.output_dim == 2
        assert eval_network(net, [HALF, Fraction(3, 4)]) == [HALF, QUARTER]

    def test_parallel_input_mismatch(self):
        """Test parallel networks need the same input dimension"""
        with pytest.raises(NetworkShapeError, match="Input dimensions differ"):
            parallel_networks(identity_network(1), identity_network(2))

    def test_activations_must_match(self, phi_g, psi_g):
        """Test ReLU and clipped networks are not mixed"""
        with pytest.raises(NetworkShapeError, match="Activations differ"):
            compose_networks(phi_g, psi_g)


class TestNetworkCodec:
    """Test the JSON network document"""

    def test_hat_network_document(self, phi_g):
        """Test the hidden layer of g is stored row-major"""
        document = json.loads(encode_network(phi_g))
        assert document['version'] == FORMAT_VERSION
        assert document['scalar_kind'] == 'int'
        assert document['output_activation'] == 'same'
        assert document['layers'][0] == {'weights': [[2], [2]], 'bias': [0, -1]}
        assert decode_network(encode_network(phi_g)) == phi_g

    def test_rational_weights_are_strings(self):
        """Test 1/3 is written as "1/3" and read back exactly"""
        net = Network(((row((Fraction(1, 3),), Fraction(0)),),), 1,
                      scalar_kind=ScalarKind.RATIONAL)
        document = network_to_dict(net)
        assert document['layers'][0]['weights'] == [['1/3']]
        assert network_from_dict(document) == net

    def test_real_weights_round_trip(self):
        """Test shortest decimal strings reproduce the floats"""
        net = Network(((row((0.1, 2 ** 0.5 / 2), 0.3),),), 2, scalar_kind=ScalarKind.REAL)
        assert decode_network(encode_network(net)) == net

    def test_random_integer_networks_round_trip(self, rng):
        """Test random integer networks survive encoding"""
        for _ in range(100):
            net = random_integer_network(rng)
            assert decode_network(encode_network(net)) == net

    def test_missing_fields(self):
        """Test documents without required fields are rejected"""
        with pytest.raises(NetworkFormatError, match="Missing fields: .*layers"):
            network_from_dict({'version': 1, 'scalar_kind': 'int', 'activation': 'relu',
                               'output_activation': 'none', 'input_dim': 1})

    def test_unknown_version(self, phi_g):
        """Test only version 1 is accepted"""
        document = network_to_dict(phi_g)
        document['version'] = 2
        with pytest.raises(NetworkFormatError, match="Unsupported format version"):
            network_from_dict(document)

    def test_kind_value_mismatch(self, phi_g):
        """Test a rational string in an integer network"""
        document = network_to_dict(phi_g)
        document['layers'][0]['weights'][0][0] = '1/2'
        with pytest.raises(NetworkFormatError, match="Layer 1"):
            network_from_dict(document)

    def test_unknown_activation(self, phi_g):
        """Test enum fields are checked"""
        document = network_to_dict(phi_g)
        document['activation'] = 'tanh'
        with pytest.raises(NetworkFormatError, match="must be one of relu, crelu"):
            network_from_dict(document)

    def test_non_chaining_dimensions(self, phi_g):
        """Test dimension errors surface as format errors"""
        document = network_to_dict(phi_g)
        document['layers'][1]['weights'] = [[1]]
        with pytest.raises(NetworkFormatError, match="Non-chaining dimensions"):
            network_from_dict(document)

    def test_invalid_json(self):
        """Test undecodable payloads"""
        with pytest.raises(NetworkFormatError, match="Invalid network JSON"):
            decode_network(b'{not json')
