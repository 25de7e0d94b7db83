"""
Test configuration and fixtures for MV-Logic tests
"""

import pytest
import numpy as np

from mvlogic.app import create_app
from mvlogic.config import AppConfig, config, set_config
from mvlogic.models.network import Activation, Network, OutputActivation, row
from mvlogic.models.term_syntax import parse_term
from mvlogic.services.compiler import hat_network


@pytest.fixture(autouse=True)
def restore_config():
    """Undo any set_config() a test performs"""
    saved = config.to_dict()
    yield
    set_config(AppConfig.from_dict(saved))


@pytest.fixture
def rng():
    """Seeded generator for randomized suites"""
    return np.random.default_rng(20240601)


@pytest.fixture
def phi_g():
    """ReLU network of the hat function g"""
    return hat_network()


@pytest.fixture
def psi_g():
    """Clipped-ReLU form of the hat network after lowering and merging"""
    return Network(
        layers=((row((2,), 0), row((2,), -1)), (row((1, -1), 0),)),
        input_dim=1,
        activation=Activation.CRELU,
        output_activation=OutputActivation.SAME,
    )


@pytest.fixture
def tau_network():
    """Integer ReLU network realizing (x + x) * ~y"""
    return Network(
        layers=(
            (row((-2, 0), 1), row((0, 1), 0), row((0, -1), 0)),
            (row((-1, -1, 1), 1),),
            (row((1,), 0),),
        ),
        input_dim=2,
    )


@pytest.fixture
def tau_term():
    return parse_term('(x1 + x1) * ~x2', 2)


@pytest.fixture
def app():
    """Create test Flask application"""
    app = create_app()
    app.config['TESTING'] = True
    return app


@pytest.fixture
def client(app):
    """Create test client"""
    return app.test_client()
