"""
MV-Logic Configuration API Endpoints
Read access to converter settings and experiment suite defaults
"""

from flask import Blueprint, jsonify

from mvlogic.config import config
from mvlogic.experiments_config import experiments_config

# Create Blueprint for configuration API endpoints
config_bp = Blueprint('config', __name__, url_prefix='/api')


@config_bp.route('/config', methods=['GET'])
def get_config():
    """
    Get current application configuration

    Returns:
        JSON response with converter settings and experiment suites
    """
    try:
        return jsonify({
            'success': True,
            'config': config.to_dict(),
            'experiments': {
                name: suite.to_dict() for name, suite in experiments_config.suites.items()
            }
        })
    except Exception:
        return jsonify({
            'error': True,
            'message': 'Failed to retrieve configuration',
            'code': 'CONFIG_RETRIEVAL_ERROR'
        }), 500
