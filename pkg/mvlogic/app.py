"""
MV-Logic Service Application
Flask application exposing the converters over JSON, with CORS and health checks
"""

from flask import Flask, jsonify
from flask_cors import CORS
import logging
from datetime import datetime

from mvlogic import __version__
from mvlogic.api.config import config_bp
from mvlogic.api.conversions import conversions_bp
from mvlogic.config import config


def create_app():
    """Create and configure the Flask application"""
    app = Flask(__name__)

    if not config.flask_debug:
        logging.getLogger('werkzeug').setLevel(logging.WARNING)

    allowed_origins = [
        f"http://localhost:{config.flask_port}",
        f"http://127.0.0.1:{config.flask_port}",
        f"http://{config.flask_host}:{config.flask_port}"
    ]
    CORS(app, origins=allowed_origins)

    app.register_blueprint(conversions_bp)
    app.register_blueprint(config_bp)

    @app.route('/api/health')
    def health_check():
        """Health check with component status"""
        try:
            from mvlogic.models.term_syntax import parse_term
            from mvlogic.services.compiler import compile_term
            from mvlogic.services.extractor import extract_network

            # A tiny round trip exercises parser, compiler and extractor
            extract_network(compile_term(parse_term('x1 + ~x1', 1)), 'mv')
            converter_status = "healthy"
        except Exception as e:
            converter_status = f"error: {str(e)}"

        return jsonify({
            'status': 'healthy' if converter_status == 'healthy' else 'degraded',
            'service': 'MV-Logic Translator',
            'timestamp': datetime.now().isoformat(),
            'version': __version__,
            'components': {
                'converter': converter_status
            },
            'config': {
                'max_lcm': config.max_lcm,
                'eps': config.eps,
                'debug_mode': config.flask_debug
            }
        })

    @app.errorhandler(404)
    def not_found(error):
        """Handle 404 errors"""
        return jsonify({'error': True, 'message': str(error), 'code': 'NOT_FOUND'}), 404

    @app.errorhandler(405)
    def method_not_allowed(error):
        """Handle 405 errors"""
        return jsonify({'error': True, 'message': str(error), 'code': 'METHOD_NOT_ALLOWED'}), 405

    @app.errorhandler(500)
    def internal_error(error):
        """Handle 500 errors"""
        app.logger.error(f"Internal server error: {error}")
        return jsonify({'error': True, 'message': 'Internal server error', 'code': 'INTERNAL_ERROR'}), 500

    app.logger.info("MV-Logic Flask application created successfully")

    return app


if __name__ == '__main__':
    app = create_app()
    app.run(debug=config.flask_debug, host=config.flask_host, port=config.flask_port)
