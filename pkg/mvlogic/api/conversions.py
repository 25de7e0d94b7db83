"""
MV-Logic Conversion API Endpoints
JSON mirror of the compile, extract, eval and verify commands
"""

from flask import Blueprint, request, jsonify

from mvlogic.models.network import eval_network
from mvlogic.models.network_codec import NetworkFormatError, network_from_dict, network_to_dict
from mvlogic.models.scalar import PointError, format_value, parse_point
from mvlogic.models.term import TermDomainError, eval_term, term_arity
from mvlogic.models.term_syntax import TermSyntaxError, format_term, parse_term
from mvlogic.services.compiler import CompileError, compile_term
from mvlogic.services.extractor import (
    CapExceededError, ExtractionError, RangeViolationError, extract_network,
)
from mvlogic.services.lowering import validate_network
from mvlogic.services.oracle import OracleError, verify_terms

# Create Blueprint for conversion API endpoints
conversions_bp = Blueprint('conversions', __name__, url_prefix='/api')

# Most specific first
_ERROR_CODES = [
    (TermSyntaxError, 'TERM_SYNTAX_ERROR', 400),
    (TermDomainError, 'TERM_DOMAIN_ERROR', 400),
    (NetworkFormatError, 'NETWORK_FORMAT_ERROR', 400),
    (PointError, 'POINT_ERROR', 400),
    (CompileError, 'COMPILE_ERROR', 400),
    (OracleError, 'ORACLE_ERROR', 400),
    (RangeViolationError, 'RANGE_VIOLATION', 422),
    (CapExceededError, 'CAP_EXCEEDED', 422),
    (ExtractionError, 'EXTRACTION_ERROR', 422),
]


def handle_domain_error(error: Exception):
    """Map converter exceptions to JSON error responses"""
    for error_type, code, status in _ERROR_CODES:
        if isinstance(error, error_type):
            body = {'error': True, 'message': str(error), 'code': code}
            if isinstance(error, TermSyntaxError):
                body['details'] = {'position': error.position}
            elif isinstance(error, RangeViolationError):
                body['details'] = {'witness': [str(v) for v in error.witness]}
            elif isinstance(error, CapExceededError):
                body['details'] = {'required': str(error.required)}
            return jsonify(body), status
    return jsonify({
        'error': True,
        'message': 'Conversion failed',
        'code': 'CONVERSION_ERROR'
    }), 500


def _json_body():
    """Request JSON as a dict, or None when missing or malformed"""
    try:
        data = request.get_json(force=True)
    except Exception:
        return None
    return data if isinstance(data, dict) and data else None


def _invalid_json():
    return jsonify({
        'error': True,
        'message': 'Request body must contain valid JSON data',
        'code': 'INVALID_JSON'
    }), 400


def _missing(fields):
    return jsonify({
        'error': True,
        'message': 'Validation failed',
        'code': 'VALIDATION_ERROR',
        'details': {field: f"'{field}' is required" for field in fields}
    }), 400


@conversions_bp.route('/compile', methods=['POST'])
def compile_endpoint():
    """
    Compile a term into a ReLU network

    Request Body:
        term (str): Term text
        arity (int, optional): Input dimension (default: largest variable index)

    Returns:
        JSON response with the network document and its widths
    """
    data = _json_body()
    if data is None:
        return _invalid_json()
    if 'term' not in data:
        return _missing(['term'])
    try:
        arity = data.get('arity')
        term = parse_term(str(data['term']), int(arity) if arity else 1 << 30)
        net = compile_term(term, int(arity) if arity else max(term_arity(term), 1))
        return jsonify({
            'success': True,
            'network': network_to_dict(net),
            'widths': net.widths
        })
    except ValueError as e:
        return handle_domain_error(e)


@conversions_bp.route('/extract', methods=['POST'])
def extract_endpoint():
    """
    Extract a term from a network document

    Request Body:
        network (object): Network JSON document
        logic (str): 'mv', 'dmv' or 'rmv'
        max_lcm (int, optional), eps (float, optional), max_magnitude (float, optional)

    Returns:
        JSON response with the term text, its length and a validation report
    """
    data = _json_body()
    if data is None:
        return _invalid_json()
    missing = [field for field in ('network', 'logic') if field not in data]
    if missing:
        return _missing(missing)
    try:
        net = network_from_dict(data['network'])
        result = extract_network(
            net, data['logic'],
            max_lcm=data.get('max_lcm'),
            eps=data.get('eps'),
            max_magnitude=data.get('max_magnitude'),
        )
        return jsonify({
            'success': True,
            'term': format_term(result.term),
            'length': result.length,
            'range_certified': result.range_certified,
            'validation': validate_network(net).to_dict()
        })
    except ValueError as e:
        return handle_domain_error(e)


@conversions_bp.route('/eval', methods=['POST'])
def eval_endpoint():
    """
    Evaluate a term or a network at a point

    Request Body:
        term (str) or network (object)
        point (str): Comma-separated rationals, e.g. "1/2,0"

    Returns:
        JSON response with exact values rendered as strings
    """
    data = _json_body()
    if data is None:
        return _invalid_json()
    if 'point' not in data or ('term' not in data and 'network' not in data):
        return _missing([field for field in ('point', 'term') if field not in data])
    try:
        point = parse_point(str(data['point']))
        if 'term' in data:
            values = [eval_term(parse_term(str(data['term']), len(point)), point)]
        else:
            values = eval_network(network_from_dict(data['network']), point)
        return jsonify({
            'success': True,
            'values': [format_value(v) for v in values]
        })
    except ValueError as e:
        return handle_domain_error(e)


@conversions_bp.route('/verify', methods=['POST'])
def verify_endpoint():
    """
    Check two terms for equivalence

    Request Body:
        term_a (str), term_b (str)
        mode (str, optional): 'breakpoints' (default) or 'grid'
        arity, denominator, samples, seed (int, optional)

    Returns:
        JSON response with the verdict and a witness when they differ
    """
    data = _json_body()
    if data is None:
        return _invalid_json()
    missing = [field for field in ('term_a', 'term_b') if field not in data]
    if missing:
        return _missing(missing)
    try:
        arity = data.get('arity')
        open_arity = int(arity) if arity else 1 << 30
        verdict = verify_terms(
            parse_term(str(data['term_a']), open_arity),
            parse_term(str(data['term_b']), open_arity),
            mode=data.get('mode', 'breakpoints'),
            arity=int(arity) if arity else None,
            denominator=data.get('denominator'),
            samples=data.get('samples'),
            seed=int(data.get('seed', 0)),
        )
        return jsonify({
            'success': True,
            'equivalent': verdict.equivalent,
            'verdict': verdict.describe(),
            'witness': None if verdict.witness is None else [str(v) for v in verdict.witness]
        })
    except ValueError as e:
        return handle_domain_error(e)
