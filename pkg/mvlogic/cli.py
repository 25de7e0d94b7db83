"""
MV-Logic Command Line Interface
Conversion commands (compile, extract, eval, verify), the experiment harness
and the HTTP service. Machine-readable output goes to stdout, logs to stderr.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from mvlogic.config import AppConfig, config, set_config
from mvlogic.models.network import eval_network
from mvlogic.models.network_codec import decode_network, encode_network
from mvlogic.models.scalar import format_value, parse_point
from mvlogic.models.term import eval_term, term_arity
from mvlogic.models.term_syntax import format_term, parse_term
from mvlogic.services.compiler import compile_term
from mvlogic.services.experiments import EXPERIMENTS, ExperimentRunner, summarize, write_report
from mvlogic.services.extractor import extract_network
from mvlogic.services.oracle import EquivalenceError, verify_terms

logger = logging.getLogger('mvlogic')

# Large enough for any variable index a user can type
_OPEN_ARITY = sys.maxsize

# Domain errors all derive from ValueError
_USER_ERRORS = (ValueError, EquivalenceError)


def setup_logging(level: str = 'INFO') -> logging.Logger:
    """Configure logging on stderr so stdout stays machine-readable"""
    log_format = '%(asctime)s - %(levelname)s - %(message)s'
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=log_format,
        handlers=[logging.StreamHandler(sys.stderr)],
        force=True,
    )
    return logger


def _parse_user_term(text: str, arity: Optional[int]):
    term = parse_term(text, arity or _OPEN_ARITY)
    return term, arity or max(term_arity(term), 1)


def _cmd_compile(args) -> int:
    term, arity = _parse_user_term(args.term, args.arity)
    net = compile_term(term, arity)
    Path(args.out).write_bytes(encode_network(net))
    logger.info(
        f"✓ Compiled {args.term!r} into a {net.scalar_kind.value} network "
        f"with widths {net.widths} -> {args.out}"
    )
    return 0


def _cmd_extract(args) -> int:
    net = decode_network(Path(args.network).read_bytes())
    result = extract_network(
        net, args.logic, max_lcm=args.max_lcm, eps=args.eps, max_magnitude=args.max_magnitude,
    )
    print(format_term(result.term))
    print(f"length: {result.length}")
    return 0


def _cmd_eval(args) -> int:
    point = parse_point(args.point)
    if args.term is not None:
        term = parse_term(args.term, len(point))
        print(format_value(eval_term(term, point)))
    else:
        net = decode_network(Path(args.network).read_bytes())
        print(','.join(format_value(v) for v in eval_network(net, point)))
    return 0


def _cmd_verify(args) -> int:
    a = parse_term(args.term_a, args.arity or _OPEN_ARITY)
    b = parse_term(args.term_b, args.arity or _OPEN_ARITY)
    verdict = verify_terms(
        a, b, mode=args.mode, arity=args.arity, denominator=args.denominator,
        samples=args.samples, seed=args.seed,
    )
    print(verdict.describe())
    return 0 if verdict.equivalent else 1


def run_convert(args) -> int:
    """Dispatch compile, extract, eval and verify"""
    handlers = {
        'compile': _cmd_compile,
        'extract': _cmd_extract,
        'eval': _cmd_eval,
        'verify': _cmd_verify,
    }
    return handlers[args.command](args)


def run_experiment(args) -> int:
    """Run one experiment suite and write its CSV report"""
    runner = ExperimentRunner(workers=args.workers)
    rows = runner.run(
        args.name, args.seed, trials=args.trials, max_s=args.max_s, max_len=args.max_len,
    )
    write_report(rows, args.out, timing=args.timing)
    for line in summarize(rows).to_string(index=False).splitlines():
        logger.info(line)
    logger.info(f"📄 Wrote {len(rows)} rows to {args.out}")
    return 0


def run_serve(args) -> int:
    """Start the HTTP service"""
    from mvlogic.app import create_app

    if not args.config:
        set_config(AppConfig.from_env())
    app = create_app()
    host = args.host or config.flask_host
    port = args.port or config.flask_port
    logger.info(f"🚀 Serving MV-Logic API on http://{host}:{port}")
    app.run(host=host, port=port, debug=config.flask_debug, use_reloader=False)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mvlogic',
        description='Translate between ReLU networks and Lukasiewicz-logic terms',
    )
    parser.add_argument('--config', help='JSON or YAML configuration file')
    parser.add_argument('--log-level', default=None, help='DEBUG, INFO, WARNING or ERROR')
    commands = parser.add_subparsers(dest='command', required=True)

    compile_cmd = commands.add_parser('compile', help='Compile a term into a ReLU network')
    compile_cmd.add_argument('--term', required=True)
    compile_cmd.add_argument('--arity', type=int, default=None)
    compile_cmd.add_argument('--out', required=True)

    extract_cmd = commands.add_parser('extract', help='Extract a term from a network file')
    extract_cmd.add_argument('--network', required=True)
    extract_cmd.add_argument('--logic', choices=['mv', 'dmv', 'rmv'], required=True)
    extract_cmd.add_argument('--max-lcm', type=int, default=None)
    extract_cmd.add_argument('--eps', type=float, default=None)
    extract_cmd.add_argument('--max-magnitude', type=float, default=None)

    eval_cmd = commands.add_parser('eval', help='Evaluate a term or network at a point')
    source = eval_cmd.add_mutually_exclusive_group(required=True)
    source.add_argument('--term')
    source.add_argument('--network')
    eval_cmd.add_argument('--point', required=True, help='e.g. "1/2,0,0.25"')

    verify_cmd = commands.add_parser('verify', help='Check two terms for equivalence')
    verify_cmd.add_argument('--term-a', required=True)
    verify_cmd.add_argument('--term-b', required=True)
    verify_cmd.add_argument('--mode', choices=['breakpoints', 'grid'], default='breakpoints')
    verify_cmd.add_argument('--arity', type=int, default=None)
    verify_cmd.add_argument('--denominator', type=int, default=None)
    verify_cmd.add_argument('--samples', type=int, default=None)
    verify_cmd.add_argument('--seed', type=int, default=0)

    experiment_cmd = commands.add_parser('experiment', help='Run an experiment suite')
    experiment_cmd.add_argument('--name', choices=EXPERIMENTS, required=True)
    experiment_cmd.add_argument('--seed', type=int, required=True)
    experiment_cmd.add_argument('--out', required=True)
    experiment_cmd.add_argument('--trials', type=int, default=None)
    experiment_cmd.add_argument('--max-s', type=int, default=None)
    experiment_cmd.add_argument('--max-len', type=int, default=None)
    experiment_cmd.add_argument('--workers', type=int, default=None)
    experiment_cmd.add_argument('--timing', action='store_true',
                                help='Add a wall_time column (output no longer reproducible)')

    serve_cmd = commands.add_parser('serve', help='Start the HTTP API')
    serve_cmd.add_argument('--host', default=None)
    serve_cmd.add_argument('--port', type=int, default=None)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code"""
    args = build_parser().parse_args(argv)

    if args.config:
        try:
            loaded = AppConfig.from_file(args.config)
        except (FileNotFoundError, ValueError) as e:
            setup_logging()
            logger.error(f"❌ {e}")
            return 2
        errors = loaded.validate()
        if errors:
            setup_logging()
            logger.error(f"❌ Invalid configuration: {errors}")
            return 2
        set_config(loaded)
    setup_logging(args.log_level or config.log_level)

    try:
        if args.command == 'experiment':
            return run_experiment(args)
        if args.command == 'serve':
            return run_serve(args)
        return run_convert(args)
    except _USER_ERRORS as e:
        logger.error(f"❌ {e}")
        return 1
    except OSError as e:
        logger.error(f"❌ {e}")
        return 1
