#!/usr/bin/env python3
"""
MV-Logic Startup Script
Single entry point for the conversion commands, the experiment harness and
the HTTP service.

Examples:
    python run.py compile --term "(x1 + x1) * ~x2" --arity 2 --out net.json
    python run.py extract --network net.json --logic mv
    python run.py experiment --name sawtooth --seed 7 --out sawtooth.csv
    python run.py serve
"""

import signal
import sys

from mvlogic.cli import main, setup_logging


def setup_signal_handlers():
    """Setup signal handlers for graceful shutdown"""
    logger = setup_logging()

    def signal_handler(signum, frame):
        logger.info(f"🛑 Received signal {signum}, shutting down")
        sys.exit(130)

    signal.signal(signal.SIGINT, signal_handler)
    if hasattr(signal, 'SIGTERM'):
        signal.signal(signal.SIGTERM, signal_handler)


if __name__ == "__main__":
    setup_signal_handlers()
    sys.exit(main())
