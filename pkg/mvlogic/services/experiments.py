"""
Experiment Harness
Deep vs shallow extraction studies: sawtooth networks, random univariate
terms, compositions of short terms and random three-variable terms. Every
extracted term is checked against its source before a row is emitted.
"""

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from mvlogic.config import AppConfig, config, set_config
from mvlogic.experiments_config import ExperimentsConfig, SuiteConfig, experiments_config
from mvlogic.models.pwl import Pwl1D
from mvlogic.models.term import Term, eval_term, random_term, substitute, term_length
from mvlogic.services.compiler import build_sawtooth, build_shallow_from_pwl, compile_term, sawtooth_pwl
from mvlogic.services.extractor import extract_network
from mvlogic.services.oracle import EquivalenceError, find_grid_witness, pwl_witness, term_pwl

logger = logging.getLogger(__name__)

COLUMNS = [
    'experiment', 's', 'length', 'trial', 'method',
    'input_length', 'extracted_length', 'breakpoints', 'verdict',
]
EXPERIMENTS = ('sawtooth', 'random1d', 'compose', 'random3d')


@dataclass
class ExperimentRow:
    experiment: str
    method: str
    trial: int
    extracted_length: int
    s: Optional[int] = None
    length: Optional[int] = None
    input_length: Optional[int] = None
    breakpoints: Optional[int] = None
    verdict: str = 'EQUIVALENT'
    wall_time: float = 0.0

    def sort_key(self) -> Tuple:
        return (
            self.s if self.s is not None else -1,
            self.length if self.length is not None else -1,
            self.method,
            self.trial,
        )

    def to_record(self, timing: bool = False) -> Dict:
        record = {column: getattr(self, column) for column in COLUMNS}
        if timing:
            record['wall_time'] = f"{self.wall_time:.4f}"
        return record


@dataclass(frozen=True)
class TrialSpec:
    """One unit of work handed to a worker process"""
    experiment: str
    trial: int
    seed: int
    suite: SuiteConfig
    settings: Dict = field(default_factory=dict)
    s: Optional[int] = None
    length: Optional[int] = None


def _timed(build: Callable[[], object]):
    started = time.perf_counter()
    result = extract_network(build(), 'mv')
    return result, time.perf_counter() - started


def _check_breakpoints(term: Term, reference: Pwl1D, context: str) -> int:
    witness = pwl_witness(term_pwl(term), reference)
    if witness is not None:
        x, got, expected = witness
        raise EquivalenceError(
            f"{context}: extracted term gives {got} at x={x}, expected {expected}",
            witness=[x],
        )
    return reference.interior_count


def _check_grid(f, g, arity: int, denominator: int, samples: int, seed: int, context: str):
    found = find_grid_witness(f, g, arity, denominator, samples, seed)
    if found is not None:
        point, got, expected = found
        raise EquivalenceError(
            f"{context}: extracted term gives {got} at {[str(p) for p in point]}, expected {expected}",
            witness=point,
        )


def _run_sawtooth(spec: TrialSpec) -> List[ExperimentRow]:
    s, suite = spec.s, spec.suite
    reference = sawtooth_pwl(s)
    rows = []
    for method in suite.methods:
        arch = 'deep' if method == 'deep-nn' else 'shallow'
        if arch == 'shallow' and s > suite.shallow_max_s:
            continue
        result, elapsed = _timed(lambda: build_sawtooth(arch, s))
        context = f"sawtooth {arch} s={s}"
        if s <= suite.breakpoint_max_s:
            _check_breakpoints(result.term, reference, context)
        else:
            _check_grid(
                lambda p: eval_term(result.term, p), lambda p: reference(p[0]), 1,
                2 ** (s + 1), suite.grid_samples, spec.seed, context,
            )
        rows.append(ExperimentRow(
            experiment=spec.experiment, method=method, trial=spec.trial, s=s,
            extracted_length=result.length, breakpoints=reference.interior_count,
            wall_time=elapsed,
        ))
    return rows


def _univariate_rows(spec: TrialSpec, source: Term) -> List[ExperimentRow]:
    reference = term_pwl(source)
    rows = []
    for method in spec.suite.methods:
        if method == 'deep-nn':
            result, elapsed = _timed(lambda: compile_term(source, 1))
        else:
            result, elapsed = _timed(lambda: build_shallow_from_pwl(reference))
        context = f"{spec.experiment} {method} trial {spec.trial} (seed {spec.seed})"
        _check_breakpoints(result.term, reference, context)
        rows.append(ExperimentRow(
            experiment=spec.experiment, method=method, trial=spec.trial,
            s=spec.s, length=spec.length, input_length=term_length(source),
            extracted_length=result.length, breakpoints=reference.interior_count,
            wall_time=elapsed,
        ))
    return rows


def _run_random1d(spec: TrialSpec) -> List[ExperimentRow]:
    return _univariate_rows(spec, random_term(spec.length, 1, spec.seed))


def composed_term(s: int, piece_lengths, seed: int) -> Term:
    """tau_s(...tau_2(tau_1(x))) for s random univariate pieces"""
    rng = np.random.default_rng(seed)
    term = None
    for _ in range(s):
        length = int(rng.choice(piece_lengths))
        piece = random_term(length, 1, int(rng.integers(2 ** 63)))
        term = piece if term is None else substitute(piece, {1: term})
    return term


def _run_compose(spec: TrialSpec) -> List[ExperimentRow]:
    return _univariate_rows(spec, composed_term(spec.s, spec.suite.piece_lengths, spec.seed))


def _run_random3d(spec: TrialSpec) -> List[ExperimentRow]:
    suite = spec.suite
    source = random_term(spec.length, suite.arity, spec.seed)
    rows = []
    for method in suite.methods:
        if method != 'deep-nn':
            continue
        result, elapsed = _timed(lambda: compile_term(source, suite.arity))
        _check_grid(
            lambda p: eval_term(result.term, p), lambda p: eval_term(source, p), suite.arity,
            suite.grid_denominator, suite.grid_samples, spec.seed,
            f"random3d trial {spec.trial} (seed {spec.seed})",
        )
        rows.append(ExperimentRow(
            experiment=spec.experiment, method=method, trial=spec.trial,
            length=spec.length, input_length=term_length(source),
            extracted_length=result.length, wall_time=elapsed,
        ))
    return rows


_RUNNERS = {
    'sawtooth': _run_sawtooth,
    'random1d': _run_random1d,
    'compose': _run_compose,
    'random3d': _run_random3d,
}


def run_trial(spec: TrialSpec) -> List[ExperimentRow]:
    """Worker entry point; applies the parent's configuration first"""
    if spec.settings:
        set_config(AppConfig.from_dict(spec.settings))
    return _RUNNERS[spec.experiment](spec)


class ExperimentRunner:
    """Plans, runs and reports experiment suites"""

    def __init__(self, experiments: ExperimentsConfig = None, workers: int = None):
        """
        Initialize runner

        Args:
            experiments: Suite defaults (experiments_config.yaml by default)
            workers: Process count; 0 or None uses config.workers, then one per CPU
        """
        self.experiments = experiments or experiments_config
        self.workers = workers if workers is not None else config.workers

    def suite_for(self, name: str, trials: int = None, max_s: int = None,
                  max_len: int = None) -> SuiteConfig:
        if name not in EXPERIMENTS:
            raise ValueError(f"Unknown experiment '{name}', expected one of {', '.join(EXPERIMENTS)}")
        values = self.experiments.get_suite(name).to_dict()
        if trials is not None:
            values['trials'] = trials
        if max_s is not None:
            values['max_s'] = max_s
        if max_len is not None:
            values['max_len'] = max_len
        suite = SuiteConfig(**values)
        errors = suite.validate()
        if errors:
            raise ValueError(f"Invalid settings for {name}: {errors}")
        return suite

    def plan(self, name: str, seed: int, suite: SuiteConfig) -> List[TrialSpec]:
        """Trial specs in a fixed order with seeds split from the master seed"""
        if name == 'sawtooth':
            cells = [(s, None, 0) for s in range(1, suite.max_s + 1)]
        elif name == 'compose':
            cells = [(s, None, t) for s in range(1, suite.max_s + 1) for t in range(suite.trials)]
        else:
            cells = [
                (None, length, t)
                for length in range(suite.min_len, suite.max_len + 1)
                for t in range(suite.trials)
            ]
        children = np.random.SeedSequence(seed).spawn(len(cells))
        settings = config.to_dict()
        return [
            TrialSpec(
                experiment=name, trial=trial, s=s, length=length, suite=suite, settings=settings,
                seed=int(child.generate_state(1, dtype=np.uint64)[0]),
            )
            for (s, length, trial), child in zip(cells, children)
        ]

    def run(self, name: str, seed: int, trials: int = None, max_s: int = None,
            max_len: int = None) -> List[ExperimentRow]:
        """
        Run one experiment suite

        Returns:
            Verified rows sorted by parameters, method and trial

        Raises:
            EquivalenceError: If any extracted term differs from its source
        """
        suite = self.suite_for(name, trials, max_s, max_len)
        specs = self.plan(name, seed, suite)
        workers = self.workers or os.cpu_count() or 1
        logger.info(f"🧪 Running {name}: {len(specs)} trials on {min(workers, len(specs))} worker(s)")

        rows: List[ExperimentRow] = []
        if workers == 1 or len(specs) == 1:
            for spec in specs:
                rows.extend(_RUNNERS[name](spec))
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                chunk = max(1, len(specs) // (workers * 4))
                for batch in executor.map(run_trial, specs, chunksize=chunk):
                    rows.extend(batch)

        rows.sort(key=ExperimentRow.sort_key)
        logger.info(f"✓ {name}: {len(rows)} rows verified")
        return rows


def rows_frame(rows: List[ExperimentRow], timing: bool = False) -> pd.DataFrame:
    columns = COLUMNS + (['wall_time'] if timing else [])
    return pd.DataFrame([row.to_record(timing) for row in rows], columns=columns, dtype=object)


def write_report(rows: List[ExperimentRow], path: str, timing: bool = False) -> None:
    """Write rows as CSV; without timing the file depends only on the seed"""
    rows_frame(rows, timing).to_csv(path, index=False, na_rep='')


def summarize(rows: List[ExperimentRow]) -> pd.DataFrame:
    """Mean input and extracted length per parameter value and method"""
    frame = rows_frame(rows)
    frame['extracted_length'] = frame['extracted_length'].astype(float)
    frame['input_length'] = pd.to_numeric(frame['input_length'], errors='coerce')
    keys = [key for key in ('s', 'length') if frame[key].notna().any()] + ['method']
    return (
        frame.groupby(keys)[['input_length', 'extracted_length']]
        .mean()
        .reset_index()
    )
