"""
Experiment Suite Configuration
Handles loading and validation of the experiment defaults in experiments_config.yaml
"""

import logging
import yaml
from pathlib import Path
from typing import Dict, Any, List, Optional
from dataclasses import dataclass, field, asdict

logger = logging.getLogger(__name__)

METHODS = ('deep-nn', 'shallow-nn')


@dataclass
class SuiteConfig:
    """Defaults for one experiment suite"""
    trials: int = 1
    min_len: int = 4
    max_len: int = 14
    max_s: int = 8
    shallow_max_s: int = 3
    breakpoint_max_s: int = 5
    arity: int = 1
    piece_lengths: List[int] = field(default_factory=lambda: [2, 3])
    methods: List[str] = field(default_factory=lambda: list(METHODS))
    grid_denominator: int = 13
    grid_samples: int = 300

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def validate(self) -> Dict[str, str]:
        """Validate suite values"""
        errors = {}

        if not isinstance(self.trials, int) or self.trials < 1:
            errors['trials'] = 'Trials must be a positive integer'

        if not isinstance(self.min_len, int) or self.min_len < 1:
            errors['min_len'] = 'Minimum length must be a positive integer'
        elif not isinstance(self.max_len, int) or self.max_len < self.min_len:
            errors['max_len'] = 'Maximum length must be at least the minimum length'

        if not isinstance(self.max_s, int) or self.max_s < 1:
            errors['max_s'] = 'Max s must be a positive integer'

        if not isinstance(self.shallow_max_s, int) or self.shallow_max_s < 0:
            errors['shallow_max_s'] = 'Shallow max s must be a non-negative integer'

        if not isinstance(self.arity, int) or self.arity < 1:
            errors['arity'] = 'Arity must be a positive integer'

        if not self.piece_lengths or any(
            not isinstance(n, int) or n < 1 for n in self.piece_lengths
        ):
            errors['piece_lengths'] = 'Piece lengths must be positive integers'

        unknown = [m for m in self.methods if m not in METHODS]
        if not self.methods or unknown:
            errors['methods'] = f"Methods must be a non-empty subset of {', '.join(METHODS)}"

        if not isinstance(self.grid_denominator, int) or self.grid_denominator < 1:
            errors['grid_denominator'] = 'Grid denominator must be a positive integer'

        if not isinstance(self.grid_samples, int) or self.grid_samples < 1:
            errors['grid_samples'] = 'Grid samples must be a positive integer'

        return errors


FALLBACK_SUITES: Dict[str, SuiteConfig] = {
    'sawtooth': SuiteConfig(trials=1, max_s=8, shallow_max_s=3, breakpoint_max_s=5),
    'random1d': SuiteConfig(trials=500, min_len=4, max_len=14),
    'compose': SuiteConfig(trials=100, max_s=5, piece_lengths=[2, 3]),
    'random3d': SuiteConfig(trials=100, min_len=4, max_len=10, arity=3, methods=['deep-nn'],
                            grid_denominator=29, grid_samples=300),
}


def _suite_from_dict(data: Dict[str, Any], base: SuiteConfig) -> SuiteConfig:
    values = base.to_dict()
    for key, value in data.items():
        if key not in values:
            raise ValueError(f"Unknown suite setting '{key}'")
        values[key] = list(value) if isinstance(values[key], list) else int(value)
    return SuiteConfig(**values)


class ExperimentsConfig:
    """Manages experiment suite defaults from a YAML file"""

    DEFAULT_CONFIG_PATH = Path('experiments_config.yaml')

    def __init__(self, config_path: Optional[Path] = None):
        """Initialize with optional custom config path"""
        self.config_path = Path(config_path) if config_path else self.DEFAULT_CONFIG_PATH
        self.suites: Dict[str, SuiteConfig] = {}
        self._load_config()

    def _load_config(self):
        """Load suites from YAML, falling back to the built-in defaults"""
        try:
            if not self.config_path.exists():
                raise FileNotFoundError(f"Configuration file not found: {self.config_path}")

            with open(self.config_path, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f)

            if not isinstance(data, dict) or not isinstance(data.get('suites'), dict):
                raise ValueError("Configuration must contain a 'suites' mapping")

            suites = {}
            for name, fallback in FALLBACK_SUITES.items():
                suite = _suite_from_dict(data['suites'].get(name) or {}, fallback)
                errors = suite.validate()
                if errors:
                    raise ValueError(f"Invalid suite '{name}': {errors}")
                suites[name] = suite

            self.suites = suites
            logger.debug(f"Experiment suites loaded from {self.config_path}")

        except FileNotFoundError as e:
            logger.debug(f"{e}; using built-in experiment defaults")
            self._use_fallback_config()
        except Exception as e:
            logger.warning(f"Error loading experiment configuration: {e}")
            logger.warning("Using fallback experiment configuration")
            self._use_fallback_config()

    def _use_fallback_config(self):
        """Use hardcoded fallback configuration"""
        self.suites = {name: SuiteConfig(**suite.to_dict()) for name, suite in FALLBACK_SUITES.items()}

    def get_suite(self, name: str) -> SuiteConfig:
        if name not in self.suites:
            raise KeyError(f"Unknown experiment '{name}', expected one of {', '.join(sorted(self.suites))}")
        return self.suites[name]


# Global experiments configuration instance
experiments_config = ExperimentsConfig()
