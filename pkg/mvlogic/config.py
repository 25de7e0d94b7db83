"""
MV-Logic Configuration Management
"""

import os
import json
import yaml
from dataclasses import dataclass, asdict
from typing import Dict, Any
from pathlib import Path

_LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


@dataclass
class AppConfig:
    """Application configuration with default values"""
    max_lcm: int = 10_000  # Largest denominator lcm accepted by rational extraction
    max_real_magnitude: float = 1000.0
    eps: float = 1e-9
    sample_limit: int = 48  # Longer 1-D terms are traced symbolically instead of sampled
    grid_denominator: int = 13
    grid_samples: int = 500
    max_shallow_s: int = 12
    workers: int = 0  # 0 = one worker per CPU
    log_level: str = "INFO"
    flask_host: str = "127.0.0.1"
    flask_port: int = 5000
    flask_debug: bool = False

    def validate(self) -> Dict[str, str]:
        """Validate configuration values and return errors if any"""
        errors = {}

        if not isinstance(self.max_lcm, int) or self.max_lcm < 1:
            errors['max_lcm'] = 'Max lcm must be a positive integer'

        if not isinstance(self.max_real_magnitude, (int, float)):
            errors['max_real_magnitude'] = 'Max real magnitude must be a number'
        elif self.max_real_magnitude <= 0:
            errors['max_real_magnitude'] = 'Max real magnitude must be positive'

        if not isinstance(self.eps, (int, float)):
            errors['eps'] = 'Epsilon must be a number'
        elif not (0.0 <= self.eps < 0.5):
            errors['eps'] = 'Epsilon must be between 0.0 and 0.5'

        if not isinstance(self.sample_limit, int) or self.sample_limit < 1:
            errors['sample_limit'] = 'Sample limit must be a positive integer'

        if not isinstance(self.grid_denominator, int) or self.grid_denominator < 1:
            errors['grid_denominator'] = 'Grid denominator must be a positive integer'

        if not isinstance(self.grid_samples, int) or self.grid_samples < 1:
            errors['grid_samples'] = 'Grid samples must be a positive integer'

        if not isinstance(self.max_shallow_s, int) or not (1 <= self.max_shallow_s <= 20):
            errors['max_shallow_s'] = 'Max shallow s must be between 1 and 20'

        if not isinstance(self.workers, int) or self.workers < 0:
            errors['workers'] = 'Workers must be a non-negative integer'

        if not isinstance(self.log_level, str) or self.log_level.upper() not in _LOG_LEVELS:
            errors['log_level'] = f"Log level must be one of {', '.join(_LOG_LEVELS)}"

        if not self.flask_host or not isinstance(self.flask_host, str):
            errors['flask_host'] = 'Flask host must be a non-empty string'

        if not isinstance(self.flask_port, int):
            errors['flask_port'] = 'Flask port must be an integer'
        elif not (1 <= self.flask_port <= 65535):
            errors['flask_port'] = 'Flask port must be between 1 and 65535'

        if not isinstance(self.flask_debug, bool):
            errors['flask_debug'] = 'Flask debug must be a boolean value'

        return errors

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary"""
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'AppConfig':
        """Create configuration from dictionary with type conversion"""
        config_data = {}

        for field in ('max_lcm', 'sample_limit', 'grid_denominator', 'grid_samples',
                      'max_shallow_s', 'workers', 'flask_port'):
            if field in data:
                try:
                    config_data[field] = int(data[field])
                except (ValueError, TypeError):
                    config_data[field] = getattr(cls, field)

        for field in ('max_real_magnitude', 'eps'):
            if field in data:
                try:
                    config_data[field] = float(data[field])
                except (ValueError, TypeError):
                    config_data[field] = getattr(cls, field)

        if 'log_level' in data:
            config_data['log_level'] = str(data['log_level']).upper()

        if 'flask_host' in data:
            config_data['flask_host'] = str(data['flask_host'])

        if 'flask_debug' in data:
            if isinstance(data['flask_debug'], bool):
                config_data['flask_debug'] = data['flask_debug']
            elif isinstance(data['flask_debug'], str):
                config_data['flask_debug'] = data['flask_debug'].lower() in ('true', '1', 'yes', 'on')
            else:
                config_data['flask_debug'] = cls.flask_debug

        return cls(**config_data)

    @classmethod
    def from_file(cls, config_path: str) -> 'AppConfig':
        """Load configuration from JSON or YAML file"""
        config_file = Path(config_path)

        if not config_file.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                if config_file.suffix.lower() in ['.yaml', '.yml']:
                    data = yaml.safe_load(f)
                elif config_file.suffix.lower() == '.json':
                    data = json.load(f)
                else:
                    raise ValueError(f"Unsupported configuration file format: {config_file.suffix}")

            if not isinstance(data, dict):
                raise ValueError("Configuration file must contain a JSON object or YAML mapping")

            return cls.from_dict(data)

        except (json.JSONDecodeError, yaml.YAMLError) as e:
            raise ValueError(f"Invalid configuration file format: {e}")
        except ValueError:
            raise
        except Exception as e:
            raise ValueError(f"Failed to load configuration file: {e}")

    @classmethod
    def from_env(cls) -> 'AppConfig':
        """Load service configuration from MVLOGIC_* environment variables"""
        return cls.from_dict({
            field: os.environ[f"MVLOGIC_{field.upper()}"]
            for field in cls.__dataclass_fields__
            if f"MVLOGIC_{field.upper()}" in os.environ
        })


# Global configuration instance; the CLI replaces it when --config is given
config = AppConfig()


def set_config(new_config: AppConfig) -> None:
    """Replace the global configuration in place so importers see the change"""
    for field, value in new_config.to_dict().items():
        setattr(config, field, value)
