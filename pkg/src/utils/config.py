"""Configuration management for the Dunkl-Williams laboratory."""

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Optional

from ..core.errors import InvalidTolerance


@dataclass(frozen=True)
class ToleranceConfig:
    """Numeric tolerances governing every equality and feasibility decision."""
    tol_eig: float = 1e-12
    tol_eq: float = 1e-9
    tol_feas: float = 1e-7
    max_iter: int = 5000

    def __post_init__(self):
        for name in ('tol_eig', 'tol_eq', 'tol_feas', 'max_iter'):
            if not getattr(self, name) > 0:
                raise InvalidTolerance(f"{name} must be strictly positive, got {getattr(self, name)!r}")
        if self.tol_eig > self.tol_feas:
            raise InvalidTolerance(
                f"tol_eig ({self.tol_eig}) must not exceed tol_feas ({self.tol_feas})"
            )

    def with_overrides(self, **overrides: Optional[float]) -> 'ToleranceConfig':
        """Return a copy with every non-None override applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if 'max_iter' in changes:
            changes['max_iter'] = int(changes['max_iter'])
        return replace(self, **changes) if changes else self


DEFAULT_TOLERANCES = ToleranceConfig()


class Config:
    """Laboratory configuration manager backed by a JSON file."""

    # Default settings
    DEFAULTS = {
        'tol_eig': 1e-12,              # Eigensolver reconstruction tolerance
        'tol_eq': 1e-9,                # Equality decisions
        'tol_feas': 1e-7,              # State feasibility residual
        'max_iter': 5000,              # Solver iterations / Jacobi sweeps
        'solver_restarts': 5,          # Random pure-state restarts
        'grid_step': 0.02,             # Bloch grid oracle step
        'jobs': 1,                     # Worker processes for sweeps
        'seed_base': 0,                # First seed when --seeds is absent
        'near_equality_eps': 1e-2,     # Default NearEquality perturbation
        'min_norm': 0.05,              # Rejection threshold for random x_j
    }

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.config_file = data_dir / 'config.json'
        self.artifacts_dir = data_dir / 'artifacts'
        self._config: Dict[str, Any] = {}
        self._load_config()

    def _load_config(self):
        """Load configuration from file or create with defaults."""
        if self.config_file.exists():
            try:
                with open(self.config_file, 'r') as f:
                    self._config = json.load(f)
            except (json.JSONDecodeError, IOError):
                self._config = {}

        # Merge with defaults (add any missing keys)
        for key, value in self.DEFAULTS.items():
            if key not in self._config:
                self._config[key] = value

        self._save_config()

    def _save_config(self):
        """Save configuration to file."""
        self.data_dir.mkdir(parents=True, exist_ok=True)
        with open(self.config_file, 'w') as f:
            json.dump(self._config, f, indent=2, sort_keys=True)

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value."""
        return self._config.get(key, default if default is not None else self.DEFAULTS.get(key))

    def set(self, key: str, value: Any):
        """Set a configuration value and save."""
        self._config[key] = value
        self._save_config()

    def get_all(self) -> Dict[str, Any]:
        """Get all configuration values."""
        return self._config.copy()

    def reset_to_defaults(self):
        """Reset all settings to defaults."""
        self._config = self.DEFAULTS.copy()
        self._save_config()

    def tolerances(self) -> ToleranceConfig:
        """Build the validated tolerance record from the stored settings."""
        return ToleranceConfig(
            tol_eig=float(self.get('tol_eig')),
            tol_eq=float(self.get('tol_eq')),
            tol_feas=float(self.get('tol_feas')),
            max_iter=int(self.get('max_iter')),
        )

    @property
    def tol_eq(self) -> float:
        return self.get('tol_eq')

    @tol_eq.setter
    def tol_eq(self, value: float):
        self.set('tol_eq', float(value))

    @property
    def tol_feas(self) -> float:
        return self.get('tol_feas')

    @tol_feas.setter
    def tol_feas(self, value: float):
        self.set('tol_feas', float(value))

    @property
    def max_iter(self) -> int:
        return self.get('max_iter')

    @max_iter.setter
    def max_iter(self, value: int):
        self.set('max_iter', max(1, int(value)))

    @property
    def solver_restarts(self) -> int:
        return self.get('solver_restarts')

    @solver_restarts.setter
    def solver_restarts(self, value: int):
        self.set('solver_restarts', max(0, int(value)))

    @property
    def grid_step(self) -> float:
        return self.get('grid_step')

    @grid_step.setter
    def grid_step(self, value: float):
        self.set('grid_step', min(0.5, max(1e-3, float(value))))

    @property
    def jobs(self) -> int:
        return self.get('jobs')

    @jobs.setter
    def jobs(self, value: int):
        self.set('jobs', max(1, int(value)))

    @property
    def seed_base(self) -> int:
        """Seed base, with DWMOD_SEED taking precedence over the file."""
        env_seed = os.environ.get('DWMOD_SEED')
        if env_seed is not None and env_seed.strip():
            return int(env_seed)
        return self.get('seed_base', 0)

    @seed_base.setter
    def seed_base(self, value: int):
        self.set('seed_base', int(value))

    @property
    def near_equality_eps(self) -> float:
        return self.get('near_equality_eps')

    @near_equality_eps.setter
    def near_equality_eps(self, value: float):
        self.set('near_equality_eps', max(1e-12, float(value)))

    @property
    def min_norm(self) -> float:
        return self.get('min_norm')

    @min_norm.setter
    def min_norm(self, value: float):
        self.set('min_norm', max(0.0, float(value)))


def get_app_data_dir() -> Path:
    """Get the laboratory data directory."""
    # DWMOD_HOME relocates the directory; otherwise keep it next to the sources
    env_home = os.environ.get('DWMOD_HOME')
    if env_home:
        return Path(env_home)
    return Path(__file__).parent.parent.parent / 'data'


def get_config() -> Config:
    """Get the global configuration instance."""
    return Config(get_app_data_dir())
