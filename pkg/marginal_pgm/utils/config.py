"""
Configuration management for marginal-pgm runs.

A run is described by one JSON file. Values from the file are merged over
``ConfigManager.default_settings``, then environment overrides (``.env`` is
honoured) and finally explicit overrides such as command-line flags.
"""
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import load_dotenv

from ..core.errors import ConfigError
from ..core.junction_tree import DEFAULT_PARAMETER_CAP

# Load environment variables from .env file
load_dotenv()

ENV_OVERRIDES = {
    "PGM_SEED": ("seed", int),
    "PGM_OUTPUT_DIR": ("output_dir", str),
    "PGM_PARAMETER_CAP": ("parameter_cap", int),
}
LOG_LEVEL_ENV = "PGM_LOG_LEVEL"

ALGORITHMS = ("alg1", "alg2")
LOSSES = ("l1", "l2")
MODES = ("measure", "mwem")
TOTAL_MODES = ("known", "estimate")
STEP_RULES = ("inv_sqrt", "constant", "lipschitz")


def default_log_level() -> str:
    """Log level name from ``PGM_LOG_LEVEL``, WARNING when unset."""
    return os.getenv(LOG_LEVEL_ENV, "WARNING").upper()


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one pipeline run. Paths are absolute."""
    dataset_path: Optional[Path] = None
    domain_path: Optional[Path] = None
    measurements: List[Dict[str, Any]] = field(default_factory=list)
    measurement_file: Optional[Path] = None
    workload: Optional[List[Dict[str, Any]]] = None
    queries: List[Dict[str, Any]] = field(default_factory=list)
    epsilon: float = 1.0
    mode: str = "measure"
    rounds: int = 10
    algorithm: str = "alg2"
    loss: str = "l2"
    iterations: int = 10_000
    step_rule: str = "inv_sqrt"
    step_size: Optional[float] = None
    line_search: bool = False
    tolerance: Optional[float] = 1e-9
    lipschitz_aggregate: str = "sum"
    seed: Optional[int] = None
    output_dir: Path = Path("output")
    total_mode: str = "known"
    total: Optional[float] = None
    synthetic_records: Optional[int] = None
    binning: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    noiseless: bool = False
    parameter_cap: int = DEFAULT_PARAMETER_CAP

    def __post_init__(self):
        def choice(key, options):
            if getattr(self, key) not in options:
                raise ConfigError(f"{key} must be one of {options}, got {getattr(self, key)!r}")

        choice("algorithm", ALGORITHMS)
        choice("loss", LOSSES)
        choice("mode", MODES)
        choice("total_mode", TOTAL_MODES)
        choice("step_rule", STEP_RULES)
        choice("lipschitz_aggregate", ("max", "sum"))
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")
        if self.parameter_cap < 1:
            raise ConfigError(f"parameter_cap must be >= 1, got {self.parameter_cap}")
        if self.step_size is not None and not self.step_size > 0:
            raise ConfigError(f"step_size must be positive, got {self.step_size}")
        if self.tolerance is not None and self.tolerance < 0:
            raise ConfigError(f"tolerance must be non-negative, got {self.tolerance}")
        if self.synthetic_records is not None and self.synthetic_records < 0:
            raise ConfigError("synthetic_records must be >= 0")
        if self.domain_path is None:
            raise ConfigError("domain_path is required")
        if self.measurement_file is not None:
            if self.total_mode == "known" and self.total is None:
                raise ConfigError("total is required with a measurement_file and total_mode 'known'")
        else:
            if self.dataset_path is None:
                raise ConfigError("dataset_path is required unless measurement_file is given")
            if self.mode == "measure" and not self.measurements:
                raise ConfigError("measure mode needs at least one entry in 'measurements'")
            if self.mode == "mwem" and not self.workload:
                raise ConfigError("mwem mode needs a 'workload'")
            if self.mode == "mwem" and self.total_mode == "estimate":
                raise ConfigError("mwem mode uses the dataset's record count; set total_mode to 'known'")

    @property
    def uses_dataset(self) -> bool:
        return self.measurement_file is None


class ConfigManager:
    """Loads, merges and validates run configuration."""

    def __init__(self, config_file: Optional[Union[str, Path]] = None,
                 overrides: Optional[Dict[str, Any]] = None):
        """Initialize the configuration manager.

        Args:
            config_file: Path to the JSON run configuration.
            overrides: Values that win over file and environment (CLI flags).
        """
        self.config_file = Path(config_file).resolve() if config_file else None
        self.base_dir = self.config_file.parent if self.config_file else Path.cwd()
        self.default_settings: Dict[str, Any] = {
            'dataset_path': None,
            'domain_path': None,
            'measurements': [],
            'measurement_file': None,
            'workload': None,
            'queries': [],
            'epsilon': 1.0,
            'mode': 'measure',
            'rounds': 10,
            'algorithm': 'alg2',
            'loss': 'l2',
            'iterations': 10_000,
            'step_rule': 'inv_sqrt',
            'step_size': None,
            'line_search': False,
            'tolerance': 1e-9,
            'lipschitz_aggregate': 'sum',
            'seed': None,
            'output_dir': 'output',
            'total_mode': 'known',
            'total': None,
            'synthetic_records': None,
            'binning': {},
            'noiseless': False,
            'parameter_cap': DEFAULT_PARAMETER_CAP,
        }
        self._settings = self._load_config()
        self._apply_environment()
        for key, value in (overrides or {}).items():
            if value is not None:
                self.set(key, value)

    def _load_config(self) -> Dict[str, Any]:
        """Load the configuration file merged over the defaults.

        Raises:
            ConfigError: If the file cannot be read or names unknown keys.
        """
        if self.config_file is None:
            return self.default_settings.copy()
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                config = json.load(f)
        except FileNotFoundError:
            raise ConfigError(f"config file {self.config_file} not found") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {self.config_file} is not valid JSON: {e}") from None
        if not isinstance(config, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = set(config) - set(self.default_settings)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")

        # Merge with default settings to ensure all keys exist
        return {**self.default_settings, **config}

    def _apply_environment(self) -> None:
        """Apply ``PGM_*`` environment overrides over the file values."""
        for variable, (key, cast) in ENV_OVERRIDES.items():
            raw = os.getenv(variable)
            if raw is None or raw == "":
                continue
            try:
                self._settings[key] = cast(raw)
            except ValueError:
                raise ConfigError(f"{variable}={raw!r} is not a valid {key}") from None

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value.

        Args:
            key: Configuration key.
            default: Value returned when the key is not set.

        Returns:
            The merged value for ``key``.
        """
        return self._settings.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """Set a configuration value.

        Args:
            key: Configuration key; must be one of ``default_settings``.
            value: New value, validated by :meth:`to_run_config`.

        Raises:
            ConfigError: If ``key`` is unknown.
        """
        if key not in self.default_settings:
            raise ConfigError(f"unknown config key {key!r}")
        self._settings[key] = value

    def _path(self, value: Optional[Union[str, Path]]) -> Optional[Path]:
        if value is None:
            return None
        path = Path(value)
        return path if path.is_absolute() else (self.base_dir / path).resolve()

    def _inline_or_file(self, key: str) -> Any:
        """A list given inline or as a path to a JSON file holding it."""
        value = self.get(key)
        if isinstance(value, (str, Path)):
            path = self._path(value)
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    return json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"cannot read {key} from {path}: {e}") from None
        return value

    def to_run_config(self) -> RunConfig:
        """Return the validated configuration.

        Raises:
            ConfigError: For missing or invalid settings.
        """
        s = self._settings
        try:
            return RunConfig(
                dataset_path=self._path(s['dataset_path']),
                domain_path=self._path(s['domain_path']),
                measurements=list(self._inline_or_file('measurements') or []),
                measurement_file=self._path(s['measurement_file']),
                workload=self._inline_or_file('workload'),
                queries=list(self._inline_or_file('queries') or []),
                epsilon=float(s['epsilon']),
                mode=s['mode'],
                rounds=int(s['rounds']),
                algorithm=s['algorithm'],
                loss=s['loss'],
                iterations=int(s['iterations']),
                step_rule=s['step_rule'],
                step_size=None if s['step_size'] is None else float(s['step_size']),
                line_search=bool(s['line_search']),
                tolerance=None if s['tolerance'] is None else float(s['tolerance']),
                lipschitz_aggregate=s['lipschitz_aggregate'],
                seed=None if s['seed'] is None else int(s['seed']),
                output_dir=self._path(s['output_dir']),
                total_mode=s['total_mode'],
                total=None if s['total'] is None else float(s['total']),
                synthetic_records=(None if s['synthetic_records'] is None
                                   else int(s['synthetic_records'])),
                binning=dict(s['binning'] or {}),
                noiseless=bool(s['noiseless']),
                parameter_cap=int(s['parameter_cap']),
            )
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid configuration value: {e}") from None
