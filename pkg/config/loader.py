"""
Run configuration: key-value run files merged with command-line flags.

Precedence is flags > file > defaults. A run file looks like::

    # comments and blank lines are ignored
    survey = data/hps_phase37.csv
    chains = 4
    columns.vaccinated = RECVDVACC
"""

from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import joblib

from config.settings import (
    DEFAULT_CLUSTERING,
    DEFAULT_HMC,
    DEFAULT_PRIOR,
    DEFAULT_SIMULATION,
    DEFAULT_SURVEY_COLUMNS,
    VALIDATION_RANGES,
)
from utils.errors import ConfigurationError
from utils.seeding import config_digest

PATH_KEYS = ('survey', 'county', 'truth', 'draws')

# Settings that never change results; left out of the digest
UNDIGESTED_KEYS = ('out_dir', 'workers')


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs; immutable once built."""
    survey: Optional[Path] = None
    county: Optional[Path] = None
    truth: Optional[Path] = None
    draws: Optional[Path] = None
    out_dir: Path = Path('output')
    seed: int = 0
    workers: int = 1
    columns: Tuple[Tuple[str, str], ...] = tuple(DEFAULT_SURVEY_COLUMNS.items())
    coverage_date: Optional[str] = None
    beta_scale: float = DEFAULT_PRIOR['beta_scale']
    sigma_alpha_hyper_scale: float = DEFAULT_PRIOR['sigma_alpha_hyper_scale']
    chains: int = DEFAULT_HMC['chains']
    iterations: int = DEFAULT_HMC['iterations']
    warmup_fraction: float = DEFAULT_HMC['warmup_fraction']
    target_accept: float = DEFAULT_HMC['target_accept']
    leapfrog_steps: int = DEFAULT_HMC['leapfrog_steps']
    leapfrog_jitter: float = DEFAULT_HMC['leapfrog_jitter']
    linkage: str = DEFAULT_CLUSTERING['linkage']
    k_max: int = DEFAULT_CLUSTERING['k_max']
    reference_draws: int = DEFAULT_CLUSTERING['reference_draws']
    n_records: int = DEFAULT_SIMULATION['n_records']

    @property
    def column_map(self) -> Dict[str, str]:
        return dict(self.columns)

    def digest_values(self) -> Dict[str, Any]:
        values = asdict(self)
        for key in UNDIGESTED_KEYS:
            values.pop(key)
        values['columns'] = dict(self.columns)
        for key in PATH_KEYS:
            values[key] = None if values[key] is None else Path(values[key]).as_posix()
        return values

    @property
    def digest(self) -> str:
        return config_digest(self.digest_values())


_FIELD_TYPES = {
    'survey': Path, 'county': Path, 'truth': Path, 'draws': Path, 'out_dir': Path,
    'seed': int, 'workers': int, 'coverage_date': str,
    'beta_scale': float, 'sigma_alpha_hyper_scale': float,
    'chains': int, 'iterations': int, 'warmup_fraction': float, 'target_accept': float,
    'leapfrog_steps': int, 'leapfrog_jitter': float,
    'linkage': str, 'k_max': int, 'reference_draws': int, 'n_records': int,
}


def parse_config_text(text: str, origin: str = '<config>') -> Dict[str, str]:
    """
    Parse ``key = value`` lines.

    Raises:
        ConfigurationError: Malformed line or repeated key
    """
    values = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigurationError(f"{origin}:{number}: expected 'key = value'. Got: {raw.strip()!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        if not key:
            raise ConfigurationError(f"{origin}:{number}: empty key")
        if key in values:
            raise ConfigurationError(f"{origin}:{number}: key {key!r} given twice")
        values[key] = value
    return values


def read_config_file(path) -> Dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"Config file not found: {path}")
    return parse_config_text(path.read_text(encoding='utf-8'), str(path))


def _convert(key: str, value: Any) -> Any:
    if value is None:
        return None
    kind = _FIELD_TYPES[key]
    if isinstance(value, kind):
        return value
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{key} must be {kind.__name__}. Got: {value!r}") from exc


def _validate_ranges(config: RunConfig):
    for key, (low, high) in VALIDATION_RANGES.items():
        value = getattr(config, key)
        if not low <= value <= high:
            raise ConfigurationError(f"{key} must be in [{low}, {high}]. Got: {value}")
    if config.seed < 0:
        raise ConfigurationError(f"seed must be non-negative. Got: {config.seed}")
    if config.linkage not in ('ward', 'complete', 'average'):
        raise ConfigurationError(f"linkage must be ward, complete or average. Got: {config.linkage!r}")
    unknown = set(dict(config.columns)) - set(DEFAULT_SURVEY_COLUMNS)
    if unknown:
        raise ConfigurationError(f"Unknown survey field(s) in column mapping: {sorted(unknown)}")


def build_run_config(
    file_values: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """
    Merge defaults < run-file values < command-line overrides.

    ``overrides`` entries that are None are ignored (flag not given).

    Raises:
        ConfigurationError: Unknown key, unparsable value or out-of-range setting
    """
    columns = dict(DEFAULT_SURVEY_COLUMNS)
    values: Dict[str, Any] = {}

    for key, value in (file_values or {}).items():
        if key.startswith('columns.'):
            columns[key.split('.', 1)[1]] = value
        elif key in _FIELD_TYPES:
            values[key] = _convert(key, value)
        else:
            raise ConfigurationError(f"Unknown config key: {key!r}")

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"Unknown config key: {key!r}")
        values[key] = _convert(key, value)

    if 'workers' not in values:
        values['workers'] = max(1, joblib.cpu_count())

    config = RunConfig(columns=tuple(sorted(columns.items())), **values)
    _validate_ranges(config)
    return config


def load_run_config(config_path=None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    file_values = read_config_file(config_path) if config_path is not None else {}
    return build_run_config(file_values, overrides)


def require_paths(config: RunConfig, *keys: str) -> RunConfig:
    """
    Check that the named input paths are set and exist.

    Raises:
        ConfigurationError: A path is unset or missing on disk
    """
    for key in keys:
        path = getattr(config, key)
        if path is None:
            raise ConfigurationError(f"No {key} file configured (use --{key} or '{key} = ...')")
        if not Path(path).is_file():
            raise ConfigurationError(f"File not found: {path}")
    return config


def with_overrides(config: RunConfig, **changes) -> RunConfig:
    """Copy of ``config`` with some settings replaced and re-validated."""
    updated = replace(config, **changes)
    _validate_ranges(updated)
    return updated
