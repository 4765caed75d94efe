"""
simulate subcommand: synthetic survey data from known parameters.

Truth files use the run-file syntax::

    beta = -0.74, 0.45, 1.24, 1.79, 0.39, 0.91, -0.3, 0.25, 0.43, 0.77, 0.04
    sigma_alpha = 0.3
    # optional: one intercept per state, in roster order
    alpha = 0.1, -0.2, ...
    # optional: roster, defaults to the 48 contiguous states plus DC
    states = AL AR AZ ...
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from config.loader import RunConfig, parse_config_text
from config.settings import DEFAULT_SIMULATION, REFERENCE_FIXED_EFFECTS, STATE_ROSTER
from data.survey import write_survey
from models.multilevel_logistic import N_FIXED, ParameterVector
from models.simulation import SimulationLayout, draw_truth, simulate_dataset
from reporting.export import ReportGenerator, write_text
from utils.errors import ConfigurationError, InputDataError

logger = logging.getLogger(__name__)

TRUTH_KEYS = ('beta', 'sigma_alpha', 'alpha', 'states')


@dataclass(frozen=True)
class TruthSpec:
    """Simulation truth: fixed effects, intercept scale, optional explicit intercepts."""
    beta: Tuple[float, ...] = REFERENCE_FIXED_EFFECTS
    sigma_alpha: float = DEFAULT_SIMULATION['sigma_alpha']
    alpha: Optional[Tuple[float, ...]] = None
    states: Tuple[str, ...] = STATE_ROSTER

    def __post_init__(self):
        if len(self.beta) != N_FIXED:
            raise InputDataError(f"Truth needs {N_FIXED} beta values. Got: {len(self.beta)}")
        if not np.isfinite(self.sigma_alpha) or self.sigma_alpha <= 0:
            raise InputDataError(f"sigma_alpha must be positive. Got: {self.sigma_alpha}")
        if len(set(self.states)) != len(self.states) or not self.states:
            raise InputDataError("Truth states must be a non-empty list of distinct codes")
        outside = sorted(set(self.states) - set(STATE_ROSTER))
        if outside:
            raise InputDataError(f"Truth states outside the roster: {outside}")
        if self.alpha is not None and len(self.alpha) != len(self.states):
            raise InputDataError(
                f"Truth has {len(self.alpha)} alpha values for {len(self.states)} states"
            )

    def parameters(self, seed: int) -> ParameterVector:
        """Truth as a ParameterVector over the sorted states; alpha drawn when not given."""
        states = sorted(self.states)
        if self.alpha is None:
            return draw_truth(self.beta, self.sigma_alpha, len(states), seed)
        by_state = dict(zip(self.states, self.alpha))
        alpha = np.array([by_state[s] for s in states])
        return ParameterVector(np.asarray(self.beta, dtype=float), alpha, np.log(self.sigma_alpha))


def _numbers(key: str, text: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(v) for v in re.split(r'[,\s]+', text.strip()) if v)
    except ValueError as e:
        raise InputDataError(f"Truth value {key} must be numeric. Got: {text!r}") from e
    if not all(np.isfinite(values)):
        raise InputDataError(f"Truth value {key} must be finite. Got: {text!r}")
    return values


def parse_truth_text(text: str, origin: str = '<truth>') -> TruthSpec:
    """
    Raises:
        InputDataError: Unknown key, missing beta/sigma_alpha or bad values
    """
    try:
        values = parse_config_text(text, origin)
    except ConfigurationError as e:
        raise InputDataError(str(e)) from e
    unknown = sorted(set(values) - set(TRUTH_KEYS))
    if unknown:
        raise InputDataError(f"{origin}: unknown truth key(s): {unknown}")
    missing = [k for k in ('beta', 'sigma_alpha') if k not in values]
    if missing:
        raise InputDataError(f"{origin}: missing truth key(s): {missing}")

    sigma = _numbers('sigma_alpha', values['sigma_alpha'])
    if len(sigma) != 1:
        raise InputDataError(f"{origin}: sigma_alpha must be a single number")
    states = STATE_ROSTER
    if 'states' in values:
        states = tuple(s.upper() for s in re.split(r'[,\s]+', values['states'].strip()) if s)
    alpha = _numbers('alpha', values['alpha']) if 'alpha' in values else None
    return TruthSpec(_numbers('beta', values['beta']), sigma[0], alpha, states)


def read_truth_file(path) -> TruthSpec:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"File not found: {path}")
    return parse_truth_text(path.read_text(encoding='utf-8'), str(path))


def format_truth(truth: ParameterVector, states, generator: ReportGenerator) -> str:
    """Truth in the truth-file syntax, so it can be fed back to simulate."""
    def join(values):
        return ', '.join(repr(float(v)) for v in values)

    return (
        generator.header('Simulation truth')
        + f"beta = {join(truth.beta)}\n"
        + f"sigma_alpha = {float(truth.sigma_alpha)!r}\n"
        + f"states = {' '.join(states)}\n"
        + f"alpha = {join(truth.alpha)}\n"
    )


def cmd_simulate(config: RunConfig) -> int:
    """
    Write synthetic_survey.csv (parse_survey input format, no comment
    lines) and synthetic_truth.txt.

    Raises:
        InputDataError: Invalid truth file or too few records for the roster
    """
    truth_spec = read_truth_file(config.truth) if config.truth is not None else TruthSpec()
    states = tuple(sorted(truth_spec.states))
    truth = truth_spec.parameters(config.seed)
    try:
        layout = SimulationLayout.balanced(states, config.n_records)
    except ValueError as e:
        raise InputDataError(str(e)) from e

    dataset = simulate_dataset(truth, layout, config.seed)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / 'synthetic_survey.csv', 'w', encoding='utf-8', newline='\n') as handle:
        write_survey(dataset, handle, schema=config.column_map)

    generator = ReportGenerator(config.seed, config.digest)
    write_text(out_dir / 'synthetic_truth.txt', format_truth(truth, states, generator))
    logger.info(f"Wrote {len(dataset)} synthetic records to {out_dir / 'synthetic_survey.csv'}")
    return 0
