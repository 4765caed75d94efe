"""
Generative simulator for the multilevel logistic model.
Runs the model forward to produce synthetic survey datasets with a known truth.
"""

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from config.settings import CATEGORY_LEVELS, DEFAULT_COVARIATE_PROBS, DESIGN_GROUP_ORDER
from data.survey import SurveyDataset, SurveyRecord, design_column_names
from models.multilevel_logistic import N_FIXED, ParameterVector, predict_probability
from utils.seeding import derive_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulationLayout:
    """
    Records per state plus covariate level probabilities.

    ``covariate_probs`` maps each group to probabilities in the order of
    CATEGORY_LEVELS; groups left out use DEFAULT_COVARIATE_PROBS.
    """
    state_counts: Mapping[str, int]
    covariate_probs: Mapping[str, Sequence[float]] = field(
        default_factory=lambda: dict(DEFAULT_COVARIATE_PROBS)
    )

    def __post_init__(self):
        for state, count in self.state_counts.items():
            if int(count) != count or count < 1:
                raise ValueError(f"Record count for {state} must be a positive integer. Got: {count}")
        for group in self.covariate_probs:
            if group not in CATEGORY_LEVELS:
                raise ValueError(f"Unknown covariate group: {group}")
        for group in DESIGN_GROUP_ORDER:
            probs = np.asarray(self.probabilities(group), dtype=float)
            if probs.shape != (len(CATEGORY_LEVELS[group]),):
                raise ValueError(
                    f"{group} needs {len(CATEGORY_LEVELS[group])} probabilities. Got: {probs.size}"
                )
            if np.any(probs < 0) or not np.isclose(probs.sum(), 1.0, atol=1e-9):
                raise ValueError(f"{group} probabilities must be non-negative and sum to 1. Got: {probs}")

    @property
    def states(self) -> tuple:
        return tuple(sorted(self.state_counts))

    @property
    def total(self) -> int:
        return int(sum(self.state_counts.values()))

    def probabilities(self, group: str) -> Sequence[float]:
        return self.covariate_probs.get(group, DEFAULT_COVARIATE_PROBS[group])

    @classmethod
    def balanced(
        cls,
        states: Sequence[str],
        n_records: int,
        covariate_probs: Mapping[str, Sequence[float]] = None
    ) -> 'SimulationLayout':
        """Spread ``n_records`` as evenly as possible over ``states`` (roster order)."""
        states = sorted(states)
        if n_records < len(states):
            raise ValueError(
                f"Need at least one record per state ({len(states)}). Got: {n_records}"
            )
        base, extra = divmod(n_records, len(states))
        counts = {s: base + (1 if j < extra else 0) for j, s in enumerate(states)}
        if covariate_probs is None:
            return cls(counts)
        return cls(counts, dict(covariate_probs))


def simulate_dataset(truth: ParameterVector, layout: SimulationLayout, seed: int) -> SurveyDataset:
    """
    Draw covariates, compute pi_i and draw Y_i ~ Bernoulli(pi_i).

    Args:
        truth: Parameters; alpha follows the sorted states of ``layout``
        layout: Per-state record counts and covariate distribution
        seed: Top-level seed; the same seed reproduces the same dataset

    Returns:
        SurveyDataset (empty when the layout has no states)
    """
    states = layout.states
    if truth.n_states != len(states):
        raise ValueError(
            f"truth has {truth.n_states} state intercepts but the layout has {len(states)} states"
        )
    if not states:
        return SurveyDataset((), ())

    covariate_rng = derive_rng(seed, 'simulate', 'covariates')
    response_rng = derive_rng(seed, 'simulate', 'response')

    counts = np.array([layout.state_counts[s] for s in states])
    state_index = np.repeat(np.arange(len(states)), counts)
    n = state_index.size

    level_index = {
        group: covariate_rng.choice(
            len(CATEGORY_LEVELS[group]), size=n, p=np.asarray(layout.probabilities(group), dtype=float)
        )
        for group in DESIGN_GROUP_ORDER
    }

    names = design_column_names()
    x = np.zeros((n, N_FIXED))
    x[:, 0] = 1.0
    for group in DESIGN_GROUP_ORDER:
        for k, level in enumerate(CATEGORY_LEVELS[group][1:], start=1):
            x[:, 1 + names.index(f"{group}={level}")] = level_index[group] == k

    pi = predict_probability(x @ truth.beta + truth.alpha[state_index])
    response = (response_rng.random(n) < pi).astype(int)

    records = [
        SurveyRecord(
            gender=CATEGORY_LEVELS['gender'][level_index['gender'][i]],
            race=CATEGORY_LEVELS['race'][level_index['race'][i]],
            education=CATEGORY_LEVELS['education'][level_index['education'][i]],
            income=CATEGORY_LEVELS['income'][level_index['income'][i]],
            state=states[state_index[i]],
            vaccinated=int(response[i]),
        )
        for i in range(n)
    ]
    logger.info(f"Simulated {n} records over {len(states)} states (mean response {response.mean():.3f})")
    return SurveyDataset.from_records(records)


def draw_truth(
    beta: Sequence[float],
    sigma_alpha: float,
    n_states: int,
    seed: int
) -> ParameterVector:
    """Truth with given fixed effects and alpha_j drawn from N(0, sigma_alpha^2)."""
    if sigma_alpha <= 0:
        raise ValueError(f"sigma_alpha must be positive. Got: {sigma_alpha}")
    rng = derive_rng(seed, 'simulate', 'alpha')
    alpha = rng.normal(0.0, sigma_alpha, size=n_states)
    return ParameterVector(np.asarray(beta, dtype=float), alpha, np.log(sigma_alpha))
