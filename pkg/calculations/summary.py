"""
Posterior summaries, odds ratios and the state random-intercept ladder.
"""

import re
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np
import pandas as pd

from calculations.diagnostics import effective_sample_size, split_rhat
from config.settings import FIXED_EFFECT_LABELS
from models.multilevel_logistic import predict_probability
from utils.errors import DegenerateChainError

SUMMARY_COLUMNS = [
    'name', 'label', 'mean', 'sd', 'ci_low', 'median', 'ci_high',
    'odds_ratio', 'or_ci_low', 'or_ci_high', 'odds_change_pct', 'rhat', 'ess',
]

_BETA = re.compile(r'^beta_(\d+)$')
_ALPHA = re.compile(r'^alpha\[(.+)\]$')


def parameter_label(name: str) -> str:
    """Human-readable label: fixed-effect contrast, state intercept or scale."""
    beta = _BETA.match(name)
    if beta and int(beta.group(1)) < len(FIXED_EFFECT_LABELS):
        return FIXED_EFFECT_LABELS[int(beta.group(1))]
    alpha = _ALPHA.match(name)
    if alpha:
        return f"State intercept {alpha.group(1)}"
    if name == 'sigma_alpha':
        return 'Random-intercept scale'
    return name


def is_fixed_effect(name: str) -> bool:
    return _BETA.match(name) is not None


def odds_ratio(beta: float, d: float = 1.0) -> float:
    """
    Odds ratio exp(d * beta) for a change of ``d`` units in a predictor.

    Raises:
        ValueError: Non-finite input
    """
    if not (np.isfinite(beta) and np.isfinite(d)):
        raise ValueError(f"beta and d must be finite. Got: beta={beta}, d={d}")
    return float(np.exp(d * beta))


@dataclass(frozen=True, eq=False)
class PosteriorSummary:
    """
    One row per parameter: mean, sd, 95% interval, odds ratio (fixed
    effects only), split R-hat and ESS.
    """
    table: pd.DataFrame

    @property
    def names(self) -> List[str]:
        return list(self.table['name'])

    def row(self, name: str) -> pd.Series:
        matches = self.table[self.table['name'] == name]
        if matches.empty:
            raise KeyError(f"No parameter named {name!r}")
        return matches.iloc[0]

    def fixed_effects(self) -> pd.DataFrame:
        return self.table[self.table['name'].map(is_fixed_effect)].reset_index(drop=True)

    def random_intercepts(self) -> pd.DataFrame:
        return self.table[self.table['name'].str.match(_ALPHA)].reset_index(drop=True)

    @property
    def max_rhat(self) -> float:
        values = self.table['rhat'].to_numpy(dtype=float)
        values = values[np.isfinite(values)]
        return float(values.max()) if values.size else float('nan')


def _safe(diagnostic, draws: np.ndarray) -> float:
    try:
        return diagnostic(draws)
    except DegenerateChainError:
        return float('nan')


def summarize_posterior(chains, names: Sequence[str]) -> PosteriorSummary:
    """
    Pool post-warmup draws of every chain and summarise each parameter.

    Quantiles use linear interpolation. Parameters named ``beta_<k>``
    get the odds-ratio columns: exp(mean), exp of the interval bounds and
    the percentage change in odds.

    Raises:
        ValueError: Empty chains or label/dimension mismatch
    """
    if chains.n_chains == 0 or chains.n_draws == 0:
        raise ValueError("Chain set is empty")
    if len(names) != chains.dimension:
        raise ValueError(f"Got {len(names)} parameter labels for {chains.dimension} dimensions")

    pooled = chains.pooled()
    rows = []
    for k, name in enumerate(names):
        values = pooled[:, k]
        low, median, high = np.quantile(values, [0.025, 0.5, 0.975])
        mean = float(values.mean())
        row = {
            'name': name,
            'label': parameter_label(name),
            'mean': mean,
            'sd': float(values.std(ddof=1)) if values.size > 1 else float('nan'),
            'ci_low': float(low),
            'median': float(median),
            'ci_high': float(high),
            'odds_ratio': float('nan'),
            'or_ci_low': float('nan'),
            'or_ci_high': float('nan'),
            'odds_change_pct': float('nan'),
            'rhat': _safe(split_rhat, chains.parameter(k)),
            'ess': _safe(effective_sample_size, chains.parameter(k)),
        }
        if is_fixed_effect(name):
            row['odds_ratio'] = odds_ratio(mean)
            row['or_ci_low'] = odds_ratio(float(low))
            row['or_ci_high'] = odds_ratio(float(high))
            row['odds_change_pct'] = (row['odds_ratio'] - 1.0) * 100.0
        rows.append(row)

    return PosteriorSummary(pd.DataFrame(rows, columns=SUMMARY_COLUMNS))


def random_intercept_ladder(summary: PosteriorSummary, roster: Sequence[str]) -> pd.DataFrame:
    """
    State intercepts sorted by descending posterior mean.

    Returns:
        DataFrame with columns state, mean, ci_low, ci_high

    Raises:
        ValueError: The summary's alpha rows do not match ``roster``
    """
    intercepts = summary.random_intercepts()
    states = intercepts['name'].str.extract(_ALPHA, expand=False)
    if sorted(states) != sorted(roster) or len(states) != len(roster):
        raise ValueError(
            f"Summary has intercepts for {len(states)} states, roster has {len(roster)}"
        )
    ladder = pd.DataFrame({
        'state': states,
        'mean': intercepts['mean'],
        'ci_low': intercepts['ci_low'],
        'ci_high': intercepts['ci_high'],
    })
    order = {state: j for j, state in enumerate(roster)}
    ladder['_roster'] = ladder['state'].map(order)
    ladder = ladder.sort_values(['mean', '_roster'], ascending=[False, True], kind='mergesort')
    return ladder.drop(columns='_roster').reset_index(drop=True)


def baseline_probability(summary: PosteriorSummary) -> float:
    """Probability of vaccination at the intercept (all base categories, average state)."""
    return predict_probability(float(summary.row('beta_0')['mean']))
