"""
State-level feature vectors built from county vaccination rates.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from data.county import CountyRateTable
from utils.errors import InputDataError

logger = logging.getLogger(__name__)

DECILES = tuple(range(10, 100, 10))
FEATURE_NAMES = ('mean', 'sd') + tuple(f"p{q}" for q in DECILES)


@dataclass(frozen=True, eq=False)
class StateFeatures:
    """
    One row per state: county-rate mean, sample sd and the 10%..90% deciles.

    ``raw`` keeps the summaries on the percent scale; ``standardized`` is
    what the clustering sees.
    """
    states: Tuple[str, ...]
    raw: np.ndarray
    standardized: np.ndarray
    county_counts: np.ndarray

    def __post_init__(self):
        n = len(self.states)
        for name in ('raw', 'standardized'):
            shape = getattr(self, name).shape
            if shape != (n, len(FEATURE_NAMES)):
                raise ValueError(f"{name} must be {n} x {len(FEATURE_NAMES)}. Got: {shape}")
        if np.any(self.county_counts < 1):
            raise ValueError("Every state needs at least one county")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def means(self) -> np.ndarray:
        return self.raw[:, 0]

    def to_frame(self, standardized: bool = False) -> pd.DataFrame:
        values = self.standardized if standardized else self.raw
        frame = pd.DataFrame(values, columns=list(FEATURE_NAMES))
        frame.insert(0, 'county_count', self.county_counts)
        frame.insert(0, 'state', list(self.states))
        return frame


def standardize_columns(matrix: np.ndarray) -> np.ndarray:
    """
    Column z-scores using the sample standard deviation.

    Zero-variance columns are centred and left unscaled.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ValueError(f"Expected a 2-D matrix. Got shape: {matrix.shape}")
    centred = matrix - matrix.mean(axis=0)
    if matrix.shape[0] < 2:
        return centred
    scale = matrix.std(axis=0, ddof=1)
    scale[scale == 0.0] = 1.0
    return centred / scale


def _summaries(rates: np.ndarray) -> np.ndarray:
    sd = float(rates.std(ddof=1)) if rates.size > 1 else 0.0
    deciles = np.percentile(rates, DECILES)
    return np.concatenate(([rates.mean(), sd], deciles))


def build_state_features(
    table: CountyRateTable,
    roster: Optional[Sequence[str]] = None
) -> StateFeatures:
    """
    Summarise every state's county rates and standardize the columns.

    Args:
        table: County vaccination rates
        roster: States that must all be present (defaults to the states
            found in ``table``)

    Returns:
        StateFeatures ordered by state code

    Raises:
        InputDataError: A roster state has no county entries
    """
    states = tuple(sorted(roster)) if roster is not None else table.states
    present = set(table.states)
    missing = [state for state in states if state not in present]
    if missing:
        raise InputDataError(f"State(s) with zero counties: {', '.join(missing)}")
    if not states:
        raise InputDataError("County table has no states")

    raw = np.empty((len(states), len(FEATURE_NAMES)))
    counts = np.empty(len(states), dtype=int)
    for i, state in enumerate(states):
        rates = table.rates_for(state)
        raw[i] = _summaries(rates)
        counts[i] = rates.size

    logger.debug(f"Built {len(FEATURE_NAMES)} features for {len(states)} states")
    return StateFeatures(states, raw, standardize_columns(raw), counts)


def describe_states(table: CountyRateTable) -> pd.DataFrame:
    """Per-state box summary of county rates (the data behind a per-state boxplot)."""
    grouped = table.entries.groupby('state', sort=True)['rate']
    summary = pd.DataFrame({
        'county_count': grouped.size(),
        'min': grouped.min(),
        'q1': grouped.quantile(0.25),
        'median': grouped.median(),
        'q3': grouped.quantile(0.75),
        'max': grouped.max(),
        'mean': grouped.mean(),
        'sd': grouped.std(ddof=1).fillna(0.0),
    })
    return summary.reset_index()
