"""
Cluster-level summaries of county vaccination rates.
"""

from dataclasses import dataclass
from typing import Dict, Mapping, Optional

import numpy as np
import pandas as pd

from calculations.density import kernel_density
from data.county import CountyRateTable
from utils.errors import DegenerateChainError


@dataclass(frozen=True, eq=False)
class ClusterDensity:
    """Kernel density of a cluster's county rates; a point mass when they are all equal."""
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    point_mass: Optional[float] = None


@dataclass(frozen=True, eq=False)
class ClusterSummary:
    """
    ``table`` has one row per cluster label: states, n_states, n_counties,
    mean and sd of the pooled county rates.
    """
    table: pd.DataFrame
    densities: Dict[int, ClusterDensity]

    @property
    def n_clusters(self) -> int:
        return len(self.table)

    def members(self, label: int):
        row = self.table[self.table['cluster'] == label]
        if row.empty:
            raise KeyError(f"No cluster {label}")
        return tuple(row.iloc[0]['states'].split(' '))


def _density(rates: np.ndarray) -> ClusterDensity:
    try:
        grid, density, bandwidth = kernel_density(rates)
    except DegenerateChainError:
        return ClusterDensity(np.empty(0), np.empty(0), 0.0, point_mass=float(rates[0]))
    return ClusterDensity(grid, density, bandwidth)


def summarize_clusters(assignments: Mapping[str, int], table: CountyRateTable) -> ClusterSummary:
    """
    Pool the county rates of every cluster.

    Args:
        assignments: State code -> cluster label (1..k)
        table: County rates

    Raises:
        ValueError: Assignments miss a state of ``table``, or a label in
            1..k has no members
    """
    assignments = pd.Series(dict(assignments), dtype=int)
    missing = sorted(set(table.states) - set(assignments.index))
    if missing:
        raise ValueError(f"Assignments do not cover state(s): {', '.join(missing)}")
    if assignments.empty:
        raise ValueError("No cluster assignments")

    k = int(assignments.max())
    rows = []
    densities = {}
    for label in range(1, k + 1):
        states = sorted(assignments.index[assignments == label])
        if not states:
            raise ValueError(f"empty cluster: label {label} has no states")
        rates = table.entries.loc[table.entries['state'].isin(states), 'rate'].to_numpy(dtype=float)
        if rates.size == 0:
            raise ValueError(f"empty cluster: label {label} has no counties")
        rows.append({
            'cluster': label,
            'states': ' '.join(states),
            'n_states': len(states),
            'n_counties': rates.size,
            'mean': float(rates.mean()),
            'sd': float(rates.std(ddof=1)) if rates.size > 1 else 0.0,
        })
        densities[label] = _density(rates)

    return ClusterSummary(pd.DataFrame(rows), densities)
