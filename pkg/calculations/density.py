"""
Plot-ready diagnostic series: thinned traces and kernel density curves.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import gaussian_kde

from config.settings import DIAGNOSTIC_CONFIG
from utils.errors import DegenerateChainError


@dataclass(frozen=True, eq=False)
class DiagnosticSeries:
    """
    Trace and density data for one parameter.

    ``traces`` has one row per chain over ``trace_iterations`` (post-warmup
    draw numbers). For a zero-variance parameter ``point_mass`` holds the
    constant value and ``grid``/``density`` are empty.
    """
    name: str
    trace_iterations: np.ndarray
    traces: np.ndarray
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    point_mass: Optional[float] = None

    @property
    def is_point_mass(self) -> bool:
        return self.point_mass is not None


def kernel_density(
    values: np.ndarray,
    grid_points: int = DIAGNOSTIC_CONFIG['density_grid_points'],
    padding: float = DIAGNOSTIC_CONFIG['grid_padding_bandwidths']
) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Gaussian kernel density with Silverman's bandwidth.

    The grid spans the data range widened by ``padding`` bandwidths on
    each side.

    Returns:
        tuple: (grid, density, bandwidth)

    Raises:
        DegenerateChainError: Fewer than two distinct values
    """
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 2 or np.ptp(values) == 0.0:
        raise DegenerateChainError("degenerate sample: density needs at least two distinct values")
    kde = gaussian_kde(values, bw_method='silverman')
    bandwidth = float(np.sqrt(kde.covariance[0, 0]))
    grid = np.linspace(values.min() - padding * bandwidth, values.max() + padding * bandwidth, grid_points)
    return grid, kde(grid), bandwidth


def thin_indices(n_draws: int, max_points: int = DIAGNOSTIC_CONFIG['max_trace_points']) -> np.ndarray:
    """Evenly spaced draw indices, at most ``max_points`` of them."""
    step = max(1, int(np.ceil(n_draws / max_points)))
    return np.arange(0, n_draws, step)


def diagnostic_series(name: str, chain_draws: np.ndarray) -> DiagnosticSeries:
    """Series for one parameter from its (chains, draws) array."""
    chain_draws = np.atleast_2d(np.asarray(chain_draws, dtype=float))
    iterations = thin_indices(chain_draws.shape[1])
    traces = chain_draws[:, iterations]
    try:
        grid, density, bandwidth = kernel_density(chain_draws)
    except DegenerateChainError:
        return DiagnosticSeries(
            name, iterations, traces, np.empty(0), np.empty(0), 0.0,
            point_mass=float(chain_draws.flat[0]),
        )
    return DiagnosticSeries(name, iterations, traces, grid, density, bandwidth)


def emit_diagnostics(chains, names: Sequence[str]) -> Dict[str, DiagnosticSeries]:
    """
    Trace and density series for every parameter of a ChainSet.

    Raises:
        ValueError: Label count differs from the chain dimension
    """
    if chains.n_chains == 0 or chains.n_draws == 0:
        raise ValueError("Chain set is empty")
    if len(names) != chains.dimension:
        raise ValueError(
            f"Got {len(names)} parameter labels for {chains.dimension} dimensions"
        )
    return {name: diagnostic_series(name, chains.parameter(k)) for k, name in enumerate(names)}
