"""
Gap statistic for choosing the number of clusters.

Reference data sets are drawn uniformly over the bounding box of the
features; each one is clustered with the same linkage and its within-cluster
dispersion compared with the observed one.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from clustering.hierarchical import agglomerate, cut_tree
from config.settings import DEFAULT_CLUSTERING
from utils.errors import InputDataError
from utils.seeding import derive_rng

logger = logging.getLogger(__name__)

MIN_REFERENCE_DRAWS = 10


@dataclass(frozen=True, eq=False)
class GapResult:
    """Gap curve over k = 1..k_max and the k picked by the one-standard-error rule."""
    k_values: np.ndarray
    log_dispersion: np.ndarray
    reference_log_dispersion: np.ndarray
    gap: np.ndarray
    standard_error: np.ndarray
    chosen_k: int

    @property
    def k_max(self) -> int:
        return int(self.k_values[-1])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'k': self.k_values,
            'gap': self.gap,
            'se': self.standard_error,
            'log_w': self.log_dispersion,
            'reference_log_w': self.reference_log_dispersion,
        })


def within_dispersion(points: np.ndarray, labels: np.ndarray) -> float:
    """
    Pooled within-cluster sum of squares about the cluster centroids.

    Equal to the sum over clusters of (sum of pairwise squared distances)
    divided by twice the cluster size.
    """
    total = 0.0
    for label in np.unique(labels):
        members = points[labels == label]
        total += float(np.sum((members - members.mean(axis=0)) ** 2))
    return total


def log_dispersion_curve(points: np.ndarray, k_max: int, linkage: str) -> np.ndarray:
    """log W_k for k = 1..k_max from a single dendrogram."""
    dendrogram = agglomerate(points, linkage)
    dispersion = np.array([
        within_dispersion(points, cut_tree(dendrogram, k)) for k in range(1, k_max + 1)
    ])
    return np.log(np.maximum(dispersion, np.finfo(float).tiny))


def _reference_curve(lower, upper, shape, k_max, linkage, seed, draw) -> np.ndarray:
    rng = derive_rng(seed, 'gap', draw)
    reference = rng.uniform(lower, upper, size=shape)
    return log_dispersion_curve(reference, k_max, linkage)


def select_k(gap: np.ndarray, standard_error: np.ndarray) -> int:
    """Smallest k with Gap(k) >= Gap(k+1) - s_(k+1); k_max when none qualifies."""
    for index in range(len(gap) - 1):
        if gap[index] >= gap[index + 1] - standard_error[index + 1]:
            return index + 1
    return len(gap)


def gap_statistic(
    points,
    k_max: int = DEFAULT_CLUSTERING['k_max'],
    reference_draws: int = DEFAULT_CLUSTERING['reference_draws'],
    seed: int = 0,
    linkage: str = DEFAULT_CLUSTERING['linkage'],
    workers: int = 1
) -> GapResult:
    """
    Compute the gap curve and choose k.

    Args:
        points: (items, dimensions) array or StateFeatures (standardized matrix)
        k_max: Largest k considered, below the item count
        reference_draws: Number of uniform reference sets (B >= 10)
        seed: Top-level seed; reference b uses the substream ('gap', b)
        linkage: Agglomeration linkage
        workers: Reference sets clustered concurrently (results do not
            depend on it)

    Returns:
        GapResult

    Raises:
        InputDataError: All points identical
        ValueError: k_max or reference_draws out of range
    """
    points = np.asarray(getattr(points, 'standardized', points), dtype=float)
    if points.ndim == 1:
        points = points[:, np.newaxis]
    n = points.shape[0]
    if not 1 <= k_max < n:
        raise ValueError(f"k_max must be in [1, {n - 1}] for {n} items. Got: {k_max}")
    if reference_draws < MIN_REFERENCE_DRAWS:
        raise ValueError(
            f"reference_draws must be at least {MIN_REFERENCE_DRAWS}. Got: {reference_draws}"
        )
    lower, upper = points.min(axis=0), points.max(axis=0)
    if np.all(upper == lower):
        raise InputDataError("degenerate features: all points are identical")

    observed = log_dispersion_curve(points, k_max, linkage)
    references = np.array(Parallel(n_jobs=workers)(
        delayed(_reference_curve)(lower, upper, points.shape, k_max, linkage, seed, b)
        for b in range(reference_draws)
    ))

    reference_mean = references.mean(axis=0)
    standard_error = references.std(axis=0) * np.sqrt(1.0 + 1.0 / reference_draws)
    gap = reference_mean - observed
    chosen = select_k(gap, standard_error)
    logger.info(f"Gap statistic chose k = {chosen} (k_max = {k_max}, B = {reference_draws})")

    return GapResult(
        k_values=np.arange(1, k_max + 1),
        log_dispersion=observed,
        reference_log_dispersion=reference_mean,
        gap=gap,
        standard_error=standard_error,
        chosen_k=chosen,
    )
