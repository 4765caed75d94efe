"""
Agglomerative hierarchical clustering with Lance-Williams distance updates.

Merge records follow the ``scipy.cluster.hierarchy.linkage`` layout: leaves
are nodes 0..n-1, the m-th merge creates node n+m, and each row holds
(node_a, node_b, height, size). Ward heights use scipy's convention, so two
singletons merge at their Euclidean distance.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.spatial.distance import pdist, squareform

from config.settings import DEFAULT_CLUSTERING

LINKAGES = ('ward', 'complete', 'average')


@dataclass(frozen=True, eq=False)
class Dendrogram:
    """Binary merge tree: ``merges`` is (n-1) x 4 as (node_a, node_b, height, size)."""
    merges: np.ndarray
    n_leaves: int
    linkage: str

    def __post_init__(self):
        if self.merges.shape != (self.n_leaves - 1, 4):
            raise ValueError(
                f"Expected {self.n_leaves - 1} merges. Got shape: {self.merges.shape}"
            )

    @property
    def heights(self) -> np.ndarray:
        return self.merges[:, 2]

    @property
    def leaf_order(self) -> List[int]:
        """Left-to-right leaf order of the drawn tree."""
        n = self.n_leaves
        if n == 1:
            return [0]
        order = []
        stack = [2 * n - 2]
        while stack:
            node = stack.pop()
            if node < n:
                order.append(node)
            else:
                a, b = self.merges[node - n, :2].astype(int)
                stack.extend((b, a))
        return order


def _lance_williams(linkage, d_ki, d_kj, d_ij, n_i, n_j, n_k):
    if linkage == 'complete':
        return np.maximum(d_ki, d_kj)
    if linkage == 'average':
        return (n_i * d_ki + n_j * d_kj) / (n_i + n_j)
    total = n_i + n_j + n_k
    return np.sqrt(
        ((n_i + n_k) * d_ki ** 2 + (n_j + n_k) * d_kj ** 2 - n_k * d_ij ** 2) / total
    )


def agglomerate(features, linkage: str = DEFAULT_CLUSTERING['linkage']) -> Dendrogram:
    """
    Build the merge tree of ``features`` under Euclidean distance.

    At each step the closest pair of active clusters merges; ties go to
    the lowest (i, j) slot pair. The merged cluster takes the lower slot.

    Args:
        features: (items, dimensions) array, or a StateFeatures (its
            standardized matrix is used)
        linkage: 'ward', 'complete' or 'average'

    Raises:
        ValueError: Unknown linkage or fewer than 2 items
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}. Got: {linkage!r}")
    points = getattr(features, 'standardized', features)
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, np.newaxis]
    n = points.shape[0]
    if n < 2:
        raise ValueError(f"Agglomeration needs at least 2 items. Got: {n}")

    distance = squareform(pdist(points, metric='euclidean'))
    masked = np.triu(distance, k=1)
    masked[np.tril_indices(n)] = np.inf
    sizes = np.ones(n)
    node_ids = np.arange(n)
    active = np.ones(n, dtype=bool)
    merges = np.empty((n - 1, 4))

    for m in range(n - 1):
        flat = int(np.argmin(masked))
        i, j = divmod(flat, n)
        height = distance[i, j]
        a, b = sorted((node_ids[i], node_ids[j]))
        merges[m] = (a, b, height, sizes[i] + sizes[j])

        others = np.flatnonzero(active)
        others = others[(others != i) & (others != j)]
        updated = _lance_williams(
            linkage, distance[others, i], distance[others, j], height,
            sizes[i], sizes[j], sizes[others],
        )
        distance[others, i] = updated
        distance[i, others] = updated

        active[j] = False
        sizes[i] += sizes[j]
        node_ids[i] = n + m
        masked[j, :] = np.inf
        masked[:, j] = np.inf
        lower = others[others < i]
        upper = others[others > i]
        masked[lower, i] = updated[others < i]
        masked[i, upper] = updated[others > i]

    return Dendrogram(merges, n, linkage)


def cut_tree(
    dendrogram: Dendrogram,
    k: int,
    order_by: Optional[np.ndarray] = None,
    weights: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Undo the last k-1 merges and label the resulting clusters 1..k.

    Labels ascend with the (weighted) mean of ``order_by`` over each
    cluster's leaves, ties broken by the smallest member index. Without
    ``order_by`` clusters are numbered by their smallest member index.

    Returns:
        Integer label per leaf

    Raises:
        ValueError: k outside [1, n_leaves]
    """
    n = dendrogram.n_leaves
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}]. Got: {k}")

    parent = list(range(2 * n - 1))

    def find(node: int) -> int:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for m in range(n - k):
        a, b = dendrogram.merges[m, :2].astype(int)
        parent[find(a)] = n + m
        parent[find(b)] = n + m

    roots = np.array([find(leaf) for leaf in range(n)])
    groups = {}
    for leaf, root in enumerate(roots):
        groups.setdefault(root, []).append(leaf)

    if order_by is None:
        keys = {root: (0.0, members[0]) for root, members in groups.items()}
    else:
        order_by = np.asarray(order_by, dtype=float)
        weights = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
        keys = {
            root: (float(np.average(order_by[members], weights=weights[members])), members[0])
            for root, members in groups.items()
        }

    labels = np.empty(n, dtype=int)
    for label, root in enumerate(sorted(groups, key=keys.get), start=1):
        labels[groups[root]] = label
    return labels
