"""
Tests for state features, agglomeration, tree cutting and cluster summaries.
"""

from itertools import combinations

import numpy as np
import pytest
from scipy.cluster.hierarchy import linkage as scipy_linkage

from clustering import (
    agglomerate,
    build_state_features,
    cut_tree,
    describe_states,
    standardize_columns,
    summarize_clusters,
)
from clustering.hierarchical import LINKAGES
from data.county import CountyRateTable
from utils.errors import InputDataError


def brute_force_merges(points, linkage):
    """Exhaustive nearest-pair merging using the linkage definitions directly."""
    clusters = [[i] for i in range(len(points))]
    merges = []

    def distance(a, b):
        if linkage == 'ward':
            na, nb = len(a), len(b)
            gap = points[a].mean(axis=0) - points[b].mean(axis=0)
            return np.sqrt(2.0 * na * nb / (na + nb)) * np.linalg.norm(gap)
        pairwise = [np.linalg.norm(points[i] - points[j]) for i in a for j in b]
        return max(pairwise) if linkage == 'complete' else float(np.mean(pairwise))

    while len(clusters) > 1:
        best = min(
            combinations(range(len(clusters)), 2),
            key=lambda ij: distance(clusters[ij[0]], clusters[ij[1]]),
        )
        i, j = best
        height = distance(clusters[i], clusters[j])
        merged = clusters[i] + clusters[j]
        merges.append((frozenset(merged), height))
        clusters = [c for k, c in enumerate(clusters) if k not in (i, j)] + [merged]
    return merges


def merge_sets(dendrogram):
    n = dendrogram.n_leaves
    members = {i: frozenset([i]) for i in range(n)}
    out = []
    for m, (a, b, height, size) in enumerate(dendrogram.merges):
        members[n + m] = members[int(a)] | members[int(b)]
        assert len(members[n + m]) == size
        out.append((members[n + m], height))
    return out


@pytest.mark.parametrize("linkage", LINKAGES)
def test_agglomeration_matches_brute_force(linkage):
    rng = np.random.default_rng(17)
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        points = rng.normal(size=(n, int(rng.integers(1, 4))))
        ours = merge_sets(agglomerate(points, linkage))
        oracle = brute_force_merges(points, linkage)
        assert [s for s, _ in ours] == [s for s, _ in oracle]
        np.testing.assert_allclose([h for _, h in ours], [h for _, h in oracle], rtol=1e-9)


@pytest.mark.parametrize("linkage", LINKAGES)
def test_heights_agree_with_scipy(linkage):
    points = np.random.default_rng(3).normal(size=(30, 4))
    ours = agglomerate(points, linkage)
    reference = scipy_linkage(points, method=linkage, metric='euclidean')
    np.testing.assert_allclose(ours.heights, reference[:, 2], rtol=1e-9)
    np.testing.assert_array_equal(ours.merges[:, 3], reference[:, 3])


def test_two_items():
    points = np.array([[0.0, 0.0], [3.0, 4.0]])
    for linkage in LINKAGES:
        dendrogram = agglomerate(points, linkage)
        assert dendrogram.merges.tolist() == [[0.0, 1.0, 5.0, 2.0]]


def test_ward_heights_nondecreasing():
    points = np.random.default_rng(5).normal(size=(49, 11))
    heights = agglomerate(points, 'ward').heights
    assert np.all(np.diff(heights) >= -1e-12)
    assert heights.size == 48


def test_two_tight_pairs():
    points = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 0.1], [10.0, 0.1]])
    dendrogram = agglomerate(points, 'ward')
    first_two = {frozenset(map(int, row[:2])) for row in dendrogram.merges[:2]}
    assert first_two == {frozenset({0, 2}), frozenset({1, 3})}

    assert cut_tree(dendrogram, 2).tolist() == [1, 2, 1, 2]
    assert cut_tree(dendrogram, 2, order_by=np.array([9.0, 1.0, 9.0, 1.0])).tolist() == [2, 1, 2, 1]


def test_cut_tree_extremes():
    points = np.random.default_rng(6).normal(size=(7, 2))
    dendrogram = agglomerate(points, 'average')
    assert set(cut_tree(dendrogram, 1)) == {1}
    assert sorted(cut_tree(dendrogram, 7)) == list(range(1, 8))
    with pytest.raises(ValueError):
        cut_tree(dendrogram, 0)
    with pytest.raises(ValueError):
        cut_tree(dendrogram, 8)


def test_cut_tree_is_partition_with_weighted_order():
    points = np.random.default_rng(8).normal(size=(20, 3))
    values = np.random.default_rng(9).uniform(40, 90, size=20)
    weights = np.random.default_rng(10).integers(1, 30, size=20)
    labels = cut_tree(agglomerate(points), 4, order_by=values, weights=weights)

    assert labels.shape == (20,)
    assert set(labels) == {1, 2, 3, 4}
    means = [np.average(values[labels == k], weights=weights[labels == k]) for k in range(1, 5)]
    assert means == sorted(means)


def test_agglomerate_needs_two_items():
    with pytest.raises(ValueError):
        agglomerate(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        agglomerate(np.zeros((3, 3)), 'single')


def test_leaf_order_covers_leaves():
    dendrogram = agglomerate(np.random.default_rng(11).normal(size=(9, 2)))
    assert sorted(dendrogram.leaf_order) == list(range(9))


def test_single_county_features():
    table = CountyRateTable.from_rows([('CA', 'Kern', 60.0), ('TX', 'Harris', 70.0), ('TX', 'Travis', 80.0)])
    features = build_state_features(table)
    ca = features.raw[features.states.index('CA')]
    assert ca[0] == 60.0 and ca[1] == 0.0
    assert np.all(ca[2:] == 60.0)


def test_features_standardized(county_table):
    features = build_state_features(county_table)
    assert features.raw.shape == (9, 11)
    np.testing.assert_allclose(features.standardized.mean(axis=0), 0.0, atol=1e-10)
    np.testing.assert_allclose(features.standardized.std(axis=0, ddof=1), 1.0, atol=1e-10)
    assert np.all(np.diff(features.raw[:, 2:], axis=1) >= 0.0)
    assert features.county_counts.tolist() == [4] * 9


def test_features_deterministic(county_table):
    first = build_state_features(county_table)
    second = build_state_features(county_table)
    np.testing.assert_array_equal(first.standardized, second.standardized)


def test_features_missing_roster_state(county_table):
    with pytest.raises(InputDataError, match='WY'):
        build_state_features(county_table, roster=list(county_table.states) + ['WY'])


def test_standardize_zero_variance_column():
    matrix = np.array([[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]])
    result = standardize_columns(matrix)
    np.testing.assert_allclose(result[:, 1], 0.0)
    np.testing.assert_allclose(result[:, 0], [-1.0, 0.0, 1.0])


def test_summarize_two_counties():
    table = CountyRateTable.from_rows([('CA', 'A', 60.0), ('CA', 'B', 70.0), ('TX', 'C', 80.0)])
    summary = summarize_clusters({'CA': 1, 'TX': 2}, table)
    first = summary.table.iloc[0]
    assert first['mean'] == pytest.approx(65.0)
    assert first['sd'] == pytest.approx(7.0711, abs=1e-4)
    assert summary.members(1) == ('CA',)
    assert summary.densities[2].point_mass == 80.0


def test_summarize_single_cluster(county_table):
    summary = summarize_clusters({s: 1 for s in county_table.states}, county_table)
    assert summary.n_clusters == 1
    assert summary.table.iloc[0]['mean'] == pytest.approx(county_table.entries['rate'].mean())


def test_summarize_rejects_empty_cluster(county_table):
    assignments = {s: (1 if i < 3 else 3) for i, s in enumerate(county_table.states)}
    with pytest.raises(ValueError, match='empty cluster'):
        summarize_clusters(assignments, county_table)


def test_describe_states(county_table):
    summary = describe_states(county_table)
    assert summary['state'].tolist() == list(county_table.states)
    row = summary.iloc[0]
    assert row['min'] <= row['q1'] <= row['median'] <= row['q3'] <= row['max']
    assert row['county_count'] == 4
