"""
State clustering package.
"""

from .features import StateFeatures, build_state_features, describe_states, standardize_columns
from .gap import GapResult, gap_statistic
from .hierarchical import Dendrogram, agglomerate, cut_tree
from .summary import ClusterSummary, summarize_clusters

__all__ = [
    'StateFeatures', 'build_state_features', 'describe_states', 'standardize_columns',
    'Dendrogram', 'agglomerate', 'cut_tree',
    'GapResult', 'gap_statistic',
    'ClusterSummary', 'summarize_clusters',
]
