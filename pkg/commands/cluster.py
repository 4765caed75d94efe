"""
cluster subcommand: group states by their county vaccination-rate distributions.
"""

import logging
from pathlib import Path

import pandas as pd

from clustering import (
    agglomerate,
    build_state_features,
    cut_tree,
    describe_states,
    gap_statistic,
    summarize_clusters,
)
from config.loader import RunConfig, require_paths
from config.settings import STATE_ROSTER
from data.county import parse_county_rates
from reporting.export import ReportGenerator, write_text

logger = logging.getLogger(__name__)


def cmd_cluster(config: RunConfig) -> int:
    """
    Write gap_curve.csv, cluster_assignments.csv, cluster_summary.txt,
    cluster_densities.csv and state_summary.csv.

    Raises:
        ConfigurationError: County path unset or missing
        InputDataError: Unusable county file or a roster state without counties
    """
    require_paths(config, 'county')
    table = parse_county_rates(config.county, config.coverage_date)
    features = build_state_features(table, roster=STATE_ROSTER)

    k_max = min(config.k_max, len(features) - 1)
    if k_max < config.k_max:
        logger.info(f"k_max lowered to {k_max} for {len(features)} states")
    gap = gap_statistic(
        features, k_max, config.reference_draws, config.seed, config.linkage, config.workers
    )
    dendrogram = agglomerate(features, config.linkage)
    labels = cut_tree(dendrogram, gap.chosen_k, order_by=features.means, weights=features.county_counts)
    assignments = pd.DataFrame({'state': list(features.states), 'cluster': labels})
    summary = summarize_clusters(dict(zip(features.states, labels)), table)

    out_dir = Path(config.out_dir)
    generator = ReportGenerator(config.seed, config.digest)
    write_text(out_dir / 'gap_curve.csv', generator.gap_curve_csv(gap))
    write_text(
        out_dir / 'cluster_assignments.csv',
        generator.export_to_csv(assignments, f"Cluster assignments ({config.linkage} linkage)"),
    )
    write_text(out_dir / 'cluster_summary.txt', generator.cluster_summary_text(summary, config.linkage))
    write_text(out_dir / 'cluster_densities.csv', generator.cluster_densities_csv(summary))
    write_text(
        out_dir / 'state_summary.csv',
        generator.export_to_csv(describe_states(table), 'County vaccination rates per state'),
    )

    for _, row in summary.table.iterrows():
        logger.info(
            f"Cluster {row['cluster']}: {row['n_states']} states, "
            f"mean {row['mean']:.3f}, sd {row['sd']:.3f}"
        )
    return 0
