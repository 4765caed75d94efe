"""
diagnose subcommand: rebuild posterior reports from a saved draws file.

``write_posterior_reports`` is shared with the fit subcommand.
"""

import logging
import re
from pathlib import Path
from typing import Sequence

from calculations.density import emit_diagnostics
from calculations.summary import PosteriorSummary, random_intercept_ladder, summarize_posterior
from config.loader import RunConfig, require_paths
from config.settings import DIAGNOSTIC_CONFIG
from reporting.export import ReportGenerator, read_draws, safe_file_name, write_text
from samplers.hmc import ChainSet
from utils.errors import InputDataError

logger = logging.getLogger(__name__)

_ALPHA = re.compile(r'^alpha\[(.+)\]$')


def write_posterior_reports(
    chains: ChainSet,
    names: Sequence[str],
    out_dir: Path,
    generator: ReportGenerator
) -> PosteriorSummary:
    """
    Write posterior_summary.csv/.txt, random_intercepts.csv and one
    diagnostics/<param>.csv per parameter.
    """
    summary = summarize_posterior(chains, names)
    states = [m.group(1) for m in map(_ALPHA.match, names) if m]

    write_text(
        out_dir / 'posterior_summary.csv',
        generator.export_to_csv(generator.posterior_summary_frame(summary), 'Posterior summary'),
    )
    write_text(out_dir / 'posterior_summary.txt', generator.posterior_summary_table(summary))
    if states:
        ladder = random_intercept_ladder(summary, states)
        write_text(
            out_dir / 'random_intercepts.csv',
            generator.export_to_csv(ladder, 'State random intercepts, descending posterior mean'),
        )

    for name, series in emit_diagnostics(chains, names).items():
        write_text(
            out_dir / 'diagnostics' / f"{safe_file_name(name)}.csv",
            generator.diagnostic_csv(series),
        )

    flagged = summary.table[summary.table['rhat'] > DIAGNOSTIC_CONFIG['rhat_warning']]
    if not flagged.empty:
        logger.warning(
            f"{len(flagged)} parameter(s) with split R-hat above "
            f"{DIAGNOSTIC_CONFIG['rhat_warning']}: {', '.join(flagged['name'])}"
        )
    return summary


def cmd_diagnose(config: RunConfig) -> int:
    """Recompute summary, ladder and diagnostic series from ``config.draws``."""
    require_paths(config, 'draws')
    draws, names, seed = read_draws(config.draws)
    if seed is not None and seed != config.seed:
        logger.info(f"Draws were produced with seed {seed}; reports carry that seed")
    try:
        chains = ChainSet.from_draws(draws)
    except ValueError as exc:
        raise InputDataError(f"Draws file {config.draws}: {exc}") from exc

    generator = ReportGenerator(seed if seed is not None else config.seed, config.digest)
    summary = write_posterior_reports(chains, names, Path(config.out_dir), generator)
    logger.info(
        f"Diagnosed {chains.n_chains} chain(s) x {chains.n_draws} draws, "
        f"max split R-hat {summary.max_rhat:.4f}"
    )
    return 0
