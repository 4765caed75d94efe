"""
run subcommand: cluster (when a county file is configured) then fit.
"""

import logging
from pathlib import Path

from commands.cluster import cmd_cluster
from commands.fit import cmd_fit
from config.loader import RunConfig, with_overrides
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


def cmd_run(config: RunConfig) -> int:
    """Run every stage the configuration has inputs for, under out_dir/cluster and out_dir/fit."""
    if config.county is None and config.survey is None:
        raise ConfigurationError("run needs a county file, a survey file or both")

    out_dir = Path(config.out_dir)
    if config.county is not None:
        cmd_cluster(with_overrides(config, out_dir=out_dir / 'cluster'))
    if config.survey is not None:
        cmd_fit(with_overrides(config, out_dir=out_dir / 'fit'))
    logger.info(f"Run complete, outputs under {out_dir}")
    return 0
