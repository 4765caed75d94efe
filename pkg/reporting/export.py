"""
Export and reporting for fits and clusterings.

Every artifact is UTF-8 text. Machine files are CSV at full precision,
human tables use 6 significant digits, and all of them (except the
synthetic survey) open with ``#`` lines naming the tool, seed and config
digest. Nothing time-dependent is written, so reruns are byte-identical.
"""

import io
import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from calculations.density import DiagnosticSeries
from calculations.summary import PosteriorSummary
from clustering.gap import GapResult
from clustering.summary import ClusterSummary
from config.settings import APP_INFO
from utils.errors import InputDataError
from utils.helpers import format_significant

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _float_text(value: float) -> str:
    return format_significant(value, 6)


def safe_file_name(parameter: str) -> str:
    """alpha[CA] -> alpha_CA; keeps names usable as file names."""
    return re.sub(r'[^A-Za-z0-9_.-]+', '_', parameter).strip('_')


class ReportGenerator:
    """Render run results as text artifacts stamped with the run's seed and digest."""

    def __init__(self, seed: int, config_digest: str):
        self.seed = seed
        self.config_digest = config_digest

    def header(self, title: str) -> str:
        return (
            f"# {APP_INFO['title']} {APP_INFO['version']}\n"
            f"# {title}\n"
            f"# seed: {self.seed}\n"
            f"# config digest: {self.config_digest}\n"
        )

    def export_to_csv(self, df: pd.DataFrame, title: str) -> str:
        """
        Export DataFrame to CSV string behind the ``#`` header.

        Args:
            df: DataFrame to export
            title: Second header line

        Returns:
            CSV string
        """
        output = io.StringIO()
        output.write(self.header(title))
        df.to_csv(output, index=False, lineterminator='\n')
        return output.getvalue()

    def format_table(self, df: pd.DataFrame, title: str) -> str:
        """Aligned human-readable table, 6 significant digits."""
        body = df.to_string(index=False, float_format=_float_text)
        return self.header(title) + body + '\n'

    # -- fit artifacts ---------------------------------------------------

    def posterior_summary_frame(self, summary: PosteriorSummary) -> pd.DataFrame:
        return summary.table.rename(columns={'mean': 'estimate'})

    def posterior_summary_table(self, summary: PosteriorSummary) -> str:
        columns = ['name', 'label', 'estimate', 'ci_low', 'ci_high', 'odds_ratio', 'rhat', 'ess']
        frame = self.posterior_summary_frame(summary)[columns]
        return self.format_table(frame, 'Posterior summary (95% credible intervals)')

    def diagnostic_csv(self, series: DiagnosticSeries) -> str:
        """
        One parameter's plot-ready series: a trace section
        (chain, iteration, value) then a density section (x, density).
        """
        output = io.StringIO()
        output.write(self.header(f"Diagnostics for {series.name}"))
        output.write(f"# bandwidth: {series.bandwidth!r}\n")
        if series.is_point_mass:
            output.write(f"# point mass: {series.point_mass!r}\n")

        output.write("# section: trace\n")
        n_chains = series.traces.shape[0]
        trace = pd.DataFrame({
            'chain': np.repeat(np.arange(n_chains), series.trace_iterations.size),
            'iteration': np.tile(series.trace_iterations, n_chains),
            'value': series.traces.ravel(),
        })
        trace.to_csv(output, index=False, lineterminator='\n')

        output.write("# section: density\n")
        pd.DataFrame({'x': series.grid, 'density': series.density}).to_csv(
            output, index=False, lineterminator='\n'
        )
        return output.getvalue()

    def draws_frame(self, draws: np.ndarray, names: Sequence[str]) -> pd.DataFrame:
        n_chains, n_draws, _ = draws.shape
        frame = pd.DataFrame(draws.reshape(-1, draws.shape[2]), columns=list(names))
        frame.insert(0, 'iteration', np.tile(np.arange(n_draws), n_chains))
        frame.insert(0, 'chain', np.repeat(np.arange(n_chains), n_draws))
        return frame

    def manifest(self, values: Dict[str, Any]) -> str:
        record = {'tool': APP_INFO['title'], 'version': APP_INFO['version'],
                  'seed': self.seed, 'config_digest': self.config_digest}
        record.update(values)
        return json.dumps(record, indent=2, sort_keys=True, default=_json_default) + '\n'

    # -- clustering artifacts ---------------------------------------------

    def gap_curve_csv(self, gap: GapResult) -> str:
        return self.export_to_csv(gap.to_frame(), f"Gap statistic, chosen k = {gap.chosen_k}")

    def cluster_summary_text(self, summary: ClusterSummary, linkage: str) -> str:
        return self.format_table(
            summary.table, f"Cluster summary ({linkage} linkage, labels by ascending mean rate)"
        )

    def cluster_densities_csv(self, summary: ClusterSummary) -> str:
        frames = []
        for label, density in sorted(summary.densities.items()):
            if density.point_mass is not None:
                grid, values = np.array([density.point_mass]), np.array([np.inf])
            else:
                grid, values = density.grid, density.density
            frames.append(pd.DataFrame({'cluster': label, 'x': grid, 'density': values}))
        return self.export_to_csv(pd.concat(frames, ignore_index=True), 'Cluster rate densities')


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Cannot serialise {type(value).__name__}")


def write_text(path: PathLike, content: str) -> Path:
    """Write UTF-8 text with '\\n' line endings, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as handle:
        handle.write(content)
    logger.debug(f"Wrote {path}")
    return path


def read_draws(path: PathLike) -> Tuple[np.ndarray, List[str], Optional[int]]:
    """
    Load a draws file written by the fit command.

    Returns:
        tuple: (draws of shape (chains, draws, dimension), parameter names,
        seed recorded in the header or None)

    Raises:
        InputDataError: Unreadable file or ragged chains
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise InputDataError(f"Cannot read draws file {path}: {exc}") from exc

    seed = None
    match = re.search(r'^# seed: (-?\d+)$', text, flags=re.MULTILINE)
    if match:
        seed = int(match.group(1))

    try:
        frame = pd.read_csv(io.StringIO(text), comment='#')
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise InputDataError(f"Cannot parse draws file {path}: {exc}") from exc
    if list(frame.columns[:2]) != ['chain', 'iteration'] or frame.shape[1] < 3:
        raise InputDataError(f"Draws file {path} must start with chain, iteration columns")

    names = [str(c) for c in frame.columns[2:]]
    frame = frame.sort_values(['chain', 'iteration'], kind='mergesort')
    counts = frame.groupby('chain').size()
    if counts.nunique() != 1:
        raise InputDataError(f"Draws file {path} has chains of unequal length")
    draws = frame[names].to_numpy(dtype=float).reshape(counts.size, int(counts.iloc[0]), len(names))
    return draws, names, seed
