"""
County-level vaccination-rate table.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from config.settings import COUNTY_COLUMNS, STATE_ROSTER
from data.survey import Source, read_delimited
from utils.errors import InputDataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CountyRateTable:
    """
    Adult series-complete vaccination rate (percent) per (state, county).

    ``entries`` has columns state, county, rate, sorted by state then county.
    """
    entries: pd.DataFrame
    coverage_date: Optional[str] = None
    dropped_count: int = 0

    def __post_init__(self):
        rates = self.entries['rate'].to_numpy(dtype=float)
        if rates.size and (np.any(rates < 0) or np.any(rates > 100) or not np.all(np.isfinite(rates))):
            raise ValueError("County rates must lie in [0, 100]")
        if self.entries.duplicated(['state', 'county']).any():
            raise ValueError("(state, county) pairs must be unique")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def states(self) -> tuple:
        """Sorted distinct state codes."""
        return tuple(sorted(self.entries['state'].unique()))

    def rates_for(self, state: str) -> np.ndarray:
        """County rates of one state."""
        return self.entries.loc[self.entries['state'] == state, 'rate'].to_numpy(dtype=float)

    @classmethod
    def from_rows(cls, rows, coverage_date: Optional[str] = None) -> 'CountyRateTable':
        """Build a table from (state, county, rate) tuples."""
        frame = pd.DataFrame(list(rows), columns=['state', 'county', 'rate'])
        frame['rate'] = frame['rate'].astype(float)
        frame = frame.sort_values(['state', 'county'], kind='mergesort').reset_index(drop=True)
        return cls(frame, coverage_date)


def parse_county_rates(
    source: Source,
    coverage_date: Optional[str] = None,
    roster: Sequence[str] = STATE_ROSTER
) -> CountyRateTable:
    """
    Parse a county vaccination-rate file with columns state, county, rate_percent.

    Rows with a missing or non-numeric rate, a rate outside [0, 100], or a
    state outside ``roster`` (Alaska, Hawaii, territories) are dropped and
    counted.

    Raises:
        InputDataError: Unreadable source, missing columns, or a
            duplicated (state, county) pair
    """
    frame = read_delimited(source, 'county file')
    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in COUNTY_COLUMNS if c not in frame.columns]
    if missing:
        raise InputDataError(f"County header is missing column(s): {missing}")

    state_col, county_col, rate_col = COUNTY_COLUMNS
    states = frame[state_col].astype(str).str.strip().str.upper()
    counties = frame[county_col].astype(str).str.strip()
    rates = pd.to_numeric(frame[rate_col].astype(str).str.strip(), errors='coerce')

    valid = rates.between(0.0, 100.0) & states.ne('') & counties.ne('')
    bad_rate = int((~valid).sum())
    outside = valid & ~states.isin(list(roster))
    valid &= ~outside
    dropped = int((~valid).sum())
    if bad_rate:
        logger.info(f"Dropped {bad_rate} county row(s) with a missing or out-of-range rate")
    if outside.any():
        codes = sorted(states[outside].unique())
        logger.info(f"Dropped {int(outside.sum())} county row(s) outside the roster: {', '.join(codes)}")

    table = pd.DataFrame({
        'state': states[valid],
        'county': counties[valid],
        'rate': rates[valid].astype(float),
    })
    duplicated = table.duplicated(['state', 'county'], keep='first')
    if duplicated.any():
        state, county = table.loc[duplicated, ['state', 'county']].iloc[0]
        raise InputDataError(f"Duplicate county entry: ({state}, {county})")

    table = table.sort_values(['state', 'county'], kind='mergesort').reset_index(drop=True)
    logger.info(f"Parsed {len(table)} county rates over {table['state'].nunique()} states")
    return CountyRateTable(table, coverage_date, dropped)
