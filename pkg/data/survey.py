"""
Survey microdata: parsing, validation and dummy coding.

One respondent is a SurveyRecord with four categorical covariates, a state
code and a binary vaccination response. The design matrix codes every
group against its base category (first level in CATEGORY_LEVELS).
"""

import io
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, IO, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import (
    CATEGORY_LEVELS,
    DEFAULT_SURVEY_COLUMNS,
    DESIGN_GROUP_ORDER,
    LEVEL_SPELLINGS,
    STATE_ROSTER,
)
from utils.errors import InputDataError

logger = logging.getLogger(__name__)

Source = Union[str, Path, IO[str]]

REQUIRED_FIELDS = ('gender', 'race', 'education', 'income', 'state', 'vaccinated')


@dataclass(frozen=True)
class SurveyRecord:
    """One respondent: categorical covariates, state code and vaccination response."""
    gender: str
    race: str
    education: str
    income: str
    state: str
    vaccinated: int

    def __post_init__(self):
        for group, levels in CATEGORY_LEVELS.items():
            value = getattr(self, group)
            if value not in levels:
                raise ValueError(
                    f"{group} must be one of {levels}. Got: {value!r}"
                )
        if self.vaccinated not in (0, 1):
            raise ValueError(f"vaccinated must be 0 or 1. Got: {self.vaccinated!r}")
        if not self.state:
            raise ValueError("state code must be non-empty")


@dataclass(frozen=True)
class SurveyDataset:
    """
    Validated respondents plus the state roster that defines j = 1..p_s.

    ``states`` holds the distinct state codes of the records, sorted
    lexicographically; position in this tuple is the state index.
    """
    records: Tuple[SurveyRecord, ...]
    states: Tuple[str, ...]
    dropped_count: int = 0
    drop_reasons: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.dropped_count < 0:
            raise ValueError(f"dropped_count must be non-negative. Got: {self.dropped_count}")
        if tuple(sorted(set(self.states))) != tuple(self.states):
            raise ValueError("State roster must be distinct and sorted")
        present = {r.state for r in self.records}
        missing = present - set(self.states)
        if missing:
            raise ValueError(f"Records reference states outside the roster: {sorted(missing)}")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @classmethod
    def from_records(
        cls,
        records: Sequence[SurveyRecord],
        dropped_count: int = 0,
        drop_reasons: Optional[Dict[str, int]] = None
    ) -> 'SurveyDataset':
        """Build a dataset whose roster is the sorted set of record states."""
        records = tuple(records)
        states = tuple(sorted({r.state for r in records}))
        return cls(records, states, dropped_count, dict(drop_reasons or {}))


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """
    Dummy-coded fixed effects X1..X10, state index j[i] and response Y_i.

    The intercept column is implicit; ``with_intercept()`` prepends it so
    the fixed-effect block has p_x = 11 columns. ``state_index`` is 0-based.
    """
    indicators: np.ndarray
    state_index: np.ndarray
    response: np.ndarray
    states: Tuple[str, ...]
    column_names: Tuple[str, ...]

    def __post_init__(self):
        n = self.indicators.shape[0]
        if self.indicators.shape != (n, len(self.column_names)):
            raise ValueError(
                f"Indicator block must be {n} x {len(self.column_names)}. "
                f"Got: {self.indicators.shape}"
            )
        if self.state_index.shape != (n,) or self.response.shape != (n,):
            raise ValueError("state_index and response must have one entry per row")
        if n and (self.state_index.min() < 0 or self.state_index.max() >= len(self.states)):
            raise ValueError("state_index out of roster range")
        for array in (self.indicators, self.state_index, self.response):
            array.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.indicators.shape[0]

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def p_x(self) -> int:
        return self.indicators.shape[1] + 1

    def with_intercept(self) -> np.ndarray:
        """Fixed-effect matrix including the leading column of ones."""
        return np.column_stack([np.ones(self.n_rows), self.indicators])

    @classmethod
    def empty(cls, states: Sequence[str]) -> 'DesignMatrix':
        """Zero-row design over a given roster (prior-only model)."""
        names = design_column_names()
        return cls(
            indicators=np.zeros((0, len(names))),
            state_index=np.zeros(0, dtype=np.int64),
            response=np.zeros(0, dtype=np.int64),
            states=tuple(states),
            column_names=names,
        )


def design_column_names() -> Tuple[str, ...]:
    """Names of X1..X10 in column order, e.g. ``education=Associate``."""
    return tuple(
        f"{group}={level}"
        for group in DESIGN_GROUP_ORDER
        for level in CATEGORY_LEVELS[group][1:]
    )


def _level_lookup(field_name: str, spellings: Mapping[str, Mapping[str, object]]) -> Dict[str, object]:
    lookup: Dict[str, object] = {}
    if field_name in CATEGORY_LEVELS:
        lookup.update({level.lower(): level for level in CATEGORY_LEVELS[field_name]})
    lookup.update({k.strip().lower(): v for k, v in spellings.get(field_name, {}).items()})
    return lookup


def read_delimited(source: Source, what: str) -> pd.DataFrame:
    """Read a header-first delimited file; tab if the header has a tab, else comma."""
    try:
        if hasattr(source, 'read'):
            text = source.read()
        else:
            text = Path(source).read_text(encoding='utf-8-sig')
    except (OSError, UnicodeDecodeError) as e:
        raise InputDataError(f"Cannot read {what}: {e}") from e
    # spreadsheet exports start with a byte-order mark
    text = text.lstrip('\ufeff')

    header = text.split('\n', 1)[0]
    sep = '\t' if '\t' in header else ','
    try:
        return pd.read_csv(
            io.StringIO(text),
            sep=sep,
            dtype=str,
            keep_default_na=False,
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InputDataError(f"Cannot read {what}: {e}") from e


def parse_survey(
    source: Source,
    schema: Optional[Mapping[str, str]] = None,
    spellings: Optional[Mapping[str, Mapping[str, object]]] = None,
    roster: Sequence[str] = STATE_ROSTER
) -> SurveyDataset:
    """
    Parse delimited survey microdata into a SurveyDataset.

    Rows with a missing value, an unmapped level spelling or a state
    outside ``roster`` are dropped and counted.

    Args:
        source: Path or text stream with a header row (comma or tab separated)
        schema: Logical field -> column name; defaults to DEFAULT_SURVEY_COLUMNS
        spellings: Raw spelling -> level per field; defaults to LEVEL_SPELLINGS
        roster: Allowed state codes

    Returns:
        SurveyDataset with a sorted roster of the states present

    Raises:
        InputDataError: Unreadable source, header missing a mapped column,
            or zero valid rows
    """
    schema = dict(DEFAULT_SURVEY_COLUMNS if schema is None else schema)
    spellings = LEVEL_SPELLINGS if spellings is None else spellings

    unmapped_fields = [f for f in REQUIRED_FIELDS if f not in schema]
    if unmapped_fields:
        raise InputDataError(f"Column mapping lacks field(s): {unmapped_fields}")

    frame = read_delimited(source, 'survey file')
    frame.columns = [str(c).strip() for c in frame.columns]
    missing_columns = [schema[f] for f in REQUIRED_FIELDS if schema[f] not in frame.columns]
    if missing_columns:
        raise InputDataError(f"Survey header is missing column(s): {missing_columns}")

    reasons: Counter = Counter()
    valid = pd.Series(True, index=frame.index)
    parsed: Dict[str, pd.Series] = {}

    for field_name in REQUIRED_FIELDS:
        raw = frame[schema[field_name]].astype(str).str.strip()
        blank = raw.eq('')
        if field_name == 'state':
            values = raw.str.upper()
            bad = ~values.isin(list(roster)) & ~blank
        else:
            values = raw.str.lower().map(_level_lookup(field_name, spellings))
            bad = values.isna() & ~blank
        # count each dropped row once, under its first failing field
        reasons[f"missing {field_name}"] += int((blank & valid).sum())
        valid &= ~blank
        label = 'state outside roster' if field_name == 'state' else f"unmapped {field_name}"
        reasons[label] += int((bad & valid).sum())
        valid &= ~bad
        parsed[field_name] = values

    dropped = int((~valid).sum())
    reasons = Counter({k: v for k, v in reasons.items() if v})
    if dropped:
        logger.info(f"Dropped {dropped} survey row(s): {dict(reasons)}")

    if not valid.any():
        raise InputDataError(
            f"Survey file has zero valid rows ({dropped} dropped: {dict(reasons)})"
        )

    kept = {name: series[valid].tolist() for name, series in parsed.items()}
    records = [
        SurveyRecord(
            gender=g, race=r, education=e, income=i, state=s, vaccinated=int(v)
        )
        for g, r, e, i, s, v in zip(
            kept['gender'], kept['race'], kept['education'],
            kept['income'], kept['state'], kept['vaccinated']
        )
    ]
    dataset = SurveyDataset.from_records(records, dropped, dict(reasons))
    logger.info(f"Parsed {len(dataset)} survey records over {dataset.n_states} states")
    return dataset


def encode_design(data: SurveyDataset) -> DesignMatrix:
    """
    Dummy-code a dataset against the base categories.

    Column order is X1..X3 education (Associate, Bachelor, Graduate),
    X4..X6 race (Black, Asian, Other), X7..X9 income (35-75k, 75-150k,
    150k+), X10 gender (Female). State index follows roster order.
    """
    if len(data) == 0:
        raise ValueError("Cannot encode an empty dataset")

    names = design_column_names()
    column_of = {name: k for k, name in enumerate(names)}
    state_of = {code: j for j, code in enumerate(data.states)}

    n = len(data)
    indicators = np.zeros((n, len(names)))
    state_index = np.empty(n, dtype=np.int64)
    response = np.empty(n, dtype=np.int64)

    for i, record in enumerate(data.records):
        for group in DESIGN_GROUP_ORDER:
            level = getattr(record, group)
            if level != CATEGORY_LEVELS[group][0]:
                indicators[i, column_of[f"{group}={level}"]] = 1.0
        state_index[i] = state_of[record.state]
        response[i] = record.vaccinated

    return DesignMatrix(indicators, state_index, response, tuple(data.states), names)


def decode_row(design: DesignMatrix, row_index: int) -> SurveyRecord:
    """Recover the SurveyRecord a design row was encoded from."""
    if not 0 <= row_index < design.n_rows:
        raise IndexError(f"Row index {row_index} outside 0..{design.n_rows - 1}")

    row = design.indicators[row_index]
    levels = {}
    for group in DESIGN_GROUP_ORDER:
        level = CATEGORY_LEVELS[group][0]
        for candidate in CATEGORY_LEVELS[group][1:]:
            if row[design.column_names.index(f"{group}={candidate}")] == 1.0:
                level = candidate
        levels[group] = level

    return SurveyRecord(
        state=design.states[design.state_index[row_index]],
        vaccinated=int(design.response[row_index]),
        **levels,
    )


def write_survey(
    dataset: SurveyDataset,
    destination: Source,
    schema: Optional[Mapping[str, str]] = None
) -> None:
    """Write records with canonical level names, readable back by parse_survey."""
    schema = dict(DEFAULT_SURVEY_COLUMNS if schema is None else schema)
    frame = pd.DataFrame(
        [[getattr(r, f) for f in REQUIRED_FIELDS] for r in dataset.records],
        columns=[schema[f] for f in REQUIRED_FIELDS],
    )
    frame.to_csv(destination, index=False, lineterminator='\n')


def response_balance(dataset: SurveyDataset) -> pd.DataFrame:
    """
    Vaccinated share per covariate level.

    A level whose share is exactly 0 or 1 separates the response and
    pushes its coefficient towards the prior.
    """
    frame = pd.DataFrame(
        [[getattr(r, g) for g in DESIGN_GROUP_ORDER] + [r.vaccinated] for r in dataset.records],
        columns=list(DESIGN_GROUP_ORDER) + ['vaccinated'],
    )
    rows = []
    for group in DESIGN_GROUP_ORDER:
        for level in CATEGORY_LEVELS[group]:
            subset = frame.loc[frame[group] == level, 'vaccinated']
            rows.append({
                'group': group,
                'level': level,
                'records': int(subset.size),
                'vaccinated_share': float(subset.mean()) if subset.size else float('nan'),
            })
    return pd.DataFrame(rows)
