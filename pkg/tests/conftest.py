"""
Shared fixtures.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from config.settings import REFERENCE_FIXED_EFFECTS, STATE_ROSTER  # noqa: E402
from data.county import CountyRateTable  # noqa: E402
from data.survey import SurveyRecord  # noqa: E402
from models.multilevel_logistic import ParameterVector  # noqa: E402
from models.simulation import SimulationLayout, simulate_dataset  # noqa: E402


SURVEY_TEXT = (
    "gender,race,education,income,state,vaccinated\n"
    "Male,White,High school graduate or less,\"Less than $35,000\",CA,1\n"
    "Female,Black,Bachelor's degree,\"$75,000 to $149,999\",TX,0\n"
    "female,asian,Graduate degree,\"$150,000 or above\",ny,yes\n"
    "Male,Other,Associate's degree,\"$35,000 to $74,999\",CA,no\n"
)


@pytest.fixture
def survey_text():
    return SURVEY_TEXT


@pytest.fixture
def record():
    return SurveyRecord(
        gender='Female', race='Black', education='Bachelor',
        income='From75kTo150k', state='TX', vaccinated=1,
    )


@pytest.fixture
def small_dataset():
    """300 simulated records over 5 states."""
    states = ('CA', 'MA', 'NY', 'TX', 'WY')
    layout = SimulationLayout({s: 60 for s in states})
    truth = ParameterVector(np.array(REFERENCE_FIXED_EFFECTS), np.linspace(-0.4, 0.4, 5), np.log(0.3))
    return simulate_dataset(truth, layout, seed=11)


@pytest.fixture
def county_table():
    """Three well-separated groups of states, four counties each."""
    rows = []
    groups = {
        ('AL', 'MS', 'WV'): 55.0,
        ('OH', 'TX', 'NV'): 68.0,
        ('MA', 'VT', 'CT'): 83.0,
    }
    for states, centre in groups.items():
        for offset, state in enumerate(states):
            for c, delta in enumerate((-2.0, -0.5, 0.5, 2.0)):
                rows.append((state, f"County {c}", centre + delta * (1.0 + 0.25 * offset) + 0.3 * offset))
    return CountyRateTable.from_rows(rows)


def write_county_file(path: Path, table: CountyRateTable) -> Path:
    lines = ["state,county,rate_percent"]
    for state, county, rate in table.entries[['state', 'county', 'rate']].itertuples(index=False):
        lines.append(f"{state},{county},{rate!r}")
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


@pytest.fixture
def roster_county_table():
    """Every roster state, in three rate bands, five counties each."""
    rows = []
    for index, state in enumerate(STATE_ROSTER):
        centre = (55.0, 68.0, 83.0)[index % 3]
        spread = 1.0 + 0.1 * (index % 5)
        for c, delta in enumerate((-2.0, -1.0, 0.0, 1.0, 2.0)):
            rows.append((state, f"County {c}", centre + spread * delta + 0.05 * index))
    return CountyRateTable.from_rows(rows)


@pytest.fixture
def roster_county_file(tmp_path, roster_county_table):
    return write_county_file(tmp_path / 'roster_county.csv', roster_county_table)
