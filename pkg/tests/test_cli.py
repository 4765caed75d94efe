"""
End-to-end tests of the command-line entry point.
"""

import json
import logging
import re

import numpy as np
import pandas as pd
import pytest

import app
from commands.simulate import read_truth_file
from config.settings import STATE_ROSTER
from data.county import CountyRateTable
from data.survey import parse_survey
from tests.conftest import write_county_file

TRUTH = (
    "beta = -0.74, 0.45, 1.24, 1.79, 0.39, 0.91, -0.3, 0.25, 0.43, 0.77, 0.04\n"
    "sigma_alpha = 0.3\n"
    "states = CA MA NY TX WY\n"
)


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)


@pytest.fixture
def run_file(tmp_path):
    path = tmp_path / 'run.cfg'
    path.write_text("reference_draws = 10\nworkers = 1\n", encoding='utf-8')
    return path


@pytest.fixture
def truth_file(tmp_path):
    path = tmp_path / 'truth.txt'
    path.write_text(TRUTH, encoding='utf-8')
    return path


def read_artifact(path):
    return pd.read_csv(path, comment='#')


def simulate(tmp_path, truth_file, n_records=300):
    out = tmp_path / 'sim'
    status = app.main([
        'simulate', '--truth', str(truth_file), '--n-records', str(n_records),
        '--seed', '4', '--out-dir', str(out), '--quiet',
    ])
    assert status == 0
    return out


def test_cluster_outputs_and_rerun_identical(tmp_path, roster_county_file, run_file):
    outputs = []
    for name, workers in (('first', '1'), ('second', '2')):
        out = tmp_path / name
        status = app.main([
            'cluster', '--config', str(run_file), '--county', str(roster_county_file),
            '--seed', '5', '--workers', workers, '--out-dir', str(out), '--quiet',
        ])
        assert status == 0
        outputs.append(out)

    for artifact in ('gap_curve.csv', 'cluster_assignments.csv', 'cluster_summary.txt',
                     'cluster_densities.csv', 'state_summary.csv'):
        first = (outputs[0] / artifact).read_bytes()
        assert first == (outputs[1] / artifact).read_bytes()
        assert b'# seed: 5' in first

    assignments = read_artifact(outputs[0] / 'cluster_assignments.csv')
    header = (outputs[0] / 'gap_curve.csv').read_text(encoding='utf-8')
    chosen = int(re.search(r'chosen k = (\d+)', header).group(1))
    assert len(assignments) == len(STATE_ROSTER)
    assert sorted(set(assignments['cluster'])) == list(range(1, chosen + 1))

    gap = read_artifact(outputs[0] / 'gap_curve.csv')
    assert gap['k'].tolist() == list(range(1, 11))


def test_missing_county_file(tmp_path, capsys):
    missing = tmp_path / 'absent.csv'
    status = app.main(['cluster', '--county', str(missing), '--out-dir', str(tmp_path / 'out')])
    assert status == 2
    assert str(missing) in capsys.readouterr().err
    assert not (tmp_path / 'out' / 'gap_curve.csv').exists()


def test_cluster_ignores_states_outside_roster(tmp_path, roster_county_file, run_file):
    extra = "AK,Juneau,60.1\nHI,Honolulu,81.2\nPR,San Juan,88.0\nAK,Nome,45.5\n"
    with open(roster_county_file, 'a', encoding='utf-8') as handle:
        handle.write(extra)
    out = tmp_path / 'out'
    status = app.main([
        'cluster', '--config', str(run_file), '--county', str(roster_county_file),
        '--out-dir', str(out), '--quiet',
    ])
    assert status == 0
    assignments = read_artifact(out / 'cluster_assignments.csv')
    assert assignments['state'].tolist() == sorted(STATE_ROSTER)
    states = read_artifact(out / 'state_summary.csv')
    assert not set(states['state']) & {'AK', 'HI', 'PR'}


def test_cluster_requires_every_roster_state(tmp_path, roster_county_table, run_file, capsys):
    entries = roster_county_table.entries
    partial = write_county_file(
        tmp_path / 'partial.csv',
        CountyRateTable(entries[entries['state'] != 'WY'].reset_index(drop=True)),
    )
    status = app.main([
        'cluster', '--config', str(run_file), '--county', str(partial),
        '--out-dir', str(tmp_path / 'out'),
    ])
    assert status == 2
    assert 'WY' in capsys.readouterr().err


def test_unknown_run_file_key(tmp_path, roster_county_file):
    bad = tmp_path / 'bad.cfg'
    bad.write_text("refrence_draws = 10\n", encoding='utf-8')
    status = app.main(['cluster', '--config', str(bad), '--county', str(roster_county_file), '--quiet'])
    assert status == 2


def test_simulate_round_trip(tmp_path, truth_file):
    out = simulate(tmp_path, truth_file)
    dataset = parse_survey(out / 'synthetic_survey.csv')
    assert len(dataset) == 300
    assert dataset.dropped_count == 0
    assert dataset.states == ('CA', 'MA', 'NY', 'TX', 'WY')

    truth = read_truth_file(out / 'synthetic_truth.txt')
    assert truth.beta[0] == pytest.approx(-0.74)
    assert truth.sigma_alpha == pytest.approx(0.3)
    assert len(truth.alpha) == 5


def test_simulate_is_reproducible(tmp_path, truth_file):
    first = simulate(tmp_path / 'a', truth_file)
    second = simulate(tmp_path / 'b', truth_file)
    assert (first / 'synthetic_survey.csv').read_bytes() == (second / 'synthetic_survey.csv').read_bytes()


def test_simulate_rejects_zero_records(tmp_path):
    status = app.main(['simulate', '--n-records', '0', '--out-dir', str(tmp_path), '--quiet'])
    assert status == 2


def test_fit_and_diagnose(tmp_path, truth_file):
    sim = simulate(tmp_path, truth_file)
    fit_dir = tmp_path / 'fit'
    status = app.main([
        'fit', '--survey', str(sim / 'synthetic_survey.csv'), '--iterations', '400',
        '--chains', '2', '--seed', '3', '--workers', '1', '--out-dir', str(fit_dir), '--quiet',
    ])
    assert status == 0

    summary = read_artifact(fit_dir / 'posterior_summary.csv')
    assert len(summary) == 11 + 5 + 1
    assert summary['name'].iloc[-1] == 'sigma_alpha'
    fixed = summary[summary['name'].str.startswith('beta_')]
    np.testing.assert_allclose(fixed['odds_ratio'], np.exp(fixed['estimate']), rtol=1e-12)
    assert (fit_dir / 'posterior_summary.txt').exists()
    assert (fit_dir / 'diagnostics' / 'alpha_CA.csv').exists()

    ladder = read_artifact(fit_dir / 'random_intercepts.csv')
    assert sorted(ladder['state']) == ['CA', 'MA', 'NY', 'TX', 'WY']
    assert ladder['mean'].is_monotonic_decreasing

    draws = read_artifact(fit_dir / 'draws.csv')
    assert len(draws) == 2 * 200
    manifest = json.loads((fit_dir / 'manifest.json').read_text(encoding='utf-8'))
    assert manifest['seed'] == 3 and manifest['records'] == 300
    assert 0.0 < manifest['baseline_probability'] < 1.0

    diag_dir = tmp_path / 'diag'
    status = app.main([
        'diagnose', '--draws', str(fit_dir / 'draws.csv'), '--out-dir', str(diag_dir), '--quiet',
    ])
    assert status == 0
    pd.testing.assert_frame_equal(summary, read_artifact(diag_dir / 'posterior_summary.csv'))


def test_ladder_puts_raised_state_first(tmp_path):
    truth = tmp_path / 'raised.txt'
    truth.write_text(TRUTH + "alpha = 0, 1, 0, 0, 0\n", encoding='utf-8')
    sim = simulate(tmp_path, truth, n_records=2000)
    fit_dir = tmp_path / 'fit'
    status = app.main([
        'fit', '--survey', str(sim / 'synthetic_survey.csv'), '--iterations', '600',
        '--seed', '8', '--workers', '2', '--out-dir', str(fit_dir), '--quiet',
    ])
    assert status == 0
    ladder = read_artifact(fit_dir / 'random_intercepts.csv')
    assert ladder['state'].iloc[0] == 'MA'


def test_fit_all_vaccinated_fails(tmp_path):
    survey = tmp_path / 'survey.csv'
    lines = ["gender,race,education,income,state,vaccinated"]
    lines += [f"Male,White,Bachelor's degree,\"$35,000 to $74,999\",{s},1" for s in ('CA', 'TX') * 10]
    survey.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    status = app.main(['fit', '--survey', str(survey), '--iterations', '200', '--quiet'])
    assert status == 1


def test_run_needs_an_input(tmp_path):
    assert app.main(['run', '--out-dir', str(tmp_path), '--quiet']) == 2


def test_run_clusters_into_subdirectory(tmp_path, roster_county_file, run_file):
    status = app.main([
        'run', '--config', str(run_file), '--county', str(roster_county_file),
        '--out-dir', str(tmp_path / 'out'), '--quiet',
    ])
    assert status == 0
    assert (tmp_path / 'out' / 'cluster' / 'cluster_summary.txt').exists()
    assert not (tmp_path / 'out' / 'fit').exists()


def test_arithmetic_failure_exits_as_model_failure(tmp_path, monkeypatch, capsys):
    def overflowing_fit(config):
        raise OverflowError('(34, \'Numerical result out of range\')')

    monkeypatch.setitem(app.COMMANDS, 'fit', overflowing_fit)
    status = app.main(['fit', '--out-dir', str(tmp_path)])
    assert status == 1
    assert 'out of range' in capsys.readouterr().err
