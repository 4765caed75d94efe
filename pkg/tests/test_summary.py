"""
Tests for posterior summaries, odds ratios, the intercept ladder and
diagnostic series.
"""

import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.stats import norm

from calculations.density import emit_diagnostics, kernel_density, thin_indices
from calculations.summary import (
    baseline_probability,
    odds_ratio,
    random_intercept_ladder,
    summarize_posterior,
)
from config.settings import FIXED_EFFECT_LABELS
from samplers import ChainSet

TABLE_ODDS = [
    (0.45, 1.568), (1.24, 3.456), (1.79, 5.989), (0.39, 1.477), (0.91, 2.484),
    (-0.3, 0.741), (0.25, 1.284), (0.43, 1.537), (0.77, 2.160), (0.04, 1.041),
]


def fixed_names(states=('CA', 'NY', 'TX')):
    return (
        [f"beta_{k}" for k in range(11)]
        + [f"alpha[{s}]" for s in states]
        + ['sigma_alpha']
    )


def chains_from(draws):
    return ChainSet.from_draws(np.asarray(draws, dtype=float))


@pytest.mark.parametrize("beta, expected", TABLE_ODDS)
def test_odds_ratio_fixtures(beta, expected):
    assert odds_ratio(beta) == pytest.approx(expected, abs=1e-3)


def test_odds_ratio_units():
    assert odds_ratio(0.0, 3.7) == 1.0
    assert odds_ratio(0.25, 2.0) == pytest.approx(1.6487, abs=5e-4)
    with pytest.raises(ValueError):
        odds_ratio(np.inf)


def test_summary_rows_and_labels():
    names = fixed_names()
    draws = np.random.default_rng(0).normal(size=(2, 200, len(names)))
    summary = summarize_posterior(chains_from(draws), names)

    fixed = summary.fixed_effects()
    assert len(fixed) == 11
    assert fixed['label'].tolist() == list(FIXED_EFFECT_LABELS)
    assert len(summary.table) == len(names)


def test_summary_constant_parameter():
    names = fixed_names()
    draws = np.random.default_rng(1).normal(size=(2, 100, len(names)))
    draws[:, :, 2] = 1.24
    row = summarize_posterior(chains_from(draws), names).row('beta_2')

    assert row['mean'] == pytest.approx(1.24)
    assert row['ci_low'] == pytest.approx(1.24) and row['ci_high'] == pytest.approx(1.24)
    assert row['odds_ratio'] == pytest.approx(np.exp(1.24))
    assert np.isnan(row['rhat']) and np.isnan(row['ess'])


def test_summary_odds_ratio_from_posterior():
    names = fixed_names()
    rng = np.random.default_rng(2)
    draws = rng.normal(size=(2, 1000, len(names)))
    draws[:, :, 2] = rng.normal(1.24, 0.003, size=(2, 1000))
    row = summarize_posterior(chains_from(draws), names).row('beta_2')
    assert row['odds_ratio'] == pytest.approx(3.456, abs=0.01)


def test_summary_identities():
    names = fixed_names()
    draws = np.random.default_rng(3).normal(0.5, 2.0, size=(3, 300, len(names)))
    table = summarize_posterior(chains_from(draws), names).table

    fixed = table[table['name'].str.startswith('beta_')]
    assert np.all(np.abs(fixed['odds_ratio'] - np.exp(fixed['mean'])) <= 1e-12 * fixed['odds_ratio'])
    np.testing.assert_allclose(fixed["odds_change_pct"], (fixed["odds_ratio"] - 1) * 100)
    assert np.all((table['ci_low'] <= table['median']) & (table['median'] <= table['ci_high']))
    assert table.loc[~table['name'].str.startswith('beta_'), 'odds_ratio'].isna().all()


def test_summary_invariant_to_chain_order():
    names = fixed_names()
    draws = np.random.default_rng(4).normal(size=(3, 200, len(names)))
    first = summarize_posterior(chains_from(draws), names).table
    second = summarize_posterior(chains_from(draws[::-1]), names).table
    np.testing.assert_allclose(first['mean'], second['mean'], rtol=1e-12)
    np.testing.assert_allclose(first['rhat'], second['rhat'], rtol=1e-10)


def test_summary_label_mismatch():
    draws = np.zeros((1, 20, 3))
    with pytest.raises(ValueError):
        summarize_posterior(chains_from(draws), ['a', 'b'])


def test_ladder_sorted_descending():
    states = ('CA', 'MA', 'TX')
    names = fixed_names(states)
    draws = np.random.default_rng(5).normal(0.0, 0.01, size=(2, 200, len(names)))
    draws[:, :, 11 + 1] += 1.0                     # MA
    draws[:, :, 11 + 2] -= 1.0                     # TX
    summary = summarize_posterior(chains_from(draws), names)

    ladder = random_intercept_ladder(summary, states)
    assert ladder['state'].tolist() == ['MA', 'CA', 'TX']
    assert list(ladder.columns) == ['state', 'mean', 'ci_low', 'ci_high']
    with pytest.raises(ValueError):
        random_intercept_ladder(summary, ('CA', 'MA'))


def test_ladder_all_zero_keeps_roster():
    states = ('AL', 'CA', 'NY')
    names = fixed_names(states)
    summary = summarize_posterior(chains_from(np.zeros((2, 50, len(names)))), names)
    ladder = random_intercept_ladder(summary, states)
    assert ladder['mean'].tolist() == [0.0, 0.0, 0.0]
    assert sorted(ladder['state']) == list(states)


def test_baseline_probability():
    names = fixed_names()
    draws = np.random.default_rng(6).normal(0.0, 0.01, size=(2, 100, len(names)))
    draws[:, :, 0] = -0.74
    summary = summarize_posterior(chains_from(draws), names)
    assert baseline_probability(summary) == pytest.approx(0.323, abs=5e-4)


def test_kernel_density_normalised_and_peaked():
    values = norm.ppf((np.arange(4000) + 0.5) / 4000)
    grid, density, bandwidth = kernel_density(values)
    assert grid.size == 256
    assert np.all(density >= 0.0)
    assert trapezoid(density, grid) == pytest.approx(1.0, abs=0.02)
    assert abs(grid[np.argmax(density)]) < 0.1
    assert grid[0] == pytest.approx(values.min() - 3 * bandwidth)


def test_thinning_limit():
    assert thin_indices(2500).size <= 1000
    assert thin_indices(10).tolist() == list(range(10))


def test_emit_diagnostics_series():
    names = ['a', 'b']
    draws = np.random.default_rng(8).normal(size=(2, 3000, 2))
    draws[:, :, 1] = 4.0
    series = emit_diagnostics(chains_from(draws), names)

    assert series['a'].traces.shape[0] == 2
    assert series['a'].traces.shape[1] <= 1000
    assert not series['a'].is_point_mass
    assert series['b'].is_point_mass and series['b'].point_mass == 4.0
