"""
Tests for split R-hat and effective sample size.
"""

import numpy as np
import pytest

from calculations.diagnostics import effective_sample_size, split_rhat
from utils.errors import DegenerateChainError


def ar1(rng, n, phi):
    x = np.empty(n)
    x[0] = rng.normal() / np.sqrt(1 - phi ** 2)
    noise = rng.normal(size=n)
    for t in range(1, n):
        x[t] = phi * x[t - 1] + noise[t]
    return x


def test_rhat_identical_chains_and_halves():
    x = np.random.default_rng(0).normal(size=500)
    chain = np.concatenate([x, x])
    assert split_rhat(np.vstack([chain, chain])) <= 1.0 + 1e-9


def test_rhat_copied_chains_near_one():
    # copies share every split half, so only the halves of one chain can disagree
    for seed in range(20):
        x = np.random.default_rng(seed).normal(size=1000)
        assert split_rhat(np.vstack([x, x, x, x])) < 1.01


def test_rhat_separated_chains():
    rng = np.random.default_rng(1)
    draws = np.vstack([rng.normal(0.0, 1.0, 1000), rng.normal(10.0, 1.0, 1000)])
    assert split_rhat(draws) > 1.5


def test_rhat_constant_chain():
    with pytest.raises(DegenerateChainError, match='degenerate chain'):
        split_rhat(np.full((2, 100), 3.0))


def test_rhat_too_short():
    with pytest.raises(ValueError):
        split_rhat(np.arange(6.0))


def test_rhat_affine_invariant():
    rng = np.random.default_rng(2)
    draws = rng.normal(size=(3, 400)) + np.array([[0.0], [0.2], [-0.1]])
    assert split_rhat(draws) == pytest.approx(split_rhat(4.0 * draws - 7.0), rel=1e-10)


def test_rhat_invariant_to_chain_order():
    rng = np.random.default_rng(3)
    draws = rng.normal(size=(4, 300))
    assert split_rhat(draws) == pytest.approx(split_rhat(draws[::-1]), rel=1e-12)


def test_ess_white_noise():
    draws = np.random.default_rng(4).normal(size=(2, 2000))
    assert effective_sample_size(draws) == pytest.approx(4000, rel=0.10)


def test_ess_ar1():
    rng = np.random.default_rng(5)
    n = 20000
    phi = 0.9
    draws = ar1(rng, n, phi)
    expected = n * (1 - phi) / (1 + phi)
    assert effective_sample_size(draws) == pytest.approx(expected, rel=0.25)


def test_ess_clipped_to_total():
    x = np.random.default_rng(6).normal(size=300)
    assert effective_sample_size(np.vstack([x, x])) <= 600


def test_ess_degenerate():
    with pytest.raises(DegenerateChainError):
        effective_sample_size(np.zeros(50))
