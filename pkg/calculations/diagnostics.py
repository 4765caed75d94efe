"""
MCMC convergence diagnostics: split R-hat and effective sample size.
"""

import numpy as np

from utils.errors import DegenerateChainError


def _as_chains(draws) -> np.ndarray:
    ary = np.asarray(draws, dtype=float)
    if ary.ndim == 1:
        ary = ary[np.newaxis, :]
    if ary.ndim != 2:
        raise ValueError(f"Draws must be 1-D or chains x draws. Got shape: {ary.shape}")
    if not np.all(np.isfinite(ary)):
        raise ValueError("Draws must be finite")
    return ary


def _check_not_constant(ary: np.ndarray):
    if np.ptp(ary) == 0.0:
        raise DegenerateChainError("degenerate chain: all draws are identical")


def split_rhat(draws) -> float:
    """
    Split-chain potential scale reduction factor.

    Every chain is cut into two halves (the middle draw of an odd-length
    chain is dropped) and the classic between/within variance ratio is
    computed over the halves.

    Args:
        draws: Shape (chains, draws), or a single chain as a 1-D array

    Returns:
        float: R-hat; inf when every half is constant but halves differ

    Raises:
        DegenerateChainError: All draws identical
        ValueError: Fewer than 4 draws per half
    """
    ary = _as_chains(draws)
    half = ary.shape[1] // 2
    if half < 4:
        raise ValueError(f"Split R-hat needs at least 4 draws per half-chain. Got: {half}")
    _check_not_constant(ary)

    halves = np.vstack((ary[:, :half], ary[:, -half:]))
    n = halves.shape[1]
    chain_mean = halves.mean(axis=1)
    within = np.mean(halves.var(axis=1, ddof=1))
    between = n * np.var(chain_mean, ddof=1)
    if within == 0.0:
        return float('inf')
    var_plus = (n - 1) / n * within + between / n
    return float(np.sqrt(var_plus / within))


def _autocovariance(x: np.ndarray) -> np.ndarray:
    n = x.size
    centered = x - x.mean()
    spectrum = np.fft.rfft(centered, n=2 * n)
    return np.fft.irfft(spectrum * np.conj(spectrum), n=2 * n)[:n] / n


def effective_sample_size(draws) -> float:
    """
    Autocorrelation-based effective sample size over all chains.

    Combines per-chain autocovariances with the between-chain variance,
    sums paired autocorrelations until the first negative pair (Geyer's
    initial positive sequence, made monotone) and clips the result to
    [1, total draws].

    Raises:
        DegenerateChainError: All draws identical
        ValueError: Fewer than 8 draws in total
    """
    ary = _as_chains(draws)
    n_chain, n_draw = ary.shape
    if n_chain * n_draw < 8 or n_draw < 4:
        raise ValueError(f"ESS needs at least 8 draws. Got: {n_chain} x {n_draw}")
    _check_not_constant(ary)

    acov = np.asarray([_autocovariance(chain) for chain in ary])
    chain_mean = ary.mean(axis=1)
    mean_var = np.mean(acov[:, 0]) * n_draw / (n_draw - 1.0)
    var_plus = mean_var * (n_draw - 1.0) / n_draw
    if n_chain > 1:
        var_plus += np.var(chain_mean, ddof=1)
    if var_plus == 0.0:
        raise DegenerateChainError("degenerate chain: zero within-chain variance")

    rho = np.zeros(n_draw)
    rho_even = 1.0
    rho[0] = rho_even
    rho_odd = 1.0 - (mean_var - np.mean(acov[:, 1])) / var_plus
    rho[1] = rho_odd

    # initial positive sequence
    t = 1
    while t < n_draw - 2 and rho_even + rho_odd >= 0.0:
        rho_even = 1.0 - (mean_var - np.mean(acov[:, t + 1])) / var_plus
        rho_odd = 1.0 - (mean_var - np.mean(acov[:, t + 2])) / var_plus
        rho[t + 1] = rho_even
        if rho_even + rho_odd >= 0.0:
            rho[t + 2] = rho_odd
        t += 2
    max_t = t

    # initial monotone sequence
    t = 1
    while t <= max_t - 2:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0
            rho[t + 2] = rho[t + 1]
        t += 2

    tau = -1.0 + 2.0 * np.sum(rho[:max_t]) + np.sum(rho[max_t + 1:max_t + 2])
    total = n_chain * n_draw
    if tau <= 0.0:
        return float(total)
    return float(np.clip(total / tau, 1.0, total))
