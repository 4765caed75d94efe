"""
Hamiltonian Monte Carlo sampler over a differentiable log-density.

Fixed-length leapfrog trajectories (with uniform jitter on the step count),
Metropolis correction, dual-averaging step-size adaptation and a diagonal
mass matrix estimated during warmup. Chains run independently, each on its
own random stream derived from (seed, chain index).
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from config.settings import DEFAULT_HMC, MODELS
from models.base_model import LogDensityModel
from samplers.adaptation import DualAveraging, find_reasonable_step_size, regularized_variance
from utils.errors import ModelFitError
from utils.seeding import derive_rng

logger = logging.getLogger(__name__)

LogDensity = Callable[[np.ndarray], float]
Gradient = Callable[[np.ndarray], np.ndarray]

MIN_WARMUP = 100


@dataclass(frozen=True)
class HmcConfig:
    """Sampler settings. ``iterations`` counts warmup plus retained draws per chain."""
    chains: int = DEFAULT_HMC['chains']
    iterations: int = DEFAULT_HMC['iterations']
    warmup_fraction: float = DEFAULT_HMC['warmup_fraction']
    target_accept: float = DEFAULT_HMC['target_accept']
    leapfrog_steps: int = DEFAULT_HMC['leapfrog_steps']
    leapfrog_jitter: float = DEFAULT_HMC['leapfrog_jitter']
    max_energy_error: float = DEFAULT_HMC['max_energy_error']
    seed: int = 0

    def __post_init__(self):
        if self.chains < 1:
            raise ValueError(f"chains must be positive. Got: {self.chains}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive. Got: {self.iterations}")
        if not 0 < self.warmup_fraction < 1:
            raise ValueError(f"warmup_fraction must be in (0, 1). Got: {self.warmup_fraction}")
        if not 0 < self.target_accept < 1:
            raise ValueError(f"target_accept must be in (0, 1). Got: {self.target_accept}")
        if self.leapfrog_steps < 1:
            raise ValueError(f"leapfrog_steps must be positive. Got: {self.leapfrog_steps}")
        if not 0 <= self.leapfrog_jitter < 1:
            raise ValueError(f"leapfrog_jitter must be in [0, 1). Got: {self.leapfrog_jitter}")
        if self.warmup < MIN_WARMUP:
            raise ValueError(
                f"Warmup must be at least {MIN_WARMUP} iterations. Got: {self.warmup} "
                f"({self.iterations} x {self.warmup_fraction})"
            )
        if self.n_draws < 1:
            raise ValueError("No draws left after warmup")

    @property
    def warmup(self) -> int:
        return int(round(self.iterations * self.warmup_fraction))

    @property
    def n_draws(self) -> int:
        return self.iterations - self.warmup


@dataclass(frozen=True, eq=False)
class ChainSet:
    """
    Post-warmup draws of every chain plus per-transition statistics.

    Arrays indexed [chain, draw, ...]. ``accept_prob`` is min(1, exp(-dH))
    for each recorded transition (0 for divergent ones).
    """
    draws: np.ndarray
    accept_rate: np.ndarray
    step_size: np.ndarray
    divergence_count: np.ndarray
    accepted: np.ndarray
    accept_prob: np.ndarray
    energy_change: np.ndarray
    inv_mass: np.ndarray
    warmup_divergences: np.ndarray
    warmup_iterations: int

    def __post_init__(self):
        if self.draws.ndim != 3:
            raise ValueError(f"draws must be chains x draws x dimension. Got shape: {self.draws.shape}")
        if not np.all(np.isfinite(self.draws)):
            raise ValueError("Chain draws must be finite")

    @property
    def n_chains(self) -> int:
        return self.draws.shape[0]

    @property
    def n_draws(self) -> int:
        return self.draws.shape[1]

    @property
    def dimension(self) -> int:
        return self.draws.shape[2]

    def parameter(self, index: int) -> np.ndarray:
        """Draws of one coordinate, shape (chains, draws)."""
        return self.draws[:, :, index]

    def pooled(self) -> np.ndarray:
        """All chains stacked, shape (chains * draws, dimension)."""
        return self.draws.reshape(-1, self.dimension)

    @classmethod
    def from_draws(cls, draws: np.ndarray, warmup_iterations: int = 0) -> 'ChainSet':
        """ChainSet around saved draws; transition statistics are unknown (NaN)."""
        draws = np.asarray(draws, dtype=float)
        n_chains, n_draws = draws.shape[:2]
        unknown = np.full(n_chains, np.nan)
        return cls(
            draws, unknown, unknown.copy(), np.zeros(n_chains, dtype=int),
            np.zeros((n_chains, n_draws), dtype=bool), np.full((n_chains, n_draws), np.nan),
            np.full((n_chains, n_draws), np.nan), np.full((n_chains, draws.shape[2]), np.nan),
            np.zeros(n_chains, dtype=int), warmup_iterations,
        )

    def with_draws(self, draws: np.ndarray) -> 'ChainSet':
        """Same statistics with transformed draws (e.g. constrained parameters)."""
        return ChainSet(
            draws, self.accept_rate, self.step_size, self.divergence_count,
            self.accepted, self.accept_prob, self.energy_change, self.inv_mass,
            self.warmup_divergences, self.warmup_iterations,
        )


def _integrate(
    position: np.ndarray,
    momentum: np.ndarray,
    step_size: float,
    steps: int,
    gradient: Gradient,
    inv_mass: np.ndarray,
    grad_at_position: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    q = np.array(position, dtype=float, copy=True)
    p = np.array(momentum, dtype=float, copy=True)
    with np.errstate(all='ignore'):
        g = gradient(q) if grad_at_position is None else grad_at_position
        if steps == 0:
            return q, p, g
        for _ in range(steps):
            p = p + 0.5 * step_size * g
            q = q + step_size * inv_mass * p
            g = gradient(q)
            p = p + 0.5 * step_size * g
            if not np.all(np.isfinite(g)):
                # caller sees the non-finite state and flags a divergence
                break
    return q, p, g


def leapfrog(
    position: np.ndarray,
    momentum: np.ndarray,
    step_size: float,
    steps: int,
    gradient: Gradient,
    inv_mass: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Apply ``steps`` half-kick / drift / half-kick leapfrog updates.

    Args:
        position: Starting position
        momentum: Starting momentum
        step_size: Integrator step size (epsilon)
        steps: Number of leapfrog steps (0 returns the inputs unchanged)
        gradient: Gradient of the log density
        inv_mass: Diagonal inverse mass matrix (identity when None)

    Returns:
        tuple: (position, momentum); non-finite entries mean the
        trajectory diverged
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative. Got: {steps}")
    if step_size <= 0:
        raise ValueError(f"step_size must be positive. Got: {step_size}")
    position = np.asarray(position, dtype=float)
    if inv_mass is None:
        inv_mass = np.ones_like(position)
    if steps == 0:
        return position.copy(), np.array(momentum, dtype=float, copy=True)
    q, p, _ = _integrate(position, momentum, step_size, steps, gradient, inv_mass)
    return q, p


def hamiltonian(log_density_value: float, momentum: np.ndarray, inv_mass: np.ndarray) -> float:
    """H = -log p(q) + p' M^-1 p / 2."""
    return float(-log_density_value + 0.5 * np.sum(inv_mass * momentum ** 2))


def initialize_chain(dimension: int, seed: int, chain_index: int = 0) -> np.ndarray:
    """Starting position drawn uniformly from [-1, 1] on the chain's own substream."""
    if dimension < 1:
        raise ValueError(f"dimension must be positive. Got: {dimension}")
    return derive_rng(seed, 'init', chain_index).uniform(-1.0, 1.0, size=dimension)


def _jittered_steps(rng: np.random.Generator, base: int, jitter: float) -> int:
    low = max(1, int(round(base * (1 - jitter))))
    high = max(low, int(round(base * (1 + jitter))))
    return int(rng.integers(low, high + 1))


def run_chain(
    log_density: LogDensity,
    gradient: Gradient,
    dimension: int,
    config: HmcConfig,
    chain_index: int
) -> Dict[str, Any]:
    """
    Run one chain: warmup with adaptation, then frozen sampling.

    Warmup schedule: the first half adapts the step size under a unit
    metric; draws from the second half (up to 85% of warmup) estimate the
    diagonal inverse mass; the step size is re-adapted over the remainder.
    """
    rng = derive_rng(config.seed, 'chain', chain_index)
    q = initialize_chain(dimension, config.seed, chain_index)
    logp = log_density(q)
    grad = gradient(q)
    if not np.isfinite(logp) or not np.all(np.isfinite(grad)):
        raise ModelFitError(f"Chain {chain_index}: non-finite log density at the initial position")

    warmup = config.warmup
    mass_start = warmup // 2
    mass_end = int(0.85 * warmup)

    inv_mass = np.ones(dimension)
    step_size = find_reasonable_step_size(q, log_density, gradient, inv_mass, rng)
    adapter = DualAveraging(prox_center=np.log(10 * step_size))
    mass_window = []

    n_draws = config.n_draws
    draws = np.empty((n_draws, dimension))
    accepted_flags = np.zeros(n_draws, dtype=bool)
    accept_probs = np.zeros(n_draws)
    energy_changes = np.zeros(n_draws)
    divergences = 0
    warmup_divergences = 0

    for it in range(config.iterations):
        steps = _jittered_steps(rng, config.leapfrog_steps, config.leapfrog_jitter)
        momentum = rng.normal(size=dimension) / np.sqrt(inv_mass)
        h_old = hamiltonian(logp, momentum, inv_mass)

        q_new, p_new, g_new = _integrate(q, momentum, step_size, steps, gradient, inv_mass, grad)
        with np.errstate(all='ignore'):
            logp_new = log_density(q_new) if np.all(np.isfinite(q_new)) else -np.inf
            delta_h = hamiltonian(logp_new, p_new, inv_mass) - h_old

        divergent = (
            not np.isfinite(delta_h)
            or abs(delta_h) > config.max_energy_error
            or not np.all(np.isfinite(g_new))
        )
        accept_prob = 0.0 if divergent else float(min(1.0, np.exp(-delta_h)))
        accept = rng.random() < accept_prob
        if accept:
            q, logp, grad = q_new, logp_new, g_new

        if it < warmup:
            warmup_divergences += int(divergent)
            adapter.step(config.target_accept - accept_prob)
            step_size = float(np.exp(adapter.x_t))
            if mass_start <= it < mass_end:
                mass_window.append(q.copy())
            if it == mass_end - 1:
                inv_mass = regularized_variance(np.array(mass_window))
                step_size = find_reasonable_step_size(q, log_density, gradient, inv_mass, rng)
                adapter = DualAveraging(prox_center=np.log(10 * step_size))
            if it == warmup - 1:
                if warmup_divergences == warmup:
                    raise ModelFitError(
                        f"Chain {chain_index}: all {warmup} warmup proposals diverged"
                    )
                step_size = float(np.exp(adapter.x_avg))
                logger.info(
                    f"Chain {chain_index}: warmup done, step size {step_size:.4g}, "
                    f"inverse mass range [{inv_mass.min():.3g}, {inv_mass.max():.3g}]"
                )
        else:
            k = it - warmup
            draws[k] = q
            accepted_flags[k] = accept
            accept_probs[k] = accept_prob
            energy_changes[k] = delta_h
            divergences += int(divergent)

    if divergences:
        logger.warning(f"Chain {chain_index}: {divergences} divergent transition(s) after warmup")

    return {
        'draws': draws,
        'accepted': accepted_flags,
        'accept_prob': accept_probs,
        'energy_change': energy_changes,
        'step_size': step_size,
        'divergences': divergences,
        'warmup_divergences': warmup_divergences,
        'inv_mass': inv_mass,
    }


def hmc_sample(
    log_density: LogDensity,
    gradient: Gradient,
    dimension: int,
    config: HmcConfig,
    workers: int = 1
) -> ChainSet:
    """
    Run ``config.chains`` independent chains.

    Output depends only on the callables, ``dimension`` and ``config``;
    ``workers`` only sets how many chains run at once.

    Raises:
        ModelFitError: Non-finite initial density or all-divergent warmup
    """
    if dimension < 1:
        raise ValueError(f"dimension must be positive. Got: {dimension}")

    logger.info(
        f"HMC: {config.chains} chain(s) x {config.iterations} iterations "
        f"({config.warmup} warmup), dimension {dimension}"
    )
    results = Parallel(n_jobs=min(workers, config.chains))(
        delayed(run_chain)(log_density, gradient, dimension, config, c)
        for c in range(config.chains)
    )

    accepted = np.stack([r['accepted'] for r in results])
    return ChainSet(
        draws=np.stack([r['draws'] for r in results]),
        accept_rate=accepted.mean(axis=1),
        step_size=np.array([r['step_size'] for r in results]),
        divergence_count=np.array([r['divergences'] for r in results]),
        accepted=accepted,
        accept_prob=np.stack([r['accept_prob'] for r in results]),
        energy_change=np.stack([r['energy_change'] for r in results]),
        inv_mass=np.stack([r['inv_mass'] for r in results]),
        warmup_divergences=np.array([r['warmup_divergences'] for r in results]),
        warmup_iterations=config.warmup,
    )


class HMCSampler:
    """
    HMC sampler bound to a configuration.

    Configure once, then call ``sample`` on any LogDensityModel.
    """

    def __init__(self, config: Optional[HmcConfig] = None, workers: int = 1):
        self.config = config if config is not None else HmcConfig()
        self.workers = workers

    def sample(self, model: LogDensityModel) -> ChainSet:
        return hmc_sample(
            model.log_density, model.grad_log_density, model.dimension,
            self.config, self.workers,
        )

    def get_model_info(self) -> Dict[str, Any]:
        info = dict(MODELS['hmc'])
        info['parameters'] = {
            'chains': self.config.chains,
            'iterations': self.config.iterations,
            'warmup': self.config.warmup,
            'target_accept': self.config.target_accept,
            'leapfrog_steps': self.config.leapfrog_steps,
            'leapfrog_jitter': self.config.leapfrog_jitter,
            'seed': self.config.seed,
        }
        return info


def sample_model(model: LogDensityModel, config: HmcConfig, workers: int = 1) -> ChainSet:
    return HMCSampler(config, workers).sample(model)
