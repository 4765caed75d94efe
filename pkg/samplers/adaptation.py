"""
Warmup adaptation for HMC: dual-averaging step size, initial step-size
heuristic and diagonal mass-matrix estimation.
"""

from typing import Callable

import numpy as np


class DualAveraging:
    """
    Dual-averaging scheme for tuning log(step size) towards a target
    acceptance statistic.

    ``step(g)`` takes g = target_accept - observed_accept; ``x_t`` is the
    current iterate and ``x_avg`` its weighted average, which is the value
    frozen at the end of warmup.
    """

    def __init__(self, prox_center: float, t0: float = 10.0, kappa: float = 0.75, gamma: float = 0.05):
        self.prox_center = prox_center
        self.t0 = t0
        self.kappa = kappa
        self.gamma = gamma
        self.reset()

    def reset(self):
        self._x_avg = 0.0
        self._g_avg = 0.0
        self._x_t = self.prox_center
        self._t = 0

    def step(self, g: float):
        self._t += 1
        self._g_avg = (1 - 1 / (self._t + self.t0)) * self._g_avg + g / (self._t + self.t0)
        self._x_t = self.prox_center - (self._t ** 0.5) / self.gamma * self._g_avg
        weight_t = self._t ** (-self.kappa)
        self._x_avg = (1 - weight_t) * self._x_avg + weight_t * self._x_t

    @property
    def x_t(self) -> float:
        return self._x_t

    @property
    def x_avg(self) -> float:
        return self._x_avg if self._t else self._x_t


def find_reasonable_step_size(
    position: np.ndarray,
    log_density: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    inv_mass: np.ndarray,
    rng: np.random.Generator,
    initial: float = 1.0,
    max_doublings: int = 100
) -> float:
    """
    Double or halve the step size until a single leapfrog step crosses
    acceptance 0.5.
    """
    step_size = initial
    logp0 = log_density(position)
    grad0 = gradient(position)
    momentum = rng.normal(size=position.shape) / np.sqrt(inv_mass)
    h0 = -logp0 + 0.5 * np.sum(inv_mass * momentum ** 2)

    def log_ratio(eps: float) -> float:
        p = momentum + 0.5 * eps * grad0
        q = position + eps * inv_mass * p
        with np.errstate(all='ignore'):
            g = gradient(q)
            p = p + 0.5 * eps * g
            h1 = -log_density(q) + 0.5 * np.sum(inv_mass * p ** 2)
        value = h0 - h1
        return value if np.isfinite(value) else -np.inf

    ratio = log_ratio(step_size)
    direction = 1.0 if ratio > np.log(0.5) else -1.0
    for _ in range(max_doublings):
        if not direction * ratio > -direction * np.log(2.0):
            break
        step_size *= 2.0 ** direction
        ratio = log_ratio(step_size)
    return float(step_size)


def regularized_variance(samples: np.ndarray) -> np.ndarray:
    """
    Per-coordinate sample variance shrunk towards 1e-3.

    Used as the inverse diagonal mass matrix after warmup.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    if n < 2:
        return np.ones(samples.shape[1])
    variance = np.var(samples, axis=0, ddof=1)
    return (n / (n + 5.0)) * variance + 1e-3 * (5.0 / (n + 5.0))
