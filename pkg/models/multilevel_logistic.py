"""
Multilevel logistic regression with state random intercepts.

    Y_i ~ Bernoulli(pi_i)
    logit(pi_i) = beta_0 + sum_k beta_k X_ki + alpha_j[i]
    beta_k ~ N(0, beta_scale^2)
    alpha_j ~ N(0, sigma_alpha^2)
    sigma_alpha ~ HalfNormal(sigma_alpha_hyper_scale)

The sampler works on log(sigma_alpha), so the log density carries the
Jacobian term log(sigma_alpha).
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Union

import numpy as np
from scipy.special import expit
from scipy.stats import halfnorm, norm

from config.settings import (
    CATEGORY_LEVELS,
    DEFAULT_PRIOR,
    DESIGN_GROUP_ORDER,
    MODELS,
)
from data.survey import DesignMatrix, design_column_names
from models.base_model import LogDensityModel

N_FIXED = 11


@dataclass(frozen=True, eq=False)
class ParameterVector:
    """Fixed effects beta_0..beta_10, state intercepts alpha and log sigma_alpha."""
    beta: np.ndarray
    alpha: np.ndarray
    log_sigma_alpha: float

    def __post_init__(self):
        object.__setattr__(self, 'beta', np.asarray(self.beta, dtype=float))
        object.__setattr__(self, 'alpha', np.asarray(self.alpha, dtype=float))
        object.__setattr__(self, 'log_sigma_alpha', float(self.log_sigma_alpha))
        if self.beta.shape != (N_FIXED,):
            raise ValueError(f"beta must have {N_FIXED} entries. Got shape: {self.beta.shape}")
        if self.alpha.ndim != 1:
            raise ValueError(f"alpha must be 1-D. Got shape: {self.alpha.shape}")

    @property
    def sigma_alpha(self) -> np.float64:
        # numpy scalar: overflow gives inf rather than OverflowError
        return np.exp(np.float64(self.log_sigma_alpha))

    @property
    def n_states(self) -> int:
        return self.alpha.shape[0]

    @property
    def dimension(self) -> int:
        return N_FIXED + self.n_states + 1

    def to_array(self) -> np.ndarray:
        """Flat layout: beta (11), alpha (p_s), log_sigma_alpha (1)."""
        return np.concatenate([self.beta, self.alpha, [self.log_sigma_alpha]])

    @classmethod
    def from_array(cls, theta: np.ndarray, n_states: int) -> 'ParameterVector':
        theta = np.asarray(theta, dtype=float)
        expected = N_FIXED + n_states + 1
        if theta.shape != (expected,):
            raise ValueError(
                f"Flat parameter vector must have length {expected}. Got shape: {theta.shape}"
            )
        return cls(theta[:N_FIXED], theta[N_FIXED:N_FIXED + n_states], theta[-1])

    @classmethod
    def zeros(cls, n_states: int) -> 'ParameterVector':
        return cls(np.zeros(N_FIXED), np.zeros(n_states), 0.0)


@dataclass(frozen=True)
class PriorSpec:
    """Normal prior scale of every fixed effect and half-normal scale of sigma_alpha."""
    beta_scale: float = DEFAULT_PRIOR['beta_scale']
    sigma_alpha_hyper_scale: float = DEFAULT_PRIOR['sigma_alpha_hyper_scale']

    def __post_init__(self):
        for name in ('beta_scale', 'sigma_alpha_hyper_scale'):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive and finite. Got: {value}")


def predict_probability(eta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Logistic response exp(eta) / (1 + exp(eta)).

    Saturates to 0 or 1 without overflow for large |eta|.

    Raises:
        ValueError: If eta is not finite
    """
    values = np.asarray(eta, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"eta must be finite. Got: {eta}")
    result = expit(values)
    return float(result) if result.ndim == 0 else result


class MultilevelLogisticModel(LogDensityModel):
    """
    Posterior of the random-intercept logistic model for one design.

    Immutable after construction; all evaluation methods are pure, so
    several chains may call them concurrently.
    """

    def __init__(self, design: DesignMatrix, prior: Optional[PriorSpec] = None):
        self.design = design
        self.prior = prior if prior is not None else PriorSpec()
        self._x = design.with_intercept()
        self._x.setflags(write=False)
        self._y = design.response.astype(float)
        self._y.setflags(write=False)

    @property
    def n_states(self) -> int:
        return self.design.n_states

    @property
    def dimension(self) -> int:
        return N_FIXED + self.n_states + 1

    def _unpack(self, params: Union[ParameterVector, np.ndarray]) -> ParameterVector:
        if isinstance(params, ParameterVector):
            if params.n_states != self.n_states:
                raise ValueError(
                    f"alpha has {params.n_states} entries but the design has "
                    f"{self.n_states} states"
                )
            return params
        return ParameterVector.from_array(self.validate_position(params), self.n_states)

    def linear_predictors(self, params: Union[ParameterVector, np.ndarray]) -> np.ndarray:
        """eta_i for every row."""
        p = self._unpack(params)
        return self._x @ p.beta + p.alpha[self.design.state_index]

    def linear_predictor(self, params: Union[ParameterVector, np.ndarray], row_index: int) -> float:
        """eta_i = beta_0 + sum_k beta_k X_ki + alpha_j[i] for one row."""
        if not 0 <= row_index < self.design.n_rows:
            raise IndexError(f"Row index {row_index} outside 0..{self.design.n_rows - 1}")
        p = self._unpack(params)
        return float(self._x[row_index] @ p.beta + p.alpha[self.design.state_index[row_index]])

    def log_likelihood(self, params: Union[ParameterVector, np.ndarray]) -> float:
        eta = self.linear_predictors(params)
        # y*log(pi) + (1-y)*log(1-pi) == y*eta - log(1 + exp(eta))
        return float(np.sum(self._y * eta - np.logaddexp(0.0, eta)))

    def log_prior(self, params: Union[ParameterVector, np.ndarray]) -> float:
        """Prior log density on the unconstrained scale (Jacobian included)."""
        p = self._unpack(params)
        sigma = p.sigma_alpha
        return float(
            norm.logpdf(p.beta, loc=0.0, scale=self.prior.beta_scale).sum()
            + norm.logpdf(p.alpha, loc=0.0, scale=sigma).sum()
            + halfnorm.logpdf(sigma, scale=self.prior.sigma_alpha_hyper_scale)
            + p.log_sigma_alpha
        )

    def log_posterior(self, params: Union[ParameterVector, np.ndarray]) -> float:
        return self.log_likelihood(params) + self.log_prior(params)

    def grad_log_posterior(self, params: Union[ParameterVector, np.ndarray]) -> np.ndarray:
        """
        Analytic gradient in flat order (beta, alpha, log_sigma_alpha).

        d/dbeta   = X'(y - pi) - beta / beta_scale^2
        d/dalpha  = sum_{i in j}(y_i - pi_i) - alpha / sigma^2
        d/dlog s  = sum(alpha^2)/sigma^2 - p_s - sigma^2/tau^2 + 1
        """
        p = self._unpack(params)
        sigma2 = np.exp(2.0 * np.float64(p.log_sigma_alpha))
        residual = self._y - expit(self._x @ p.beta + p.alpha[self.design.state_index])

        grad_beta = self._x.T @ residual - p.beta / self.prior.beta_scale ** 2
        grad_alpha = (
            np.bincount(self.design.state_index, weights=residual, minlength=self.n_states)
            - p.alpha / sigma2
        )
        grad_log_sigma = (
            np.sum(p.alpha ** 2) / sigma2
            - self.n_states
            - sigma2 / self.prior.sigma_alpha_hyper_scale ** 2
            + 1.0
        )
        return np.concatenate([grad_beta, grad_alpha, [grad_log_sigma]])

    def log_density(self, theta: np.ndarray) -> float:
        return self.log_posterior(theta)

    def grad_log_density(self, theta: np.ndarray) -> np.ndarray:
        return self.grad_log_posterior(theta)

    def parameter_names(self) -> List[str]:
        """beta_0..beta_10, alpha[<STATE>] per roster state, sigma_alpha."""
        return (
            [f"beta_{k}" for k in range(N_FIXED)]
            + [f"alpha[{s}]" for s in self.design.states]
            + ['sigma_alpha']
        )

    def constrain_draws(self, draws: np.ndarray) -> np.ndarray:
        """Map the trailing log_sigma_alpha coordinate of draws to sigma_alpha."""
        constrained = np.array(draws, dtype=float, copy=True)
        constrained[..., -1] = np.exp(constrained[..., -1])
        return constrained

    def predict_profile(
        self,
        params: Union[ParameterVector, np.ndarray],
        profile: Mapping[str, str],
        state: Optional[str] = None
    ) -> float:
        """
        Vaccination probability for a covariate profile.

        Args:
            params: Parameter values
            profile: group -> level; omitted groups take the base category
            state: Roster code whose intercept is added (None: population level)
        """
        p = self._unpack(params)
        names = design_column_names()
        x = np.zeros(N_FIXED)
        x[0] = 1.0
        for group, level in profile.items():
            if group not in DESIGN_GROUP_ORDER or level not in CATEGORY_LEVELS[group]:
                raise ValueError(f"Unknown profile entry {group}={level}")
            if level != CATEGORY_LEVELS[group][0]:
                x[1 + names.index(f"{group}={level}")] = 1.0
        eta = float(x @ p.beta)
        if state is not None:
            if state not in self.design.states:
                raise ValueError(f"State {state!r} is not in the roster")
            eta += p.alpha[self.design.states.index(state)]
        return predict_probability(eta)

    def get_model_info(self) -> Dict[str, Any]:
        info = dict(MODELS['multilevel_logistic'])
        info.update({
            'assumptions': [
                'Independent Bernoulli responses given covariates and state',
                'Additive logit effects without interactions',
                'Exchangeable normal state intercepts with a shared scale',
                'Unweighted survey records',
            ],
            'parameters': {
                'rows': self.design.n_rows,
                'states': self.n_states,
                'dimension': self.dimension,
                'beta_scale': self.prior.beta_scale,
                'sigma_alpha_hyper_scale': self.prior.sigma_alpha_hyper_scale,
            },
        })
        return info


ModelInstance = MultilevelLogisticModel


def linear_predictor(params: ParameterVector, row_index: int, model: MultilevelLogisticModel) -> float:
    return model.linear_predictor(params, row_index)


def log_posterior(params: ParameterVector, model: MultilevelLogisticModel) -> float:
    return model.log_posterior(params)


def grad_log_posterior(params: ParameterVector, model: MultilevelLogisticModel) -> np.ndarray:
    return model.grad_log_posterior(params)
