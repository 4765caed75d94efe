"""
Base abstract class for differentiable posterior models.
Defines the common interface the HMC sampler consumes.
"""

from abc import ABC, abstractmethod
from typing import Dict, Any, List

import numpy as np


class LogDensityModel(ABC):
    """
    Abstract base class for models with a log-density and its gradient
    over an unconstrained flat parameter vector.
    """

    @property
    @abstractmethod
    def dimension(self) -> int:
        """Length of the flat parameter vector."""
        pass

    @abstractmethod
    def log_density(self, theta: np.ndarray) -> float:
        """
        Unnormalised log posterior density at ``theta``.

        Args:
            theta: Flat unconstrained parameter vector

        Returns:
            float: log density (may be -inf outside the support)

        Raises:
            ValueError: If theta has the wrong length
        """
        pass

    @abstractmethod
    def grad_log_density(self, theta: np.ndarray) -> np.ndarray:
        """Gradient of ``log_density`` with respect to ``theta``."""
        pass

    @abstractmethod
    def get_model_info(self) -> Dict[str, Any]:
        """
        Return information about the model.

        Returns:
            Dict containing:
                - name: Model name
                - type: Model type
                - description: Brief description
                - assumptions: List of key assumptions
        """
        pass

    def parameter_names(self) -> List[str]:
        """Labels of the flat parameter coordinates."""
        return [f"theta[{k}]" for k in range(self.dimension)]

    def validate_position(self, theta: np.ndarray) -> np.ndarray:
        """
        Check a flat parameter vector against the model dimension.

        Returns:
            np.ndarray: ``theta`` as a 1-D float array

        Raises:
            ValueError: If the length does not match ``dimension``
        """
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dimension,):
            raise ValueError(
                f"Parameter vector must have length {self.dimension}. Got shape: {theta.shape}"
            )
        return theta
