"""Samplers module - Hamiltonian Monte Carlo"""

from .hmc import (
    ChainSet,
    HMCSampler,
    HmcConfig,
    hmc_sample,
    initialize_chain,
    leapfrog,
    sample_model,
)

__all__ = [
    'ChainSet',
    'HMCSampler',
    'HmcConfig',
    'hmc_sample',
    'initialize_chain',
    'leapfrog',
    'sample_model',
]
