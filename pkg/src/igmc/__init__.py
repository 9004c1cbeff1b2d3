"""Posterior CDFs of an expectation by incremental generative Monte Carlo."""

from igmc.ecdf import EmpiricalCdf, dkw_band, ks_distance, l1_distance_step_ref, l1_distance_step_step
from igmc.engine import IgmcConfig, PosteriorSamples, posterior_cdf, run_chain, run_igmc
from igmc.generative import (
    BERNOULLI,
    EXPONENTIAL,
    SampleSet,
    Support,
    fit_bernoulli,
    fit_exponential,
    sample_model,
)
from igmc.reference import (
    BetaRef,
    GammaRef,
    azuma_tail,
    hoeffding_bound,
    igmc_l1_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BERNOULLI",
    "EXPONENTIAL",
    "BetaRef",
    "EmpiricalCdf",
    "GammaRef",
    "IgmcConfig",
    "PosteriorSamples",
    "SampleSet",
    "Support",
    "azuma_tail",
    "dkw_band",
    "fit_bernoulli",
    "fit_exponential",
    "hoeffding_bound",
    "ks_distance",
    "l1_distance_step_ref",
    "l1_distance_step_step",
    "posterior_cdf",
    "run_chain",
    "run_igmc",
    "sample_model",
    "igmc_l1_bound",
]
