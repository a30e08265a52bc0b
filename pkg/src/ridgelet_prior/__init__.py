"""Ridgelet priors for Bayesian neural networks.

A Gaussian process prior is pushed forward through a discretized ridgelet
transform to give a Gaussian law on network weights. The package provides
the covariance models, activation/ridgelet pairs, cubature rules, network
samplers, approximation diagnostics, posterior inference and an experiment
driver.
"""
from .activations import ActivationPair, check_reconstruction, phi, psi
from .cubature import InputRule, Mollifier, WeightRule, make_input_rule, make_mollifier, make_weight_rule, normalizer
from .diagnostics import (
    iid_bnn_covariance,
    mrmse_closed_form,
    mrmse_monte_carlo,
    mrmse_report,
    ridgelet_bnn_covariance,
    rmse_profile,
)
from .gp import GPModel, gp_posterior, sample_paths
from .inference import (
    IIDPriorSpec,
    PosteriorChain,
    RegressionProblem,
    RidgeletPriorSpec,
    conditional_output_weights,
    ess_step,
    marginal_loglik,
    posterior_predictive,
    run_posterior,
)
from .kernels import (
    InPaintComposite,
    LinearMean,
    Periodic,
    RationalQuadratic,
    SquaredExponential,
    ZeroMean,
    eval_kernel,
    eval_mean,
    gram,
)
from .prior import RidgeletNetwork, gaussian_sqrt, sample_iid_network, sample_ridgelet_network
from .ridgelet import FeatureMap, PsiMatrix, apply_operator, build_psi

__all__ = [
    "ActivationPair",
    "check_reconstruction",
    "phi",
    "psi",
    "InputRule",
    "Mollifier",
    "WeightRule",
    "make_input_rule",
    "make_mollifier",
    "make_weight_rule",
    "normalizer",
    "iid_bnn_covariance",
    "mrmse_closed_form",
    "mrmse_monte_carlo",
    "mrmse_report",
    "ridgelet_bnn_covariance",
    "rmse_profile",
    "GPModel",
    "gp_posterior",
    "sample_paths",
    "IIDPriorSpec",
    "PosteriorChain",
    "RegressionProblem",
    "RidgeletPriorSpec",
    "conditional_output_weights",
    "ess_step",
    "marginal_loglik",
    "posterior_predictive",
    "run_posterior",
    "InPaintComposite",
    "LinearMean",
    "Periodic",
    "RationalQuadratic",
    "SquaredExponential",
    "ZeroMean",
    "eval_kernel",
    "eval_mean",
    "gram",
    "RidgeletNetwork",
    "gaussian_sqrt",
    "sample_iid_network",
    "sample_ridgelet_network",
    "FeatureMap",
    "PsiMatrix",
    "apply_operator",
    "build_psi",
]

__version__ = "0.1.0"
