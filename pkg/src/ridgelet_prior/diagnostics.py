"""Approximation-quality metrics for the ridgelet prior.

The maximum root-mean-square error (MRMSE) compares a GP path ``f`` with its
network image ``I f`` conditional on the sampled hidden-layer nodes. Given
those nodes ``f - I f`` is Gaussian, so the conditional second moment has a
closed form; a Monte Carlo estimator over GP draws is provided as a
cross-check. The BNN covariance function averages the exact conditional
covariance over independent redraws of the hidden layer.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import ActivationPair
from .cubature import InputRule, make_weight_rule
from .gp import GPModel, sample_paths
from .kernels import CovarianceModel, MeanModel, as_points, gram
from .prior import sample_iid_network
from .ridgelet import FeatureMap, PsiMatrix, build_psi
from .rng import derive_seed

__all__ = [
    "default_probe_grid",
    "MrmseRecord",
    "MrmseReport",
    "rmse_profile",
    "mrmse_closed_form",
    "mrmse_monte_carlo",
    "ridgelet_bnn_covariance",
    "iid_bnn_covariance",
    "mrmse_report",
]

RADICAND_TOL = 1e-10


def default_probe_grid(d: int = 1, x_half: float = 5.0) -> np.ndarray:
    """201 points on ``[-x_half, x_half]`` for ``d = 1``, a 41 x 41 grid for ``d = 2``."""
    if d == 1:
        return np.linspace(-x_half, x_half, 201).reshape(-1, 1)
    if d == 2:
        axis = np.linspace(-x_half, x_half, 41)
        g1, g2 = np.meshgrid(axis, axis, indexing="ij")
        return np.stack([g1.ravel(), g2.ravel()], axis=1)
    raise ValueError("default probe grids exist for d in {1, 2} only")


def _network_coefficients(psi: PsiMatrix, feature: FeatureMap, probe: np.ndarray) -> np.ndarray:
    # row p is a(x_p) = Psi^T phi_0(x_p), so that I f(x_p) = a(x_p) . f_D
    return feature(probe) @ psi.matrix


def rmse_profile(mean: MeanModel, cov: CovarianceModel, input_rule: InputRule, psi: PsiMatrix,
                 feature: FeatureMap, probe_grid, K: np.ndarray | None = None) -> np.ndarray:
    """Conditional RMSE ``sqrt(E[(f(x) - I f(x))^2 | nodes])`` at each probe point."""
    probe = as_points(probe_grid, input_rule.d)
    nodes = input_rule.nodes
    if K is None:
        K = gram(cov, nodes)
    A = _network_coefficients(psi, feature, probe)
    bias = mean(probe) - A @ mean(nodes)
    kxx = cov.diag(probe)
    cross = np.einsum("pj,jp->p", A, cov(nodes, probe))
    quad = np.einsum("pj,pj->p", A @ K, A)
    radicand = bias**2 + kxx - 2.0 * cross + quad
    tol = RADICAND_TOL * max(1.0, float(np.max(kxx)), float(np.max(quad)))
    if np.min(radicand) < -tol:
        raise ArithmeticError(f"negative mean-square error {np.min(radicand):.3e}; kernel matrix is not PSD")
    return np.sqrt(np.maximum(radicand, 0.0))


def mrmse_closed_form(mean, cov, input_rule, psi, feature, probe_grid, K=None) -> float:
    """Maximum over ``probe_grid`` of the exact conditional RMSE."""
    return float(np.max(rmse_profile(mean, cov, input_rule, psi, feature, probe_grid, K)))


def mrmse_monte_carlo(mean, cov, input_rule, psi, feature, probe_grid, n_gp_draws: int, seed: int) -> float:
    """MRMSE estimated from joint GP draws at the grid nodes and probe points."""
    if n_gp_draws < 2:
        raise ValueError("n_gp_draws must be >= 2")
    probe = as_points(probe_grid, input_rule.d)
    nodes = input_rule.nodes
    joint = np.vstack([nodes, probe])
    # identical locations must share a column so the joint Gram stays PSD
    uniq, inverse = np.unique(joint, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    paths = sample_paths(GPModel(cov, mean), uniq, n_gp_draws, seed)
    f_nodes = paths[:, inverse[: nodes.shape[0]]]
    f_probe = paths[:, inverse[nodes.shape[0]:]]
    A = _network_coefficients(psi, feature, probe)
    err = f_probe - f_nodes @ A.T
    return float(np.max(np.sqrt(np.mean(err**2, axis=0))))


def ridgelet_bnn_covariance(cov: CovarianceModel, input_rule: InputRule, activation: ActivationPair, N: int,
                            sigma_w: float, sigma_b: float, x, x_prime, n_nets: int, seed: int,
                            K: np.ndarray | None = None) -> np.ndarray:
    """``E[phi_0(x)^T Psi K Psi^T phi_0(x')]`` averaged over ``n_nets`` hidden-layer redraws.

    ``x`` may hold several points; the result has one entry per row of ``x``
    (``x_prime`` is a single point). Redraw ``r`` uses the weight-rule
    substream ``("bnn-cov", r)`` of ``seed``.
    """
    if n_nets < 2:
        raise ValueError("n_nets must be >= 2")
    X = as_points(x, input_rule.d)
    Xp = as_points(x_prime, input_rule.d)
    if K is None:
        K = gram(cov, input_rule.nodes)
    total = np.zeros(X.shape[0])
    for r in range(n_nets):
        rule = make_weight_rule(input_rule.d, N, sigma_w, sigma_b, seed, f"bnn-cov-{r}")
        psi = build_psi(rule, input_rule, activation)
        feature = FeatureMap(rule, activation)
        a = feature(X) @ psi.matrix
        ap = feature(Xp) @ psi.matrix
        total += (a @ K @ ap.T)[:, 0]
    return total / n_nets


def iid_bnn_covariance(N: int, sigma_w0: float, sigma_b0: float, sigma_w1: float | None, activation, x, x_prime,
                       n_nets: int, seed: int, method: str = "empirical") -> np.ndarray:
    """Covariance ``E[f(x) f(x')]`` of the i.i.d. prior from ``n_nets`` sampled networks.

    ``method="empirical"`` averages ``f(x) f(x')``; ``method="conditional"``
    integrates out the output weights exactly, averaging
    ``sigma_w1^2 phi_0(x) . phi_0(x')`` over the same hidden layers.
    """
    if n_nets < 2:
        raise ValueError("n_nets must be >= 2")
    if method not in ("empirical", "conditional"):
        raise ValueError(f"unknown method {method!r}")
    total = None
    for r in range(n_nets):
        net = sample_iid_network(N, sigma_w0, sigma_b0, sigma_w1, activation, seed=derive_seed(seed, r))
        X = as_points(x, net.d)
        Xp = as_points(x_prime, net.d)
        if method == "empirical":
            val = net(X) * net(Xp)[0]
        else:
            s2 = net.metadata["sigma_w1"] ** 2
            val = s2 * (net.features(X) @ net.features(Xp)[0])
        total = val if total is None else total + val
    return total / n_nets


@dataclass
class MrmseRecord:
    N: int
    seed: int
    mrmse: float
    argmax: float


@dataclass
class MrmseReport:
    records: list = field(default_factory=list)
    probe_grid: np.ndarray | None = None
    settings: dict = field(default_factory=dict)

    def by_N(self) -> dict:
        out: dict = {}
        for rec in self.records:
            out.setdefault(rec.N, []).append(rec.mrmse)
        return out

    def summary(self) -> dict:
        """``N -> (median, q25, q75)`` over seeds."""
        return {
            N: (float(np.median(v)), float(np.percentile(v, 25)), float(np.percentile(v, 75)))
            for N, v in sorted(self.by_N().items())
        }


def mrmse_report(mean, cov, input_rule, activation, Ns, seeds, sigma_w, sigma_b, probe_grid=None) -> MrmseReport:
    """Closed-form MRMSE for every ``(N, seed)`` pair."""
    probe = default_probe_grid(input_rule.d) if probe_grid is None else as_points(probe_grid, input_rule.d)
    K = gram(cov, input_rule.nodes)
    report = MrmseReport(probe_grid=probe, settings={"sigma_w": sigma_w, "sigma_b": sigma_b, "D": input_rule.D})
    for N in Ns:
        for seed in seeds:
            rule = make_weight_rule(input_rule.d, N, sigma_w, sigma_b, seed)
            psi = build_psi(rule, input_rule, activation)
            feature = FeatureMap(rule, activation)
            prof = rmse_profile(mean, cov, input_rule, psi, feature, probe, K)
            i = int(np.argmax(prof))
            report.records.append(MrmseRecord(int(N), int(seed), float(prof[i]), float(probe[i, 0])))
    return report
