"""Exact Gaussian process sampling and conjugate regression."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .kernels import CovarianceModel, MeanModel, ZeroMean, as_points, gram
from .linalg import jittered_cholesky
from .rng import stream

__all__ = ["GPModel", "sample_paths", "gp_posterior"]


@dataclass(frozen=True)
class GPModel:
    """``GP(mean, cov)``; ``jitter=None`` means ``1e-8`` times the mean Gram diagonal."""

    cov: CovarianceModel
    mean: MeanModel | None = None
    jitter: float | None = None

    def __post_init__(self):
        if self.mean is None:
            object.__setattr__(self, "mean", ZeroMean(self.cov.d))
        if self.jitter is not None and self.jitter < 0:
            raise ValueError("jitter must be non-negative")

    def jitter_for(self, K: np.ndarray) -> float:
        if self.jitter is not None:
            return float(self.jitter)
        return 1e-8 * float(np.mean(np.diag(K))) if K.size else 0.0


def sample_paths(gp: GPModel, points, n_paths: int, seed: int) -> np.ndarray:
    """Draw ``n_paths`` joint samples of the process at ``points``.

    Returns
    -------
    ndarray of shape ``(n_paths, M)``
    """
    X = as_points(points, gp.cov.d)
    K = gram(gp.cov, X)
    L = jittered_cholesky(K, gp.jitter_for(K))
    eps = stream(seed, "gp-paths").standard_normal((n_paths, X.shape[0]))
    return gp.mean(X)[None, :] + eps @ L.T


def gp_posterior(gp: GPModel, train_x, train_y, noise_sd: float, test_x):
    """Posterior mean and pointwise variance under Gaussian noise.

    Returns
    -------
    mean, var : ndarray
    """
    if noise_sd <= 0:
        raise ValueError("noise_sd must be positive")
    Xs = as_points(test_x, gp.cov.d)
    prior_mean = gp.mean(Xs)
    prior_var = gp.cov.diag(Xs)
    train_y = np.asarray(train_y, dtype=float).reshape(-1)
    if train_y.size == 0:
        return prior_mean, prior_var
    X = as_points(train_x, gp.cov.d)
    if X.shape[0] != train_y.size:
        raise ValueError("train_x and train_y lengths differ")
    K = gram(gp.cov, X) + noise_sd**2 * np.eye(X.shape[0])
    L = jittered_cholesky(K, 0.0)
    Ks = gp.cov(X, Xs)
    resid = train_y - gp.mean(X)
    alpha = scipy.linalg.cho_solve((L, True), resid)
    V = scipy.linalg.solve_triangular(L, Ks, lower=True)
    mean = prior_mean + Ks.T @ alpha
    var = prior_var - np.einsum("ij,ij->j", V, V)
    return mean, np.maximum(var, 0.0)
