"""The discretised ridgelet operator.

``Psi[i, j] = v_i u_j psi(w_i . x_j + b_i)`` maps function values on the
input grid to output-layer weights, and ``phi(w_i . x + b_i)`` maps those
weights back to a function. Their composition is the operator ``I`` whose
push-forward of a Gaussian process defines the ridgelet prior.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activations import ActivationPair
from .cubature import InputRule, WeightRule
from .kernels import CovarianceModel, MeanModel, as_points, gram

__all__ = ["PsiMatrix", "FeatureMap", "build_psi", "apply_operator", "output_weight_moments"]


@dataclass(frozen=True)
class PsiMatrix:
    matrix: np.ndarray
    weight_rule: WeightRule
    input_rule: InputRule
    pair: ActivationPair

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


@dataclass(frozen=True)
class FeatureMap:
    """``x -> [phi(w_i . x + b_i)]_i`` for the nodes of a weight rule."""

    weight_rule: WeightRule
    pair: ActivationPair

    def __call__(self, x) -> np.ndarray:
        """Feature matrix of shape ``(n_points, N)``."""
        X = as_points(x, self.weight_rule.d)
        return self.pair.phi(X @ self.weight_rule.w.T + self.weight_rule.b)


def build_psi(weight_rule: WeightRule, input_rule: InputRule, pair: ActivationPair) -> PsiMatrix:
    if weight_rule.d != input_rule.d:
        raise ValueError(f"dimension mismatch: weights in R^{weight_rule.d}, nodes in R^{input_rule.d}")
    if pair.d != input_rule.d:
        raise ValueError(f"activation pair built for d={pair.d}, nodes in R^{input_rule.d}")
    pre = weight_rule.w @ input_rule.nodes.T + weight_rule.b[:, None]
    mat = pair.psi(pre)
    mat *= weight_rule.v
    mat *= input_rule.weights[None, :]
    mat.setflags(write=False)
    return PsiMatrix(mat, weight_rule, input_rule, pair)


def apply_operator(psi: PsiMatrix, feature: FeatureMap, f_values, x) -> np.ndarray | float:
    """Evaluate ``I f(x) = phi_0(x)^T Psi f_D``.

    ``f_values`` holds ``f`` at the input-rule nodes in column order. Returns a
    float for a single point and an array otherwise.
    """
    f_values = np.asarray(f_values, dtype=float)
    if f_values.shape != (psi.shape[1],):
        raise ValueError(f"f_values must have length {psi.shape[1]}, got shape {f_values.shape}")
    X = np.asarray(x, dtype=float)
    out = feature(X) @ (psi.matrix @ f_values)
    if X.ndim == 0 or (X.ndim == 1 and feature.weight_rule.d > 1 and X.shape[0] == feature.weight_rule.d):
        return float(out[0])
    return out


def output_weight_moments(psi: PsiMatrix, mean: MeanModel, cov: CovarianceModel, input_rule: InputRule | None = None):
    """Mean ``Psi m_D`` and covariance ``Psi K Psi^T`` of the output-layer weights."""
    rule = psi.input_rule if input_rule is None else input_rule
    m_D = mean(rule.nodes)
    K = gram(cov, rule.nodes)
    P = psi.matrix
    mu = P @ m_D
    Sigma = P @ K @ P.T
    Sigma = 0.5 * (Sigma + Sigma.T)
    return mu, Sigma
