"""Cubature rules for the ridgelet transform and its dual.

The input-space rule is a Cartesian product of left-endpoint rules on
``[-S, S]^d`` whose weights are damped by a smooth mollifier; the weight-space
rule is plain Monte Carlo from Gaussian densities with bandwidths
``sigma_w`` and ``sigma_b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import as_points
from .rng import stream

__all__ = [
    "Mollifier",
    "InputRule",
    "WeightRule",
    "make_mollifier",
    "make_input_rule",
    "make_weight_rule",
    "normalizer",
]


def _g(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _h(t):
    g0 = _g(t)
    return g0 / (g0 + _g(1.0 - t))


@dataclass(frozen=True)
class Mollifier:
    """Smooth cut-off equal to 1 on ``[-x_half, x_half]^d`` and 0 outside ``[-S, S]^d``.

    Each axis contributes ``1 - h((t^2 - a^2) / (1 - a^2))`` with ``t = x / S``
    and ``a = x_half / S``.
    """

    x_half: float
    S: float

    @property
    def a(self) -> float:
        return self.x_half / self.S

    def __call__(self, x) -> np.ndarray:
        X = np.asarray(x, dtype=float)
        if X.ndim <= 1:
            X = X.reshape(-1, 1) if X.ndim == 1 else X.reshape(1, 1)
        a = self.a
        t = X / self.S
        factors = 1.0 - _h((t**2 - a**2) / (1.0 - a**2))
        return np.prod(factors, axis=1)


def make_mollifier(x_half: float, S: float) -> Mollifier:
    x_half, S = float(x_half), float(S)
    if not 0 < x_half < S:
        raise ValueError(f"mollifier requires 0 < x_half < S, got x_half={x_half}, S={S}")
    return Mollifier(x_half, S)


@dataclass(frozen=True)
class InputRule:
    """Grid nodes ``x_j`` (``D x d``) with weights ``u_j``."""

    nodes: np.ndarray
    weights: np.ndarray
    S: float
    counts: tuple
    mollifier: Mollifier | None = None

    @property
    def d(self) -> int:
        return self.nodes.shape[1]

    @property
    def D(self) -> int:
        return self.nodes.shape[0]


def make_input_rule(d: int, per_axis_counts, S: float, mollifier: Mollifier | None = None) -> InputRule:
    """Left-endpoint product grid on ``[-S, S]^d``.

    Parameters
    ----------
    d : int
        Input dimension.
    per_axis_counts : int or sequence of int
        Nodes per axis; an int is used for every axis.
    S : float
        Half-width of the cube.
    mollifier : Mollifier, optional
        Weight damping; without it every weight is ``(2S)^d / D``.
    """
    if np.ndim(per_axis_counts) == 0:
        counts = (int(per_axis_counts),) * d
    else:
        counts = tuple(int(c) for c in per_axis_counts)
    if len(counts) != d:
        raise ValueError(f"need {d} per-axis counts, got {len(counts)}")
    if min(counts) < 2:
        raise ValueError("per-axis counts must be >= 2")
    S = float(S)
    if S <= 0:
        raise ValueError("S must be positive")
    axes = [-S + (2.0 * S / c) * np.arange(c) for c in counts]
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    D = nodes.shape[0]
    base = (2.0 * S) ** d / D
    if mollifier is None:
        weights = np.full(D, base)
    else:
        weights = base * mollifier(nodes)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return InputRule(nodes, weights, S, counts, mollifier)


def normalizer(d: int, sigma_w: float, sigma_b: float) -> float:
    """Total mass ``Z`` of the finite-bandwidth measure for Gaussian densities."""
    return math.sqrt(2.0 * math.pi) * sigma_w**d * sigma_b


@dataclass(frozen=True)
class WeightRule:
    """Monte Carlo nodes ``(w_i, b_i)`` with the common weight ``v = Z / N``."""

    w: np.ndarray
    b: np.ndarray
    sigma_w: float
    sigma_b: float
    Z: float
    seed: int | None = None

    @property
    def N(self) -> int:
        return self.w.shape[0]

    @property
    def d(self) -> int:
        return self.w.shape[1]

    @property
    def v(self) -> float:
        return self.Z / self.N

    def with_nodes(self, w, b) -> "WeightRule":
        """Same bandwidths and normaliser, different node set."""
        w = as_points(w, self.d)
        b = np.asarray(b, dtype=float).reshape(-1)
        return WeightRule(w, b, self.sigma_w, self.sigma_b, self.Z, None)


def make_weight_rule(d: int, N: int, sigma_w: float, sigma_b: float, seed: int, stream_name: str = "layer0") -> WeightRule:
    """Draw ``w_i ~ N(0, sigma_w^2 I_d)`` and ``b_i ~ N(0, sigma_b^2)``.

    Weights and biases come from the substreams ``(stream_name, "w")`` and
    ``(stream_name, "b")`` of ``seed``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if sigma_w <= 0 or sigma_b <= 0:
        raise ValueError("bandwidths must be positive")
    w = stream(seed, stream_name, "w").normal(0.0, sigma_w, size=(N, d))
    b = stream(seed, stream_name, "b").normal(0.0, sigma_b, size=N)
    return WeightRule(w, b, float(sigma_w), float(sigma_b), normalizer(d, sigma_w, sigma_b), int(seed))
