"""Activation functions and their closed-form ridgelet functions.

Each activation ``phi`` is paired with a rapidly decaying ``psi`` so that the
ridgelet transform built from ``psi`` is inverted by the dual transform built
from ``phi``. Every ``psi`` is a constant times a derivative of a Gaussian-type
function, evaluated exactly through probabilists' Hermite polynomials:

* tanh: ``d^(d+1+r)/dz^(d+1+r) [exp(-z^2/2) sin(pi z/2)]``, ``r = 1 - d mod 2``
* relu: ``d^(d+r+2)/dz^(d+r+2) exp(-z^2/2)``, ``r = d mod 2``
* gaussian: ``d^(d+r)/dz^(d+r) exp(-z^2/2)``, ``r = d mod 2``

The constant is fixed in closed form so that, with the unitary Fourier
transform, ``(2 pi)^(d/2) int |xi|^(-d) conj(psi_hat) phi_hat dxi = 1``.
Under that condition the dual transform exactly inverts the transform, so
the reconstruction ``I f`` converges to ``f`` with unit gain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.hermite_e import herme2poly
from numpy.polynomial.polynomial import polyval

__all__ = [
    "ACTIVATIONS",
    "MAX_GAUSSIAN_DERIVATIVE",
    "ActivationPair",
    "hermite_e",
    "gaussian_derivative",
    "phi",
    "psi",
    "check_reconstruction",
]

ACTIVATIONS = ("tanh", "relu", "gaussian")
MAX_GAUSSIAN_DERIVATIVE = 32
MAX_INPUT_DIMENSION = 3


def hermite_e(n: int, z) -> np.ndarray:
    """Probabilists' Hermite polynomial ``He_n(z)`` via the three-term recurrence."""
    z = np.asarray(z, dtype=float)
    h_prev = np.ones_like(z)
    if n == 0:
        return h_prev
    h = z.copy()
    for k in range(1, n):
        h_prev, h = h, z * h - k * h_prev
    return h


def gaussian_derivative(n: int, z) -> np.ndarray | float:
    """``d^n/dz^n exp(-z^2/2) = (-1)^n He_n(z) exp(-z^2/2)``.

    Parameters
    ----------
    n : int
        Derivative order, ``0 <= n <= 32``.
    z : float or array_like
    """
    if int(n) != n or n < 0 or n > MAX_GAUSSIAN_DERIVATIVE:
        raise ValueError(f"derivative order must be an integer in [0, {MAX_GAUSSIAN_DERIVATIVE}], got {n!r}")
    n = int(n)
    zz = np.asarray(z, dtype=float)
    out = (-1.0) ** n * hermite_e(n, zz) * np.exp(-0.5 * zz**2)
    return float(out) if out.ndim == 0 else out


def _tanh_psi_factory(d: int) -> tuple[int, float, Callable]:
    r = 1 - d % 2
    order = d + 1 + r
    moment = 2.0 if r == 0 else math.sqrt(2 * math.pi)
    pref = (-1) ** (order // 2) * math.exp(math.pi**2 / 8) / (math.pi * (2 * math.pi) ** ((d - 1) / 2) * moment)
    # Leibniz rule for d^n [g(z) sin(pi z / 2)] with g the Gaussian; the
    # k-th sine derivative is (pi/2)^k sin(pi z / 2 + k pi / 2), so the result
    # collapses to g(z) [P(z) sin(pi z / 2) + Q(z) cos(pi z / 2)]
    sin_poly = np.zeros(order + 1)
    cos_poly = np.zeros(order + 1)
    for k in range(order + 1):
        m = order - k
        term = np.zeros(m + 1)
        term[m] = math.comb(order, k) * (math.pi / 2) ** k * (-1.0) ** m
        mono = herme2poly(term)
        sign = 1.0 if k % 4 < 2 else -1.0
        target = sin_poly if k % 2 == 0 else cos_poly
        target[: mono.size] += sign * mono

    def psi_fn(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        # exp(-z^2/2) underflows to zero well before |z| = 40
        live = np.abs(z) < 40.0
        t = z[live]
        arg = 0.5 * np.pi * t
        total = polyval(t, sin_poly) * np.sin(arg) + polyval(t, cos_poly) * np.cos(arg)
        out[live] = pref * total * np.exp(-0.5 * t * t)
        return out if out.ndim else float(out)

    return order, pref, psi_fn


def _relu_psi_factory(d: int) -> tuple[int, float, Callable]:
    r = d % 2
    order = d + r + 2
    moment = math.sqrt(2 * math.pi) if r == 0 else 2.0
    pref = -((-1) ** (order // 2)) / ((2 * math.pi) ** ((d - 1) / 2) * moment)
    return order, pref, lambda z: pref * gaussian_derivative(order, z)


def _gaussian_psi_factory(d: int) -> tuple[int, float, Callable]:
    r = d % 2
    order = d + r
    moment = math.sqrt(math.pi) if r == 0 else 1.0
    pref = (-1) ** (order // 2) * (2 * math.pi) ** (-d / 2) / moment
    return order, pref, lambda z: pref * gaussian_derivative(order, z)


_PHI = {
    "tanh": np.tanh,
    "relu": lambda z: np.maximum(z, 0.0),
    "gaussian": lambda z: np.exp(-0.5 * np.asarray(z, dtype=float) ** 2),
}

_PSI_FACTORY = {
    "tanh": _tanh_psi_factory,
    "relu": _relu_psi_factory,
    "gaussian": _gaussian_psi_factory,
}


@dataclass(frozen=True)
class ActivationPair:
    """An activation and its ridgelet function for inputs in ``R^d``.

    Parameters
    ----------
    kind : {"tanh", "relu", "gaussian"}
    d : int
        Input dimension, 1 to 3.
    """

    kind: str
    d: int = 1

    def __post_init__(self):
        kind = str(self.kind).lower()
        if kind not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.kind!r}; expected one of {ACTIVATIONS}")
        if int(self.d) != self.d or not 1 <= self.d <= MAX_INPUT_DIMENSION:
            raise ValueError(f"input dimension must be in 1..{MAX_INPUT_DIMENSION}, got {self.d!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "d", int(self.d))
        order, pref, fn = _PSI_FACTORY[kind](self.d)
        object.__setattr__(self, "_psi_order", order)
        object.__setattr__(self, "_psi_prefactor", pref)
        object.__setattr__(self, "_psi_fn", fn)

    @property
    def parity(self) -> int:
        """The parity integer ``r`` of the ridgelet table for this ``d``."""
        if self.kind == "tanh":
            return 1 - self.d % 2
        return self.d % 2

    @property
    def psi_order(self) -> int:
        """Order of the Gaussian-type derivative appearing in ``psi``."""
        return self._psi_order

    @property
    def psi_prefactor(self) -> float:
        """Constant multiplying the derivative in ``psi``."""
        return self._psi_prefactor

    def phi(self, z):
        return _PHI[self.kind](z)

    def psi(self, z):
        return self._psi_fn(z)

    @property
    def lipschitz(self) -> float:
        return math.exp(-0.5) if self.kind == "gaussian" else 1.0


def phi(pair: ActivationPair, z):
    return pair.phi(z)


def psi(pair: ActivationPair, z):
    return pair.psi(z)


def check_reconstruction(
    pair: ActivationPair,
    test_fn: Callable,
    sigma_w: float,
    sigma_b: float,
    D: int,
    N: int,
    seed: int,
    S: float = 6.0,
    x_half: float = 5.0,
    n_probe: int = 201,
) -> float:
    """Sup-norm error of the discretised reconstruction ``I f`` on ``[-x_half, x_half]``.

    Builds the input grid on ``[-S, S]`` (mollified when ``S > x_half``), draws
    ``N`` weight nodes, and compares ``f`` with its network approximation on
    ``n_probe`` equispaced points.
    """
    from .cubature import make_input_rule, make_mollifier, make_weight_rule
    from .ridgelet import FeatureMap, apply_operator, build_psi

    if pair.d != 1:
        raise ValueError("check_reconstruction supports d=1 only")
    moll = make_mollifier(x_half, S) if S > x_half else None
    inputs = make_input_rule(1, D, S, moll)
    weights = make_weight_rule(1, N, sigma_w, sigma_b, seed)
    psi_mat = build_psi(weights, inputs, pair)
    feature = FeatureMap(weights, pair)
    f_values = np.asarray(test_fn(inputs.nodes[:, 0]), dtype=float)
    probe = np.linspace(-x_half, x_half, n_probe)
    approx = apply_operator(psi_mat, feature, f_values, probe)
    return float(np.max(np.abs(np.asarray(test_fn(probe), dtype=float) - approx)))
