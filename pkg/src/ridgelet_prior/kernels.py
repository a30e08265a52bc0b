"""Mean and covariance functions used as Gaussian process targets.

Points are handled as 2-D arrays of shape ``(n, d)``. A 1-D array is read as
``n`` scalar inputs (``d = 1``) and a bare float as a single scalar input.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "as_points",
    "MeanModel",
    "ZeroMean",
    "LinearMean",
    "CovarianceModel",
    "SquaredExponential",
    "RationalQuadratic",
    "Periodic",
    "InPaintComposite",
    "eval_kernel",
    "eval_mean",
    "gram",
    "cross_gram",
]


def as_points(x, d: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a float array of shape ``(n, d)``.

    Raises
    ------
    ValueError
        If ``d`` is given and the trailing dimension does not match.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        if d is not None and d > 1 and arr.shape[0] == d:
            arr = arr.reshape(1, d)
        else:
            arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise ValueError(f"points must be at most 2-D, got shape {arr.shape}")
    if d is not None and arr.shape[1] != d:
        raise ValueError(f"dimension mismatch: expected d={d}, got d={arr.shape[1]}")
    return arr


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a positive real, got {value!r}")
    return value


def _sqdist(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - Y[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


# ---------------------------------------------------------------------------
# mean functions


@dataclass(frozen=True)
class MeanModel:
    d: int = 1

    def __call__(self, x) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class ZeroMean(MeanModel):
    def __call__(self, x) -> np.ndarray:
        X = as_points(x, self.d)
        return np.zeros(X.shape[0])


@dataclass(frozen=True)
class LinearMean(MeanModel):
    """``m(x) = a . x`` with no intercept."""

    slope: tuple = (0.0,)

    def __init__(self, slope, d: int | None = None):
        a = np.atleast_1d(np.asarray(slope, dtype=float))
        if d is None:
            d = a.shape[0]
        if a.shape[0] == 1 and d > 1:
            a = np.repeat(a, d)
        if a.shape[0] != d:
            raise ValueError(f"slope has {a.shape[0]} entries but d={d}")
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "slope", tuple(float(v) for v in a))

    def __call__(self, x) -> np.ndarray:
        X = as_points(x, self.d)
        return X @ np.asarray(self.slope)


# ---------------------------------------------------------------------------
# covariance functions


@dataclass(frozen=True)
class CovarianceModel:
    d: int = field(default=1, kw_only=True)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")

    def __call__(self, X, Y=None) -> np.ndarray:
        """Cross-covariance matrix ``[k(X_i, Y_j)]``."""
        X = as_points(X, self.d)
        Y = X if Y is None else as_points(Y, self.d)
        return self._matrix(X, Y)

    def diag(self, X) -> np.ndarray:
        """``k(x, x)`` for every row of ``X``."""
        X = as_points(X, self.d)
        return np.array([self._matrix(X[i : i + 1], X[i : i + 1])[0, 0] for i in range(X.shape[0])])

    def _matrix(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class SquaredExponential(CovarianceModel):
    """``l^2 exp(-|x - x'|^2 / (2 s^2))``."""

    amplitude: float = 1.0
    lengthscale: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        _positive("amplitude", self.amplitude)
        _positive("lengthscale", self.lengthscale)

    def _matrix(self, X, Y):
        return self.amplitude**2 * np.exp(-0.5 * _sqdist(X, Y) / self.lengthscale**2)

    def diag(self, X):
        X = as_points(X, self.d)
        return np.full(X.shape[0], self.amplitude**2)


@dataclass(frozen=True)
class RationalQuadratic(CovarianceModel):
    """``l^2 (1 + |x - x'|^2 / (2 alpha s^2))^(-alpha)``."""

    amplitude: float = 1.0
    alpha: float = 1.0
    lengthscale: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        _positive("amplitude", self.amplitude)
        _positive("alpha", self.alpha)
        _positive("lengthscale", self.lengthscale)

    def _matrix(self, X, Y):
        base = 1.0 + _sqdist(X, Y) / (2.0 * self.alpha * self.lengthscale**2)
        return self.amplitude**2 * base ** (-self.alpha)

    def diag(self, X):
        X = as_points(X, self.d)
        return np.full(X.shape[0], self.amplitude**2)


@dataclass(frozen=True)
class Periodic(CovarianceModel):
    """``l^2 exp(-(2 / s^2) sin^2(pi |x - x'| / p^2))``.

    The period parameter enters squared, so the kernel repeats with
    separation ``p**2``. Only one input dimension is supported.
    """

    amplitude: float = 1.0
    lengthscale: float = 1.0
    period: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.d != 1:
            raise ValueError("Periodic kernel is only defined for d=1")
        _positive("amplitude", self.amplitude)
        _positive("lengthscale", self.lengthscale)
        _positive("period", self.period)

    def _matrix(self, X, Y):
        r = np.abs(X[:, 0][:, None] - Y[:, 0][None, :])
        s = np.sin(np.pi * r / self.period**2)
        return self.amplitude**2 * np.exp(-2.0 * s**2 / self.lengthscale**2)

    def diag(self, X):
        X = as_points(X, self.d)
        return np.full(X.shape[0], self.amplitude**2)


@dataclass(frozen=True)
class InPaintComposite(CovarianceModel):
    """Squared exponential plus a rank-one product-of-cosines term (``d = 2``).

    ``k(x, x') = l^2 exp(-|x - x'|^2 / (2 s^2)) + c(x) c(x')`` with
    ``c(x) = (cos(pi x_1 / 2) + 1)(cos(pi x_2 / 2) + 1)``.
    """

    amplitude: float = 0.1
    lengthscale: float = 0.1
    d: int = field(default=2, kw_only=True)

    def __post_init__(self):
        super().__post_init__()
        if self.d != 2:
            raise ValueError("InPaintComposite kernel is only defined for d=2")
        _positive("amplitude", self.amplitude)
        _positive("lengthscale", self.lengthscale)

    @staticmethod
    def cosine_factor(X: np.ndarray) -> np.ndarray:
        return np.prod(np.cos(0.5 * np.pi * X) + 1.0, axis=1)

    def _matrix(self, X, Y):
        se = self.amplitude**2 * np.exp(-0.5 * _sqdist(X, Y) / self.lengthscale**2)
        return se + np.outer(self.cosine_factor(X), self.cosine_factor(Y))

    def diag(self, X):
        X = as_points(X, self.d)
        return self.amplitude**2 + self.cosine_factor(X) ** 2


# ---------------------------------------------------------------------------
# functional interface


def eval_kernel(model: CovarianceModel, x, x_prime) -> float:
    """Kernel value at a single pair of points."""
    X = as_points(x, model.d)
    Y = as_points(x_prime, model.d)
    if X.shape[0] != 1 or Y.shape[0] != 1:
        raise ValueError("eval_kernel expects single points")
    return float(model(X, Y)[0, 0])


def eval_mean(model: MeanModel, x) -> float:
    X = as_points(x, model.d)
    if X.shape[0] != 1:
        raise ValueError("eval_mean expects a single point")
    return float(model(X)[0])


def gram(model: CovarianceModel, points) -> np.ndarray:
    """Symmetric Gram matrix ``[k(x_i, x_j)]`` on ``points``."""
    X = as_points(points, model.d)
    K = model(X, X)
    # enforce exact symmetry against round-off in the distance computation
    return 0.5 * (K + K.T)


def cross_gram(model: CovarianceModel, X, Y) -> np.ndarray:
    return model(X, Y)
