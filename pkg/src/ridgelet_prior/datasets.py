"""Tabular data ingestion and bundled synthetic data sets."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .kernels import InPaintComposite
from .rng import stream

__all__ = [
    "DatasetError",
    "MissingColumnError",
    "NonNumericError",
    "EmptyDatasetError",
    "ZeroVarianceError",
    "Dataset",
    "load_csv",
    "synthetic_series",
    "synthetic_image",
    "SERIES",
]

X_HALF = 5.0


class DatasetError(ValueError):
    pass


class MissingColumnError(DatasetError):
    pass


class NonNumericError(DatasetError):
    pass


class EmptyDatasetError(DatasetError):
    pass


class ZeroVarianceError(DatasetError):
    pass


@dataclass
class Dataset:
    """Inputs ``x`` (``n x d``) and response ``y`` with the affine maps that produced them.

    ``x = x_scale * (raw_x - x_center)`` column-wise and
    ``y = (raw_y - y_mean) / y_sd``; identity maps when not standardized.
    """

    x: np.ndarray
    y: np.ndarray
    x_center: np.ndarray
    x_scale: np.ndarray
    y_mean: float = 0.0
    y_sd: float = 1.0

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def to_raw_x(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) / self.x_scale + self.x_center

    def from_raw_x(self, raw) -> np.ndarray:
        return self.x_scale * (np.asarray(raw, dtype=float) - self.x_center)

    def to_raw_y(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) * self.y_sd + self.y_mean


def _parse(value: str, column: str, row: int) -> float:
    try:
        out = float(value)
    except ValueError:
        raise NonNumericError(f"non-numeric cell {value!r} in column {column!r}, data row {row}") from None
    if not math.isfinite(out):
        raise NonNumericError(f"non-finite cell {value!r} in column {column!r}, data row {row}")
    return out


def load_csv(path, x_columns=("x",), y_column: str = "y", standardize: bool = True) -> Dataset:
    """Read a headered CSV of reals.

    With ``standardize`` each input column is mapped affinely onto
    ``[-5, 5]`` and the response to zero mean and unit (population) sd.

    Raises
    ------
    EmptyDatasetError, MissingColumnError, NonNumericError, ZeroVarianceError
    """
    x_columns = [x_columns] if isinstance(x_columns, str) else list(x_columns)
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader, None)
        if header is None:
            raise EmptyDatasetError(f"{path}: empty file")
        header = [h.strip() for h in header]
        missing = [c for c in [*x_columns, y_column] if c not in header]
        if missing:
            raise MissingColumnError(f"{path}: missing column(s) {', '.join(missing)}")
        idx = [header.index(c) for c in x_columns]
        iy = header.index(y_column)
        xs, ys = [], []
        for r, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < len(header):
                raise NonNumericError(f"{path}: data row {r} has {len(row)} cells, expected {len(header)}")
            xs.append([_parse(row[i].strip(), x_columns[k], r) for k, i in enumerate(idx)])
            ys.append(_parse(row[iy].strip(), y_column, r))
    if not ys:
        raise EmptyDatasetError(f"{path}: no data rows")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    d = x.shape[1]
    if not standardize:
        return Dataset(x, y, np.zeros(d), np.ones(d))
    lo, hi = x.min(axis=0), x.max(axis=0)
    sd = float(y.std())
    if np.any(hi <= lo):
        raise ZeroVarianceError(f"{path}: an input column has zero variance")
    if not sd > 0:
        raise ZeroVarianceError(f"{path}: response column {y_column!r} has zero variance")
    center = 0.5 * (lo + hi)
    scale = 2.0 * X_HALF / (hi - lo)
    xt = scale * (x - center)
    # pin the endpoints so the range is exactly [-5, 5]
    xt[x == lo] = -X_HALF
    xt[x == hi] = X_HALF
    mu = float(y.mean())
    return Dataset(xt, (y - mu) / sd, center, scale, mu, sd)


# trend slope, sinusoid amplitude, period parameter p (period p^2), noise sd
SERIES = {
    "co2": (0.06, 1.0, 1.8, 0.085),
    "airline": (0.2, 1.0, 1.75, 0.125),
}


def synthetic_series(kind: str = "co2", seed: int = 0, n: int = 43) -> Dataset:
    """Linear trend plus a sinusoid plus noise on ``n`` equispaced inputs in ``[-5, 5]``.

    The sinusoid has period ``p^2``, matching the periodic covariance model
    with the same ``p``; the response is standardized.
    """
    if kind not in SERIES:
        raise ValueError(f"unknown series {kind!r}; expected one of {', '.join(SERIES)}")
    slope, amp, p, noise = SERIES[kind]
    x = np.linspace(-X_HALF, X_HALF, n)
    raw = slope * x + amp * np.sin(2.0 * np.pi * x / p**2) + noise * stream(seed, "data", kind).standard_normal(n)
    mu, sd = float(raw.mean()), float(raw.std())
    return Dataset(x.reshape(-1, 1), (raw - mu) / sd, np.zeros(1), np.ones(1), mu, sd)


def synthetic_image(size: int = 20, mask_half_width: float = 1.5, noise_sd: float = 0.1, seed: int = 0):
    """Pixel image on ``[-5, 5]^2`` built from the composite kernel's cosine modes.

    Returns
    -------
    X : ndarray ``(size^2, 2)``
        Pixel locations, row-major.
    clean : ndarray
        Noise-free pixel values, ``c(x) / 4`` with ``c`` the cosine product.
    observed : ndarray of bool
        False on the censored central square ``max|x_i| < mask_half_width``.
    noisy : ndarray
        ``clean`` plus i.i.d. ``N(0, noise_sd^2)`` noise (used on observed pixels).
    """
    axis = np.linspace(-X_HALF, X_HALF, size)
    g1, g2 = np.meshgrid(axis, axis, indexing="ij")
    X = np.stack([g1.ravel(), g2.ravel()], axis=1)
    clean = InPaintComposite.cosine_factor(X) / 4.0
    observed = np.max(np.abs(X), axis=1) >= mask_half_width
    noisy = clean + noise_sd * stream(seed, "data", "image").standard_normal(clean.size)
    return X, clean, observed, noisy
