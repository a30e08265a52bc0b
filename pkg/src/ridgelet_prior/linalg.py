"""Dense linear algebra helpers for (nearly) positive semi-definite matrices."""
from __future__ import annotations

import logging

import numpy as np
import scipy.linalg

log = logging.getLogger(__name__)

__all__ = [
    "NotPSDError",
    "PSD_RTOL",
    "check_symmetric",
    "clamped_eigh",
    "psd_sqrt",
    "jittered_cholesky",
]

PSD_RTOL = 1e-8


class NotPSDError(np.linalg.LinAlgError):
    """A matrix expected to be positive semi-definite is not, beyond tolerance."""


def check_symmetric(A: np.ndarray, atol: float = 1e-10, name: str = "matrix") -> None:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    asym = float(np.max(np.abs(A - A.T))) if A.size else 0.0
    if asym > atol * scale:
        raise ValueError(f"{name} is not symmetric (max asymmetry {asym:.3e})")


def clamped_eigh(A: np.ndarray, rtol: float = PSD_RTOL, name: str = "matrix"):
    """Eigendecomposition of a symmetric PSD matrix with tiny negatives set to zero.

    Raises
    ------
    NotPSDError
        If an eigenvalue is below ``-rtol * trace(A)``.
    """
    A = 0.5 * (A + A.T)
    vals, vecs = np.linalg.eigh(A)
    tol = rtol * max(float(np.trace(A)), 0.0)
    if vals.size and vals[0] < -tol:
        raise NotPSDError(f"{name} has eigenvalue {vals[0]:.3e} below -{tol:.3e}")
    return np.clip(vals, 0.0, None), vecs


def psd_sqrt(A: np.ndarray, rtol: float = PSD_RTOL, name: str = "matrix") -> np.ndarray:
    """Factor ``F`` with ``F @ F.T == A`` (up to clamping)."""
    vals, vecs = clamped_eigh(A, rtol, name)
    return vecs * np.sqrt(vals)


def jittered_cholesky(A: np.ndarray, jitter: float = 0.0, retries: int = 3, factor: float = 10.0) -> np.ndarray:
    """Lower Cholesky factor of ``A + jitter * I``, escalating jitter on failure.

    The jitter is multiplied by ``factor`` up to ``retries`` times. Each
    escalation is logged. When ``jitter`` is zero the first retry uses
    ``1e-10`` times the mean diagonal.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0 or (jitter == 0.0 and not A.any()):
        return np.zeros((n, n))
    eye = np.eye(n)
    current = float(jitter)
    for attempt in range(retries + 1):
        try:
            return scipy.linalg.cholesky(A + current * eye, lower=True)
        except np.linalg.LinAlgError:
            if attempt == retries:
                break
            previous = current
            if current == 0.0:
                current = 1e-10 * max(float(np.mean(np.diag(A))), np.finfo(float).tiny)
            else:
                current *= factor
            log.warning("Cholesky failed with jitter %.3e; retrying with %.3e", previous, current)
    smallest = float(np.linalg.eigvalsh(0.5 * (A + A.T))[0])
    raise np.linalg.LinAlgError(
        f"Cholesky failed after {retries} jitter escalations (final jitter {current:.3e}); "
        f"smallest eigenvalue {smallest:.3e}"
    )
