"""Sampling networks from the ridgelet prior and from the i.i.d. baseline prior."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .activations import ActivationPair
from .cubature import InputRule, WeightRule, make_weight_rule, normalizer
from .kernels import CovarianceModel, MeanModel, as_points, gram
from .linalg import check_symmetric, clamped_eigh
from .rng import stream
from .ridgelet import PsiMatrix, build_psi

__all__ = [
    "GaussianSqrt",
    "RidgeletNetwork",
    "gaussian_sqrt",
    "output_weight_law",
    "sample_ridgelet_network",
    "sample_iid_network",
    "evaluate_network",
]

VIA_K = "via-K-svd"
VIA_SIGMA = "via-Sigma-svd"


@dataclass(frozen=True)
class GaussianSqrt:
    """Factor ``F`` (``N x r``) with ``F F^T = Psi K Psi^T``."""

    factor: np.ndarray
    method: str

    @property
    def rank(self) -> int:
        return self.factor.shape[1]

    def covariance(self) -> np.ndarray:
        return self.factor @ self.factor.T


def gaussian_sqrt(psi, K: np.ndarray, rtol: float = 1e-8) -> GaussianSqrt:
    """Square root of ``Psi K Psi^T`` through the cheaper of two decompositions.

    With ``N > D`` the ``D x D`` kernel matrix is decomposed as ``A V A^T`` and
    the factor is ``Psi A V^(1/2)``; otherwise ``Psi K Psi^T = B W B^T`` is
    decomposed directly and the factor is ``B W^(1/2)``. Eigenvalues between
    ``-rtol * trace`` and zero are clamped to zero.
    """
    P = psi.matrix if isinstance(psi, PsiMatrix) else np.asarray(psi, dtype=float)
    K = np.asarray(K, dtype=float)
    check_symmetric(K, name="K")
    N, D = P.shape
    if K.shape != (D, D):
        raise ValueError(f"K must be {D}x{D}, got {K.shape}")
    if N > D:
        vals, vecs = clamped_eigh(K, rtol, name="K")
        return GaussianSqrt(P @ (vecs * np.sqrt(vals)), VIA_K)
    vals, vecs = clamped_eigh(P @ K @ P.T, rtol, name="Psi K Psi^T")
    return GaussianSqrt(vecs * np.sqrt(vals), VIA_SIGMA)


def output_weight_law(psi: PsiMatrix, mean: MeanModel, cov: CovarianceModel, K: np.ndarray | None = None):
    """Mean ``Psi m_D`` and a square root of ``Psi K Psi^T``."""
    nodes = psi.input_rule.nodes
    if K is None:
        K = gram(cov, nodes)
    mu = psi.matrix @ mean(nodes)
    return mu, gaussian_sqrt(psi, K)


@dataclass
class RidgeletNetwork:
    """A fully connected network ``x -> out . phi(W_L ... phi(W_1 x + b_1) ... + b_L)``.

    ``hidden`` holds ``(W, b)`` per hidden layer with ``W`` of shape
    ``(width, fan_in)``.
    """

    hidden: list
    output: np.ndarray
    activation: ActivationPair
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        fan_in = None
        for W, b in self.hidden:
            if W.ndim != 2 or b.shape != (W.shape[0],):
                raise ValueError("hidden layer shapes are inconsistent")
            if fan_in is not None and W.shape[1] != fan_in:
                raise ValueError(f"layer expects fan-in {W.shape[1]}, previous width is {fan_in}")
            fan_in = W.shape[0]
        if self.output.shape != (fan_in,):
            raise ValueError(f"output weights must have shape ({fan_in},), got {self.output.shape}")

    @property
    def d(self) -> int:
        return self.hidden[0][0].shape[1]

    @property
    def widths(self) -> list[int]:
        return [W.shape[0] for W, _ in self.hidden]

    def features(self, x) -> np.ndarray:
        """Last hidden layer activations, shape ``(n_points, N_L)``."""
        h = as_points(x, self.d)
        for W, b in self.hidden:
            h = self.activation.phi(h @ W.T + b)
        return h

    def __call__(self, x) -> np.ndarray:
        return self.features(x) @ self.output

    def with_output(self, output) -> "RidgeletNetwork":
        return RidgeletNetwork(self.hidden, np.asarray(output, dtype=float), self.activation, dict(self.metadata))

    # -- serialisation -------------------------------------------------------

    def to_record(self) -> dict:
        """Flat JSON-ready record: shapes plus row-major arrays plus metadata."""
        layers = []
        for W, b in self.hidden:
            layers.append({"W_shape": list(W.shape), "W": W.ravel().tolist(), "b": b.tolist()})
        return {
            "format": "ridgelet-network/1",
            "activation": self.activation.kind,
            "d": self.d,
            "layers": layers,
            "output": self.output.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_record(cls, record: dict) -> "RidgeletNetwork":
        if record.get("format") != "ridgelet-network/1":
            raise ValueError(f"unsupported network record format {record.get('format')!r}")
        hidden = []
        for layer in record["layers"]:
            W = np.asarray(layer["W"], dtype=float).reshape(layer["W_shape"])
            hidden.append((W, np.asarray(layer["b"], dtype=float)))
        pair = ActivationPair(record["activation"], int(record["d"]))
        return cls(hidden, np.asarray(record["output"], dtype=float), pair, dict(record.get("metadata", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_record())

    @classmethod
    def loads(cls, text: str) -> "RidgeletNetwork":
        return cls.from_record(json.loads(text))


def evaluate_network(net: RidgeletNetwork, x) -> np.ndarray | float:
    X = np.asarray(x, dtype=float)
    out = net(X)
    if X.ndim == 0 or (X.ndim == 1 and net.d > 1 and X.shape[0] == net.d):
        return float(out[0])
    return out


def _draw_gaussian(mu: np.ndarray, root: GaussianSqrt, rng: np.random.Generator, size: int | None = None):
    if size is None:
        return mu + root.factor @ rng.standard_normal(root.rank)
    return mu + rng.standard_normal((size, root.rank)) @ root.factor.T


def sample_ridgelet_network(
    mean: MeanModel,
    cov: CovarianceModel,
    input_rule: InputRule,
    activation: ActivationPair,
    layer_widths: Sequence[int],
    sigma_w: float,
    sigma_b: float,
    seed: int,
    K: np.ndarray | None = None,
) -> RidgeletNetwork:
    """Draw one network from the ridgelet prior.

    Input-layer weights and every bias are Gaussian with bandwidths
    ``sigma_w`` and ``sigma_b``. Each later weight matrix has rows drawn from
    ``N(Psi m_D, Psi K Psi^T)``, where ``Psi`` is built from the layer below
    with ``psi`` evaluated at that layer's pre-activations on the input
    grid. Randomness comes from the substreams ``("layer<l>", "w"|"b")``.

    Parameters
    ----------
    K : ndarray, optional
        Precomputed Gram matrix on the input nodes.
    """
    widths = [int(n) for n in layer_widths]
    if not widths or min(widths) < 1:
        raise ValueError("layer_widths must be a non-empty list of positive integers")
    d = input_rule.d
    if K is None:
        K = gram(cov, input_rule.nodes)
    m_D = mean(input_rule.nodes)
    Z = normalizer(d, sigma_w, sigma_b)

    rule0 = make_weight_rule(d, widths[0], sigma_w, sigma_b, seed, "layer0")
    hidden = [(rule0.w, rule0.b)]
    psi = build_psi(rule0, input_rule, activation)
    # activations of the current top hidden layer at the grid nodes
    g = activation.phi(input_rule.nodes @ rule0.w.T + rule0.b)
    for layer, width in enumerate(widths[1:], start=1):
        root = gaussian_sqrt(psi, K)
        rng_w = stream(seed, f"layer{layer}", "w")
        W = _draw_gaussian(psi.matrix @ m_D, root, rng_w, size=width)
        b = stream(seed, f"layer{layer}", "b").normal(0.0, sigma_b, size=width)
        hidden.append((W, b))
        pre = g @ W.T + b
        mat = activation.psi(pre.T) * (Z / width) * input_rule.weights[None, :]
        psi = PsiMatrix(mat, WeightRule(W, b, sigma_w, sigma_b, Z), input_rule, activation)
        g = activation.phi(pre)
    root = gaussian_sqrt(psi, K)
    out = _draw_gaussian(psi.matrix @ m_D, root, stream(seed, "output", "w"))
    meta = {
        "prior": "ridgelet",
        "seed": int(seed),
        "sigma_w": float(sigma_w),
        "sigma_b": float(sigma_b),
        "widths": widths,
        "D": input_rule.D,
        "sqrt_method": root.method,
    }
    return RidgeletNetwork(hidden, out, activation, meta)


def sample_iid_network(
    N: int,
    sigma_w0: float = 5.0,
    sigma_b0: float = 36.0,
    sigma_w1: float | None = None,
    activation: ActivationPair | str = "tanh",
    seed: int = 0,
    d: int = 1,
) -> RidgeletNetwork:
    """One-hidden-layer network with independent Gaussian parameters.

    All scales are standard deviations; ``sigma_w1`` defaults to ``0.1 / sqrt(N)``.
    """
    if isinstance(activation, str):
        activation = ActivationPair(activation, d)
    d = activation.d
    if sigma_w1 is None:
        sigma_w1 = 0.1 / math.sqrt(N)
    rule = make_weight_rule(d, N, sigma_w0, sigma_b0, seed, "layer0")
    out = stream(seed, "output", "w").normal(0.0, 1.0, size=N) * sigma_w1
    meta = {
        "prior": "iid",
        "seed": int(seed),
        "sigma_w0": float(sigma_w0),
        "sigma_b0": float(sigma_b0),
        "sigma_w1": float(sigma_w1),
        "widths": [int(N)],
    }
    return RidgeletNetwork([(rule.w, rule.b)], out, activation, meta)
