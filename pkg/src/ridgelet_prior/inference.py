"""Two-stage posterior sampling for one-hidden-layer networks.

Conditional on the hidden-layer weights and biases the regression model is
linear in the output weights, which are Gaussian a priori. The output
weights are therefore integrated out analytically: elliptical slice sampling
targets the marginal posterior of the hidden layer, and each retained
hidden-layer state is paired with an exact draw of the output weights from
their Gaussian conditional.

Covariances of the output weights are always handled through a factor
``Sigma = F F^T`` (``N x r``), so that only ``n x n`` and ``r``-sized systems are
ever solved.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .activations import ActivationPair
from .cubature import InputRule, WeightRule, normalizer
from .kernels import CovarianceModel, MeanModel, ZeroMean, as_points, gram
from .linalg import clamped_eigh, jittered_cholesky
from .ridgelet import build_psi
from .rng import stream

log = logging.getLogger(__name__)

__all__ = [
    "RidgeletPriorSpec",
    "IIDPriorSpec",
    "RegressionProblem",
    "HiddenState",
    "PosteriorSample",
    "PosteriorChain",
    "elliptical_slice",
    "marginal_loglik",
    "ess_step",
    "linear_gaussian_conditional",
    "sample_linear_gaussian_conditional",
    "conditional_output_weights",
    "run_posterior",
    "posterior_predictive",
]

MAX_SHRINK = 1000


# ---------------------------------------------------------------------------
# prior specifications


@dataclass
class RidgeletPriorSpec:
    """Ridgelet prior: hidden layer from the weight-space cubature, output
    weights ``N(0, Psi K Psi^T)``."""

    cov: CovarianceModel
    input_rule: InputRule
    activation: ActivationPair
    N: int
    sigma_w: float = 5.0
    sigma_b: float = 36.0
    name: str = "ridgelet"

    def __post_init__(self):
        vals, vecs = clamped_eigh(gram(self.cov, self.input_rule.nodes), name="K")
        self._k_root = vecs * np.sqrt(vals)
        self._Z = normalizer(self.input_rule.d, self.sigma_w, self.sigma_b)

    @property
    def d(self) -> int:
        return self.input_rule.d

    @property
    def hidden_scales(self) -> tuple[float, float]:
        return self.sigma_w, self.sigma_b

    def psi_matrix(self, state: "HiddenState") -> np.ndarray:
        rule = WeightRule(state.w, state.b, self.sigma_w, self.sigma_b, self._Z)
        return build_psi(rule, self.input_rule, self.activation).matrix

    def factor_rows(self, state: "HiddenState", Phi: np.ndarray) -> np.ndarray:
        """``Phi @ F`` for the output-weight covariance factor ``F``."""
        return (Phi @ self.psi_matrix(state)) @ self._k_root

    def factor_apply(self, state: "HiddenState", z: np.ndarray) -> np.ndarray:
        """``F @ z``."""
        return self.psi_matrix(state) @ (self._k_root @ z)

    def factor(self, state: "HiddenState") -> np.ndarray:
        return self.psi_matrix(state) @ self._k_root

    def rank(self) -> int:
        return self._k_root.shape[1]


@dataclass
class IIDPriorSpec:
    """All parameters independent; scales are standard deviations."""

    N: int
    activation: ActivationPair
    sigma_w0: float = 5.0
    sigma_b0: float = 36.0
    sigma_w1: float | None = None
    name: str = "iid"

    def __post_init__(self):
        if self.sigma_w1 is None:
            self.sigma_w1 = 0.1 / math.sqrt(self.N)

    @property
    def d(self) -> int:
        return self.activation.d

    @property
    def hidden_scales(self) -> tuple[float, float]:
        return self.sigma_w0, self.sigma_b0

    def factor_rows(self, state, Phi):
        return self.sigma_w1 * Phi

    def factor_apply(self, state, z):
        return self.sigma_w1 * z

    def factor(self, state):
        return self.sigma_w1 * np.eye(self.N)

    def rank(self) -> int:
        return self.N


@dataclass
class RegressionProblem:
    """``y = m(x) + f(x) + noise`` with ``f`` a one-hidden-layer network."""

    train_x: np.ndarray
    train_y: np.ndarray
    prior: RidgeletPriorSpec | IIDPriorSpec
    noise_sd: float
    mean: MeanModel | None = None

    def __post_init__(self):
        self.train_x = as_points(self.train_x, self.prior.d)
        self.train_y = np.asarray(self.train_y, dtype=float).reshape(-1)
        if self.train_x.shape[0] < 1 or self.train_x.shape[0] != self.train_y.size:
            raise ValueError("need n >= 1 training points with matching x and y")
        if not self.noise_sd > 0:
            raise ValueError("noise_sd must be positive")
        if self.mean is None:
            self.mean = ZeroMean(self.prior.d)
        self.residual = self.train_y - self.mean(self.train_x)

    @property
    def n(self) -> int:
        return self.train_y.size

    @property
    def activation(self) -> ActivationPair:
        return self.prior.activation

    def features(self, state: "HiddenState", x=None) -> np.ndarray:
        X = self.train_x if x is None else as_points(x, self.prior.d)
        return self.activation.phi(X @ state.w.T + state.b)


# ---------------------------------------------------------------------------
# hidden-layer states


@dataclass
class HiddenState:
    w: np.ndarray
    b: np.ndarray
    loglik: float = float("nan")

    def to_vector(self, scales) -> np.ndarray:
        """Whitened coordinates: ``(w / sigma_w, b / sigma_b)`` stacked."""
        sw, sb = scales
        return np.concatenate([self.w.ravel() / sw, self.b / sb])

    @classmethod
    def from_vector(cls, eta: np.ndarray, N: int, d: int, scales, loglik=float("nan")) -> "HiddenState":
        sw, sb = scales
        return cls(eta[: N * d].reshape(N, d) * sw, eta[N * d:] * sb, loglik)


def prior_state(problem: RegressionProblem, rng: np.random.Generator) -> HiddenState:
    N, d = problem.prior.N, problem.prior.d
    eta = rng.standard_normal(N * d + N)
    state = HiddenState.from_vector(eta, N, d, problem.prior.hidden_scales)
    state.loglik = marginal_loglik(problem, state)
    return state


# ---------------------------------------------------------------------------
# likelihood and conditionals


def marginal_loglik(problem: RegressionProblem, state: HiddenState) -> float:
    """``-1/2 log det Sigma_* - 1/2 y~^T Sigma_*^{-1} y~`` (additive constant dropped).

    ``Sigma_* = Phi Sigma Phi^T + noise^2 I`` with ``Phi`` the hidden-layer
    features at the training inputs.
    """
    Phi = problem.features(state)
    B = problem.prior.factor_rows(state, Phi)
    C = B @ B.T
    C[np.diag_indices_from(C)] += problem.noise_sd**2
    L = jittered_cholesky(C)
    alpha = scipy.linalg.solve_triangular(L, problem.residual, lower=True)
    return float(-np.sum(np.log(np.diag(L))) - 0.5 * alpha @ alpha)


def linear_gaussian_conditional(factor: np.ndarray, Phi: np.ndarray, y: np.ndarray, noise_sd: float,
                                prior_mean: np.ndarray | None = None):
    """Moments of ``w | y`` for ``y = Phi w + e``, ``w ~ N(mu, F F^T)``, ``e ~ N(0, s^2 I)``.

    Uses the Woodbury form ``Sigma_** = Sigma - Sigma Phi^T C^{-1} Phi Sigma``
    with ``C = Phi Sigma Phi^T + s^2 I``, so ``Sigma`` is never inverted.
    """
    F = np.asarray(factor, dtype=float)
    mu = np.zeros(F.shape[0]) if prior_mean is None else np.asarray(prior_mean, dtype=float)
    B = Phi @ F
    C = B @ B.T
    C[np.diag_indices_from(C)] += noise_sd**2
    L = jittered_cholesky(C)
    G = F @ B.T  # Sigma Phi^T
    V = scipy.linalg.solve_triangular(L, G.T, lower=True)
    mean = mu + G @ scipy.linalg.cho_solve((L, True), y - Phi @ mu)
    cov = F @ F.T - V.T @ V
    return mean, 0.5 * (cov + cov.T)


def sample_linear_gaussian_conditional(factor_rows: np.ndarray, apply_factor, y: np.ndarray, noise_sd: float,
                                       rng: np.random.Generator, rank: int, prior_mean=None, Phi=None):
    """Exact draw of ``w | y`` by perturbing a prior draw (Matheron's rule).

    ``w = mu + F z + F B^T C^{-1} (y - Phi mu - B z - e)`` with ``z ~ N(0, I_r)``,
    ``e ~ N(0, s^2 I)``, ``B = Phi F`` and ``C = B B^T + s^2 I``; this has
    exactly the Woodbury conditional law.
    """
    B = factor_rows
    C = B @ B.T
    C[np.diag_indices_from(C)] += noise_sd**2
    L = jittered_cholesky(C)
    z = rng.standard_normal(rank)
    e = rng.standard_normal(B.shape[0]) * noise_sd
    resid = y - B @ z - e
    if prior_mean is not None:
        resid = resid - Phi @ prior_mean
    latent = z + B.T @ scipy.linalg.cho_solve((L, True), resid)
    w = apply_factor(latent)
    return w if prior_mean is None else w + prior_mean


def conditional_output_weights(problem: RegressionProblem, state: HiddenState, rng: np.random.Generator) -> np.ndarray:
    """Draw output weights from ``N(m_**, Sigma_**)`` given the hidden layer."""
    Phi = problem.features(state)
    B = problem.prior.factor_rows(state, Phi)
    return sample_linear_gaussian_conditional(
        B, lambda z: problem.prior.factor_apply(state, z), problem.residual, problem.noise_sd, rng, problem.prior.rank()
    )


def conditional_output_moments(problem: RegressionProblem, state: HiddenState):
    """Dense ``(m_**, Sigma_**)``; for small problems and checks."""
    Phi = problem.features(state)
    return linear_gaussian_conditional(problem.prior.factor(state), Phi, problem.residual, problem.noise_sd)


# ---------------------------------------------------------------------------
# elliptical slice sampling


def elliptical_slice(x: np.ndarray, loglik, cur_loglik: float, rng: np.random.Generator, prior_draw=None,
                     max_shrink: int = MAX_SHRINK):
    """One elliptical slice transition for a centred Gaussian prior.

    Parameters
    ----------
    x : ndarray
        Current state.
    loglik : callable
        Log-likelihood of a state.
    cur_loglik : float
        ``loglik(x)``.
    prior_draw : callable, optional
        ``rng -> ndarray`` drawing from the prior; standard normal by default.

    Returns
    -------
    new_x, new_loglik, n_shrinks
    """
    nu = rng.standard_normal(x.shape) if prior_draw is None else prior_draw(rng)
    threshold = cur_loglik + math.log(rng.uniform())
    angle = rng.uniform(0.0, 2.0 * math.pi)
    lo, hi = angle - 2.0 * math.pi, angle
    for shrinks in range(max_shrink + 1):
        proposal = x * math.cos(angle) + nu * math.sin(angle)
        ll = loglik(proposal)
        if ll > threshold:
            return proposal, ll, shrinks
        if angle < 0.0:
            lo = angle
        else:
            hi = angle
        angle = rng.uniform(lo, hi)
    raise RuntimeError(f"elliptical slice bracket did not accept within {max_shrink} shrinks")


def ess_step(problem: RegressionProblem, state: HiddenState, rng: np.random.Generator) -> HiddenState:
    """Elliptical slice update of the hidden layer against the marginal likelihood."""
    N, d = problem.prior.N, problem.prior.d
    scales = problem.prior.hidden_scales

    def ll(eta):
        return marginal_loglik(problem, HiddenState.from_vector(eta, N, d, scales))

    if not np.isfinite(state.loglik):
        state.loglik = marginal_loglik(problem, state)
    eta, new_ll, _ = elliptical_slice(state.to_vector(scales), ll, state.loglik, rng)
    return HiddenState.from_vector(eta, N, d, scales, new_ll)


# ---------------------------------------------------------------------------
# chains


@dataclass
class PosteriorSample:
    state: HiddenState
    output: np.ndarray
    loglik: float


@dataclass
class PosteriorChain:
    problem: RegressionProblem
    samples: list = field(default_factory=list)
    loglik_trace: list = field(default_factory=list)
    shrink_counts: list = field(default_factory=list)
    seed: int = 0
    burn_in: int = 0
    thin: int = 1

    def __len__(self) -> int:
        return len(self.samples)

    def networks(self):
        """``(hidden state, output weights)`` for each kept sample."""
        return [(s.state, s.output) for s in self.samples]


def run_posterior(problem: RegressionProblem, n_samples: int, burn_in: int = 0, thin: int = 1, seed: int = 0,
                  progress=None) -> PosteriorChain:
    """Run ``n_samples`` slice iterations and keep every ``thin``-th after ``burn_in``.

    The number of kept samples is ``floor((n_samples - burn_in) / thin)``.
    The chain starts from a fresh prior draw. Streams: ``"ess-init"`` for the
    initial state, ``"ess"`` for the slice moves and ``"output-weights"`` for
    the conditional output draws.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if burn_in < 0 or thin < 1:
        raise ValueError("burn_in must be >= 0 and thin >= 1")
    N, d = problem.prior.N, problem.prior.d
    scales = problem.prior.hidden_scales
    rng_init = stream(seed, "ess-init")
    rng = stream(seed, "ess")
    rng_out = stream(seed, "output-weights")

    def ll(eta):
        return marginal_loglik(problem, HiddenState.from_vector(eta, N, d, scales))

    state = prior_state(problem, rng_init)
    eta, cur = state.to_vector(scales), state.loglik
    chain = PosteriorChain(problem, seed=int(seed), burn_in=int(burn_in), thin=int(thin))
    for it in range(n_samples):
        eta, cur, shrinks = elliptical_slice(eta, ll, cur, rng)
        chain.loglik_trace.append(cur)
        chain.shrink_counts.append(shrinks)
        if it >= burn_in and (it - burn_in + 1) % thin == 0:
            st = HiddenState.from_vector(eta, N, d, scales, cur)
            w1 = conditional_output_weights(problem, st, rng_out)
            chain.samples.append(PosteriorSample(st, w1, cur))
        if progress is not None:
            progress(it)
    log.info("chain done: %d kept, mean shrinks %.2f", len(chain.samples), float(np.mean(chain.shrink_counts)))
    return chain


def posterior_predictive(chain: PosteriorChain, test_x, quantiles=(2.5, 97.5)):
    """Pointwise mean and empirical quantiles of ``m(x) + f(x)`` over kept networks.

    Returns
    -------
    mean : ndarray
    bands : ndarray of shape ``(len(quantiles), n_test)``
    """
    if not chain.samples:
        raise ValueError("chain has no kept samples")
    problem = chain.problem
    X = as_points(test_x, problem.prior.d)
    m = problem.mean(X)
    values = np.empty((len(chain.samples), X.shape[0]))
    for k, s in enumerate(chain.samples):
        values[k] = m + problem.features(s.state, X) @ s.output
    return values.mean(axis=0), np.percentile(values, list(quantiles), axis=0)
