import math

import numpy as np
import pytest

from ridgelet_prior.activations import ActivationPair
from ridgelet_prior.cubature import make_input_rule, make_mollifier, make_weight_rule
from ridgelet_prior.kernels import LinearMean, SquaredExponential, ZeroMean, gram
from ridgelet_prior.linalg import NotPSDError
from ridgelet_prior.prior import (
    VIA_K,
    VIA_SIGMA,
    RidgeletNetwork,
    _draw_gaussian,
    evaluate_network,
    gaussian_sqrt,
    output_weight_law,
    sample_iid_network,
    sample_ridgelet_network,
)
from ridgelet_prior.ridgelet import FeatureMap, build_psi
from ridgelet_prior.rng import stream

TANH = ActivationPair("tanh")
SE = SquaredExponential(1.0, 1.5)


@pytest.fixture(scope="module")
def grid():
    return make_input_rule(1, 200, 6.0, make_mollifier(5.0, 6.0))


def _rel_err(root, P, K):
    target = P @ K @ P.T
    return np.linalg.norm(root.covariance() - target) / np.linalg.norm(target)


def test_sqrt_identity():
    root = gaussian_sqrt(np.eye(4), np.eye(4))
    assert np.allclose(root.covariance(), np.eye(4), atol=1e-14)


@pytest.mark.parametrize("N,method", [(500, VIA_K), (100, VIA_SIGMA)])
def test_sqrt_branches(grid, N, method):
    psi = build_psi(make_weight_rule(1, N, 5.0, 36.0, 1), grid, TANH)
    K = gram(SE, grid.nodes)
    root = gaussian_sqrt(psi, K)
    assert root.method == method
    assert root.rank == min(N, grid.D)
    assert _rel_err(root, psi.matrix, K) <= 1e-8


def test_sqrt_errors():
    K = np.array([[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(ValueError):
        gaussian_sqrt(np.eye(2), K)
    with pytest.raises(NotPSDError):
        gaussian_sqrt(np.eye(2), np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ValueError):
        gaussian_sqrt(np.eye(3), np.eye(2))


def test_zero_kernel_gives_zero_network(grid):
    net = sample_ridgelet_network(ZeroMean(), SE, grid, TANH, [30], 5.0, 36.0, seed=0, K=np.zeros((200, 200)))
    assert np.all(net.output == 0)
    assert np.all(net(np.linspace(-5, 5, 11)) == 0)


def test_network_uses_law_and_streams(grid):
    net = sample_ridgelet_network(LinearMean(0.3), SE, grid, TANH, [40], 5.0, 36.0, seed=5)
    rule = make_weight_rule(1, 40, 5.0, 36.0, 5)
    assert np.array_equal(net.hidden[0][0], rule.w)
    mu, root = output_weight_law(build_psi(rule, grid, TANH), LinearMean(0.3), SE)
    expect = mu + root.factor @ stream(5, "output", "w").standard_normal(root.rank)
    assert np.allclose(net.output, expect, rtol=1e-12, atol=1e-12)
    again = sample_ridgelet_network(LinearMean(0.3), SE, grid, TANH, [40], 5.0, 36.0, seed=5)
    assert np.array_equal(net.output, again.output)


def _mc_check(draws, mean, cov, n_se=4.0):
    n = draws.shape[0]
    # eigendecomposition round-off leaves ~1e-17 variance on rows that are exactly zero
    var = np.diag(cov) + 1e-12 * np.trace(cov)
    emp_mean = draws.mean(axis=0)
    assert np.all(np.abs(emp_mean - mean) <= n_se * np.sqrt(var / n))
    centred = draws - mean
    emp_cov = centred.T @ centred / n
    se = np.sqrt((np.outer(var, var) + cov**2) / n)
    assert np.all(np.abs(emp_cov - cov) <= n_se * se)


def test_output_weight_moments_by_monte_carlo(grid):
    rule = make_weight_rule(1, 50, 5.0, 36.0, 11)
    psi = build_psi(rule, grid, TANH)
    mean = LinearMean(0.5)
    mu, root = output_weight_law(psi, mean, SE)
    draws = _draw_gaussian(mu, root, stream(123, "mc"), size=100_000)
    _mc_check(draws, mu, psi.matrix @ gram(SE, grid.nodes) @ psi.matrix.T)


def test_pushforward_at_probe_points(grid):
    rule = make_weight_rule(1, 60, 5.0, 36.0, 2)
    psi = build_psi(rule, grid, TANH)
    mu, root = output_weight_law(psi, ZeroMean(), SE)
    Phi = FeatureMap(rule, TANH)(np.array([-3.0, 0.0, 2.5]))
    draws = _draw_gaussian(mu, root, stream(9, "mc"), size=100_000) @ Phi.T
    Sigma = root.covariance()
    _mc_check(draws, Phi @ mu, Phi @ Sigma @ Phi.T)


def test_deep_network_shapes(grid):
    net = sample_ridgelet_network(ZeroMean(), SE, grid, TANH, [20, 15, 10], 2.0, 9.0, seed=0)
    assert net.widths == [20, 15, 10]
    assert [W.shape for W, _ in net.hidden] == [(20, 1), (15, 20), (10, 15)]
    out = net(np.linspace(-5, 5, 7))
    assert out.shape == (7,) and np.all(np.isfinite(out))


def test_evaluate_network_examples():
    net = RidgeletNetwork([(np.ones((1, 1)), np.zeros(1))], np.ones(1), TANH)
    assert evaluate_network(net, 0.0) == 0.0
    assert evaluate_network(net.with_output(np.zeros(1)), 0.7) == 0.0
    x = np.linspace(-2, 2, 5)
    assert np.allclose(net.with_output(2 * net.output)(x), 2 * net(x))


def test_network_shape_validation():
    with pytest.raises(ValueError):
        RidgeletNetwork([(np.ones((2, 1)), np.zeros(2))], np.ones(3), TANH)
    with pytest.raises(ValueError):
        RidgeletNetwork([(np.ones((2, 1)), np.zeros(2)), (np.ones((3, 4)), np.zeros(3))], np.ones(3), TANH)


def test_network_record_roundtrip(grid):
    net = sample_ridgelet_network(ZeroMean(), SE, grid, TANH, [12, 7], 2.0, 9.0, seed=3)
    back = RidgeletNetwork.loads(net.dumps())
    x = np.linspace(-5, 5, 9)
    assert np.array_equal(back(x), net(x))
    assert back.metadata == net.metadata
    with pytest.raises(ValueError):
        RidgeletNetwork.from_record({"format": "other"})


def test_iid_defaults_and_zero_scale():
    net = sample_iid_network(400, seed=0)
    assert net.metadata["sigma_w0"] == 5.0 and net.metadata["sigma_b0"] == 36.0
    assert net.metadata["sigma_w1"] == pytest.approx(0.1 / math.sqrt(400))
    zero = sample_iid_network(50, sigma_w1=0.0, seed=1)
    assert np.all(zero(np.linspace(-5, 5, 5)) == 0)
    two = sample_iid_network(30, 2.0, 18.0, seed=0, d=2)
    assert two.d == 2


def test_iid_covariance_estimators_agree():
    x, xp = np.array([0.5]), np.array([-1.0])
    prod, cond = [], []
    for r in range(10_000):
        net = sample_iid_network(20, seed=r)
        prod.append(net(x)[0] * net(xp)[0])
        s2 = net.metadata["sigma_w1"] ** 2
        cond.append(s2 * net.features(x)[0] @ net.features(xp)[0])
    diff = np.array(prod) - np.array(cond)
    assert abs(diff.mean()) <= 4 * diff.std() / math.sqrt(diff.size)
