import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgelet_prior.kernels import (
    InPaintComposite,
    LinearMean,
    Periodic,
    RationalQuadratic,
    SquaredExponential,
    ZeroMean,
    cross_gram,
    eval_kernel,
    eval_mean,
    gram,
)

MODELS_1D = [
    SquaredExponential(1.0, 1.5),
    RationalQuadratic(1.0, 1.0, 0.75),
    Periodic(1.0, 0.75, 2.0),
]


def test_se_values():
    k = SquaredExponential(1.0, 1.5)
    assert eval_kernel(k, 0.0, 0.0) == 1.0
    assert eval_kernel(k, 0.0, 1.5) == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert eval_kernel(k, 0.0, 1.5) == pytest.approx(0.606531, abs=1e-6)


def test_rq_and_periodic_closed_forms():
    rq = RationalQuadratic(2.0, 0.5, 0.75)
    r2 = 1.3**2
    assert eval_kernel(rq, 0.2, 1.5) == pytest.approx(4.0 * (1 + r2 / (2 * 0.5 * 0.75**2)) ** -0.5, rel=1e-14)
    per = Periodic(1.0, 0.75, 2.0)
    assert eval_kernel(per, 3.7, 3.7) == 1.0
    # sin^2 argument uses period p^2
    expect = math.exp(-(2 / 0.75**2) * math.sin(math.pi * 1.0 / 4.0) ** 2)
    assert eval_kernel(per, 0.0, 1.0) == pytest.approx(expect, rel=1e-14)
    assert eval_kernel(per, 0.0, 4.0) == pytest.approx(1.0, abs=1e-14)


def test_inpaint_composite():
    k = InPaintComposite()
    assert (k.amplitude, k.lengthscale) == (0.1, 0.1)
    assert eval_kernel(k, [1.0, 1.0], [1.0, 1.0]) == pytest.approx(0.01 + 1.0, abs=1e-14)
    assert eval_kernel(k, [0.0, 0.0], [0.0, 0.0]) == pytest.approx(0.01 + 16.0, abs=1e-12)


def test_means():
    assert eval_mean(ZeroMean(), 7.0) == 0.0
    assert eval_mean(LinearMean(0.06), 1.0) == pytest.approx(0.06, abs=1e-16)
    assert eval_mean(LinearMean(0.2), -5.0) == pytest.approx(-1.0, abs=1e-15)
    assert eval_mean(LinearMean([1.0, -2.0]), [3.0, 1.0]) == pytest.approx(1.0)
    assert LinearMean(0.5, d=2).slope == (0.5, 0.5)


def test_gram_basic():
    k = SquaredExponential(1.0, 1.5)
    assert np.array_equal(gram(k, [0.0]), [[1.0]])
    K = gram(k, np.linspace(-2, 2, 5))
    assert np.array_equal(K, K.T)
    assert np.linalg.eigvalsh(K).min() >= -1e-10
    for model in MODELS_1D:
        K2 = gram(model, [0.3, -1.1])
        assert K2[0, 1] == K2[1, 0]


def test_cross_gram_shape_and_diag():
    k = RationalQuadratic(1.0, 1.0, 0.75)
    X = np.linspace(-1, 1, 4)
    Y = np.linspace(0, 3, 7)
    assert cross_gram(k, X, Y).shape == (4, 7)
    assert np.allclose(k.diag(X), np.diag(gram(k, X)))


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_hyperparameters_validated(bad):
    with pytest.raises(ValueError):
        SquaredExponential(bad, 1.0)
    with pytest.raises(ValueError):
        RationalQuadratic(1.0, bad, 1.0)
    with pytest.raises(ValueError):
        Periodic(1.0, 1.0, bad)


def test_dimension_errors():
    with pytest.raises(ValueError):
        Periodic(1.0, 1.0, 1.0, d=2)
    with pytest.raises(ValueError):
        eval_kernel(SquaredExponential(d=2), [0.0, 0.0], [0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        eval_mean(LinearMean([1.0, 2.0]), [1.0, 2.0, 3.0])


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.sampled_from(range(len(MODELS_1D))))
def test_symmetry_and_positive_diagonal(x, y, idx):
    k = MODELS_1D[idx]
    assert eval_kernel(k, x, y) == eval_kernel(k, y, x)
    assert eval_kernel(k, x, x) == pytest.approx(k.amplitude**2, rel=1e-15)
    assert eval_kernel(k, x, x) > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 50), st.integers(0, 2**32 - 1), st.sampled_from(range(4)))
def test_gram_psd(n, seed, idx):
    rng = np.random.default_rng(seed)
    if idx == 3:
        k, pts = InPaintComposite(), rng.uniform(-5, 5, (n, 2))
    else:
        k, pts = MODELS_1D[idx], rng.uniform(-5, 5, n)
    K = gram(k, pts)
    assert np.linalg.eigvalsh(K).min() >= -1e-8 * np.trace(K)
