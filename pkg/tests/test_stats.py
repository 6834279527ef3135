"""Error-bar machinery on synthetic series with known answers."""
import math

import numpy as np
import pytest

from twophoton._quad import adaptive_simpson
from twophoton._stats import batch_means, integrated_autocorrelation_time


def _ar1(rng, phi, n):
    x = np.empty(n)
    x[0] = rng.standard_normal() / math.sqrt(1 - phi * phi)
    eps = rng.standard_normal(n)
    for i in range(1, n):
        x[i] = phi * x[i - 1] + eps[i]
    return x


def test_batch_means_iid_series():
    rng = np.random.default_rng(7)
    x = rng.standard_normal(200_000)
    mean, se = batch_means(x, n_batches=50)
    # SE of the mean of N iid unit-variance samples is 1/sqrt(N).
    assert mean == pytest.approx(0.0, abs=4.0 / math.sqrt(len(x)))
    assert se == pytest.approx(1.0 / math.sqrt(len(x)), rel=0.35)


def test_batch_means_tracks_autocorrelation():
    # AR(1) with phi = 0.9 inflates the variance of the mean by about
    # (1 + phi) / (1 - phi) = 19 over the iid value; batch means with
    # long batches must see that inflation, a naive sample-variance
    # estimate would not.
    rng = np.random.default_rng(21)
    phi = 0.9
    x = _ar1(rng, phi, 400_000)
    _, se = batch_means(x, n_batches=40)
    var_x = 1.0 / (1.0 - phi * phi)
    want = math.sqrt(var_x * (1 + phi) / (1 - phi) / len(x))
    assert se == pytest.approx(want, rel=0.4)


def test_batch_means_validation():
    # Requested batch counts are clamped to the sample size, and fewer
    # than two batches (or a scalar-sized sample) is a hard error.
    mean, se = batch_means(np.arange(10.0), n_batches=11)
    assert mean == pytest.approx(4.5)
    with pytest.raises(ValueError):
        batch_means(np.arange(10.0), n_batches=0)
    with pytest.raises(ValueError):
        batch_means(np.array([1.0]), n_batches=2)


def test_iact_white_noise_is_near_one():
    rng = np.random.default_rng(3)
    tau = integrated_autocorrelation_time(rng.standard_normal(100_000))
    assert tau == pytest.approx(1.0, abs=0.15)


def test_iact_ar1_matches_theory():
    # tau_int = (1 + phi) / (1 - phi) for AR(1).
    rng = np.random.default_rng(11)
    phi = 0.8
    x = _ar1(rng, phi, 400_000)
    tau = integrated_autocorrelation_time(x)
    assert tau == pytest.approx((1 + phi) / (1 - phi), rel=0.2)


def test_iact_constant_series_is_safe():
    tau = integrated_autocorrelation_time(np.ones(1000))
    assert math.isfinite(tau) and tau >= 1.0


def test_adaptive_simpson_known_integrals():
    val = adaptive_simpson(math.sin, 0.0, math.pi, 1e-12)
    assert val == pytest.approx(2.0, rel=1e-11)
    val = adaptive_simpson(lambda x: math.exp(-x * x), -8.0, 8.0, 1e-12)
    assert val == pytest.approx(math.sqrt(math.pi), rel=1e-11)


def test_adaptive_simpson_sharp_feature():
    # Narrow Gaussian bump far from the midpoint still gets resolved.
    f = lambda x: math.exp(-((x - 0.9) ** 2) * 4e4)
    val = adaptive_simpson(f, 0.0, 1.0, 1e-14)
    assert val == pytest.approx(math.sqrt(math.pi / 4e4), rel=1e-8)


def test_adaptive_simpson_complex_integrand():
    val = adaptive_simpson(lambda x: complex(math.cos(x), math.sin(x)),
                           0.0, math.pi / 2.0, 1e-12)
    assert val.real == pytest.approx(1.0, rel=1e-10)
    assert val.imag == pytest.approx(1.0, rel=1e-10)


def test_adaptive_simpson_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        adaptive_simpson(math.sin, 0.0, 1.0, 0.0)
