"""Special-function layer checked against mpmath at high precision."""
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twophoton.specfun import (
    HypergeometricSpec,
    complex_gamma,
    hermite,
    hyp0f1_array,
    hyp_pfq,
    pfq,
)

mpmath.mp.dps = 40


def _mp_pfq(num, den, z):
    return complex(mpmath.hyper([mpmath.mpmathify(a) for a in num],
                                [mpmath.mpmathify(b) for b in den],
                                mpmath.mpmathify(z)))


def _close(a, b, rel):
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale <= rel


# The steady-state normalization uses 1F2 with conjugate complex
# denominator parameters and a large real argument, which is the
# numerically hostile corner of the series.
HARD_CASES = [
    ((0.5,), (0.5 - 10.0j, 0.5 + 10.0j), 100.0),
    ((0.5,), (0.5 - 20.0j, 0.5 + 20.0j), 400.0),
    ((0.5,), (0.5 - 8.5j, 0.5 + 8.5j), 625.0),
    ((0.5,), (0.5 - 20.0j, 0.5 + 20.0j), 2500.0),
    ((1.5,), (1.5 - 20.0j, 1.5 + 20.0j), 400.0),
    ((2.0, 1.5), (1.0, 2.5 - 11.5j, 2.5 + 11.5j), 100.0),
]


@pytest.mark.parametrize("num,den,z", HARD_CASES)
def test_pfq_against_mpmath(num, den, z):
    # [DERIVED] oracle: mpmath.hyper at 40 significant digits.
    got = hyp_pfq(num, den, z)
    want = _mp_pfq(num, den, z)
    assert _close(got, want, 1e-10)


def test_pfq_reports_series_diagnostics():
    spec = HypergeometricSpec((0.5,), (0.5 - 20.0j, 0.5 + 20.0j), 2500.0)
    result = pfq(spec)
    assert result.terms_used > 10
    assert result.estimated_relative_error < 1e-10
    # Positive argument with conjugate denominator parameters gives an
    # all-positive series, so the sum dominates every single term and
    # the peak term is still astronomically large.
    assert 0.0 < result.max_term_magnitude < abs(result.value)
    assert result.max_term_magnitude > 1e15


def test_pfq_polynomial_termination():
    # A negative integer numerator parameter truncates the series.
    want = _mp_pfq((-3.0,), (2.0, 3.0), 1.5)
    got = hyp_pfq((-3.0,), (2.0, 3.0), 1.5)
    assert _close(got, want, 1e-13)


def test_pfq_rejects_nonpositive_integer_denominator():
    with pytest.raises(ValueError):
        hyp_pfq((0.5,), (-2.0, 1.5), 1.0)


def test_pfq_rejects_unsupported_order():
    with pytest.raises(ValueError):
        hyp_pfq((0.5,), (1.5,), 1.0)


def test_hyp0f1_reduces_to_hyperbolics():
    # [TRIVIAL] 0F1(; 1/2; z) = cosh(2 sqrt z) and
    # 0F1(; 3/2; z) = sinh(2 sqrt z) / (2 sqrt z) for z > 0.
    z = np.array([0.25, 1.0, 100.0, 625.0, 2500.0])
    s = 2.0 * np.sqrt(z)
    got_half = hyp0f1_array(0.5, z)
    got_three_halves = hyp0f1_array(1.5, z)
    assert np.allclose(got_half, np.cosh(s), rtol=1e-12)
    assert np.allclose(got_three_halves, np.sinh(s) / s, rtol=1e-12)


@given(st.floats(min_value=-40.0, max_value=40.0),
       st.floats(min_value=-30.0, max_value=30.0))
@settings(max_examples=60, deadline=None)
def test_complex_gamma_matches_mpmath(re, im):
    z = complex(re, im)
    if abs(z.imag) < 1e-6 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-6:
        return  # pole
    got = complex_gamma(z)
    want = complex(mpmath.gamma(z))
    if not (math.isfinite(want.real) and math.isfinite(want.imag)):
        return
    assert _close(got, want, 1e-9)


def test_gamma_reflection_identity():
    # Gamma(z) Gamma(1 - z) = pi / sin(pi z).
    for z in (0.5 - 11.5j, 0.25 + 3.0j, 1.5 - 20.0j, -0.3 + 0.7j):
        lhs = complex_gamma(z) * complex_gamma(1.0 - z)
        rhs = complex(mpmath.pi / mpmath.sin(mpmath.pi * z))
        assert _close(lhs, rhs, 1e-10)


def test_gamma_duplication_identity():
    # Legendre duplication at z = 1/6, a stock high-accuracy checkpoint.
    z = 1.0 / 6.0
    lhs = complex_gamma(2 * z)
    rhs = (
        complex_gamma(z)
        * complex_gamma(z + 0.5)
        * 2.0 ** (2 * z - 1)
        / math.sqrt(math.pi)
    )
    assert _close(lhs, rhs, 1e-12)


def test_hermite_low_orders():
    z = np.linspace(-3.0, 3.0, 31)
    assert np.allclose(hermite(0, z), np.ones_like(z), atol=1e-14)
    assert np.allclose(hermite(1, z), 2.0 * z, atol=1e-12)
    assert np.allclose(hermite(4, z), 16 * z**4 - 48 * z**2 + 12, rtol=1e-12)
    assert np.allclose(hermite(6, z), 64 * z**6 - 480 * z**4 + 720 * z**2 - 120,
                       rtol=1e-12, atol=1e-9)


@given(st.integers(min_value=0, max_value=12),
       st.floats(min_value=-5.0, max_value=5.0),
       st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=80, deadline=None)
def test_hermite_parity_and_recurrence(k, re, im):
    # H_k(-z) = (-1)^k H_k(z) and H_{k+1} = 2 z H_k - 2 k H_{k-1},
    # exercised on complex arguments because the phase-space kernel
    # evaluates these off the real axis.
    z = complex(re, im)
    hk = complex(hermite(k, z))
    flipped = complex(hermite(k, -z))
    assert abs(flipped - ((-1.0) ** k) * hk) <= 1e-9 * max(1.0, abs(hk))
    if k >= 1:
        lhs = complex(hermite(k + 1, z))
        rhs = 2.0 * z * hk - 2.0 * k * complex(hermite(k - 1, z))
        assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs), abs(rhs))


@given(st.floats(min_value=0.1, max_value=35.0),
       st.floats(min_value=1.0, max_value=2400.0))
@settings(max_examples=40, deadline=None)
def test_pfq_conjugate_parameters_give_real_values(b, z):
    # The normalization integral is real, so the conjugate-parameter
    # series must come out real up to roundoff.
    value = hyp_pfq((0.5,), (0.5 - 1j * b, 0.5 + 1j * b), z)
    assert abs(value.imag) <= 1e-9 * max(1.0, abs(value.real))
