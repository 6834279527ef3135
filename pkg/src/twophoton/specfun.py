"""Special functions for the exact steady state and equilibrium moments.

Implements the generalized hypergeometric series pFq with complex
parameters, the complex Gamma function, and physicists' Hermite
polynomials.  Only (p, q) in {(0, 1), (1, 2), (2, 3)} are needed; all
of these are entire in the argument, so direct term recursion with a
relative-tolerance stop is adequate.  Each evaluation also reports the
largest term encountered: the ratio max_term / |value| bounds the
digits lost to cancellation, which matters for oscillatory arguments.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "HypergeometricSpec",
    "SeriesResult",
    "pfq",
    "hyp_pfq",
    "hyp0f1_array",
    "complex_gamma",
    "hermite",
]

_EPS = 1e-15
_MAX_TERMS = 100_000
_CONSECUTIVE_SMALL = 3


def _is_nonpositive_integer(b: complex) -> bool:
    if b.imag != 0.0:
        return False
    if b.real > 0.0:
        return False
    return b.real == math.floor(b.real)


@dataclass(frozen=True)
class HypergeometricSpec:
    """Parameter block for one pFq evaluation.

    numerator_params holds (a_1 ... a_p), denominator_params holds
    (b_1 ... b_q), argument is z.  Denominator parameters must avoid
    the poles 0, -1, -2, ... where the series is undefined.
    """

    numerator_params: tuple
    denominator_params: tuple
    argument: complex

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "numerator_params", tuple(complex(a) for a in self.numerator_params)
        )
        object.__setattr__(
            self,
            "denominator_params",
            tuple(complex(b) for b in self.denominator_params),
        )
        object.__setattr__(self, "argument", complex(self.argument))
        p = len(self.numerator_params)
        q = len(self.denominator_params)
        if (p, q) not in {(0, 1), (1, 2), (2, 3)}:
            raise ValueError(f"unsupported series order (p, q) = ({p}, {q})")
        for b in self.denominator_params:
            if _is_nonpositive_integer(b):
                raise ValueError(f"denominator parameter {b} is a series pole")
        if not all(
            cmath.isfinite(v)
            for v in (*self.numerator_params, *self.denominator_params, self.argument)
        ):
            raise ValueError("hypergeometric parameters must be finite")


@dataclass(frozen=True)
class SeriesResult:
    """Value of a summed series plus convergence diagnostics."""

    value: complex
    terms_used: int
    estimated_relative_error: float
    max_term_magnitude: float

    def digits_lost(self) -> float:
        """Decimal digits lost to cancellation, max_term over value."""
        v = abs(self.value)
        if v == 0.0:
            return math.inf
        return max(0.0, math.log10(self.max_term_magnitude / v))


def pfq(spec: HypergeometricSpec) -> SeriesResult:
    """Sum the hypergeometric series for ``spec`` by term recursion.

    The k-th term obeys t_{k+1} = t_k * z * prod(a_i + k) /
    (prod(b_j + k) * (k + 1)).  Summation stops once the term is below
    1e-15 of the running sum three times in a row.

    Raises
    ------
    RuntimeError
        If the stop criterion is not met within 100000 terms.
    """
    a = spec.numerator_params
    b = spec.denominator_params
    z = spec.argument

    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    max_term = 1.0
    small_streak = 0
    if z == 0:
        return SeriesResult(total, 1, 0.0, 1.0)

    for k in range(_MAX_TERMS):
        num = z
        for ai in a:
            num *= ai + k
        den = k + 1.0
        for bj in b:
            den *= bj + k
        term *= num / den
        total += term
        mag = abs(term)
        if mag > max_term:
            max_term = mag
        if mag <= _EPS * abs(total):
            small_streak += 1
            if small_streak >= _CONSECUTIVE_SMALL:
                terms_used = k + 2
                cancellation = (
                    max_term / abs(total) * 2.0 ** -52 if total != 0 else math.inf
                )
                est = max(_EPS, cancellation)
                return SeriesResult(total, terms_used, est, max_term)
        else:
            small_streak = 0

    raise RuntimeError(
        f"hypergeometric series did not converge within {_MAX_TERMS} terms "
        f"(|z| = {abs(z):.3g})"
    )


def hyp_pfq(
    numerator_params: Sequence[complex],
    denominator_params: Sequence[complex],
    argument: complex,
) -> complex:
    """Convenience wrapper returning just the series value."""
    return pfq(
        HypergeometricSpec(tuple(numerator_params), tuple(denominator_params), argument)
    ).value


def hyp0f1_array(c: complex, z: np.ndarray) -> np.ndarray:
    """Vectorized 0F1(; c; z) over an array of arguments.

    Same recursion and stop rule as :func:`pfq`, applied elementwise
    with a collective stop (all entries converged three times in a
    row).  Used for dense Wigner-function grids where scalar calls
    would dominate the runtime.
    """
    z = np.asarray(z, dtype=np.complex128)
    if _is_nonpositive_integer(complex(c)):
        raise ValueError(f"denominator parameter {c} is a series pole")
    total = np.ones_like(z)
    term = np.ones_like(z)
    small_streak = 0
    for k in range(_MAX_TERMS):
        term = term * z / ((c + k) * (k + 1.0))
        total += term
        if np.all(np.abs(term) <= _EPS * np.abs(total)):
            small_streak += 1
            if small_streak >= _CONSECUTIVE_SMALL:
                return total
        else:
            small_streak = 0
    raise RuntimeError("0F1 grid evaluation did not converge")


# Lanczos approximation, g = 607/128, 15 coefficients.  This choice
# keeps the relative error near 1e-15 over the right half plane.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEFFS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


def complex_gamma(z: complex) -> complex:
    """Gamma function for complex argument.

    Uses the Lanczos series on Re(z) >= 1/2 and the reflection formula
    elsewhere.  Arguments at the poles 0, -1, -2, ... are rejected.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise ValueError(f"gamma pole at z = {z}")
    if z.real < 0.5:
        # Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        return cmath.pi / (cmath.sin(cmath.pi * z) * complex_gamma(1.0 - z))
    w = z - 1.0
    series = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        series += _LANCZOS_COEFFS[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    # log-space evaluation avoids premature overflow of t**(w + 1/2)
    log_gamma = (w + 0.5) * cmath.log(t) - t + math.log(2.0 * math.pi) / 2.0
    return cmath.exp(log_gamma) * series


ArrayOrScalar = Union[complex, np.ndarray]


def hermite(k: int, z: ArrayOrScalar) -> ArrayOrScalar:
    """Physicists' Hermite polynomial H_k(z).

    Three-term recurrence H_{k+1} = 2 z H_k - 2 k H_{k-1}, valid for
    complex scalar or array arguments.  Orders above 64 are rejected;
    nothing in the moment calculus needs them and the recurrence loses
    accuracy for very high orders.
    """
    if k < 0 or k > 64:
        raise ValueError(f"hermite order must be in [0, 64], got {k}")
    scalar = np.isscalar(z) or isinstance(z, complex)
    zz = np.asarray(z, dtype=np.complex128)
    h_prev = np.ones_like(zz)
    if k == 0:
        return complex(h_prev) if scalar else h_prev
    h = 2.0 * zz
    for m in range(1, k):
        h, h_prev = 2.0 * zz * h - 2.0 * m * h_prev, h
    return complex(h) if scalar else h
