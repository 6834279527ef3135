"""Exact steady-state observables and Wigner function.

The steady state of the two-photon driven, two-photon damped mode has
closed-form moments given by ratios of generalized hypergeometric
series in b = delta/eta and z = (g/eta)^2, and a closed-form Wigner
function built from a confluent-limit series.  These are the reference
values every stochastic or approximate method in the package is
compared against.

Sign convention: the anomalous average is implemented as
+ (g/eta) / (2b + i) times the series ratio.  The opposite overall
sign, which sometimes appears in print, is inconsistent with the
quadrature identities and with the Wigner function's own second
moments; the form used here reproduces both, as well as an independent
density-matrix steady-state solve performed during development.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from .model import ModelParams, ObservableSet
from .specfun import HypergeometricSpec, SeriesResult, hyp0f1_array, pfq

__all__ = [
    "ExactObservables",
    "exact_observables",
    "series_diagnostics",
    "exact_wigner",
    "exact_wigner_grid",
    "exact_reduced_wigner",
    "reduced_wigner_profile",
    "default_grid_half_width",
    "wigner_axis",
    "grid_moment",
]

_MAX_G_OVER_ETA = 100.0
_MIN_GRID_POINTS = 257


@dataclass(frozen=True)
class ExactObservables:
    """Closed-form steady-state moments.

    a2dag_a2 is the fourth-order correlator <a^+ a^+ a a>; g2 is its
    normalized form a2dag_a2 / n^2, undefined (None) in the vacuum.
    """

    n: float
    a2: complex
    a2dag_a2: float
    g2: Optional[float]
    x2: float
    p2: float
    xp_sym: float

    def to_observable_set(self) -> ObservableSet:
        return ObservableSet(
            n=self.n,
            a2=self.a2,
            x2=self.x2,
            p2=self.p2,
            xp_sym=self.xp_sym,
            g2=self.g2,
            method="exact",
        )


def _series_trio(params: ModelParams):
    """The four hypergeometric evaluations behind the closed forms."""
    b = params.delta_over_eta
    r = params.g_over_eta
    z = r * r
    denom = pfq(
        HypergeometricSpec((0.5,), (0.5 - 1j * b, 0.5 + 1j * b), z)
    )
    num_n = pfq(
        HypergeometricSpec((1.5,), (1.5 - 1j * b, 1.5 + 1j * b), z)
    )
    num_a2 = pfq(
        HypergeometricSpec((1.5,), (1.5 - 1j * b, 0.5 + 1j * b), z)
    )
    num_g4 = pfq(
        HypergeometricSpec(
            (1.5, 1.5), (0.5, 1.5 - 1j * b, 1.5 + 1j * b), z
        )
    )
    return denom, num_n, num_a2, num_g4


def _check_domain(params: ModelParams) -> None:
    if params.g_over_eta > _MAX_G_OVER_ETA:
        raise ValueError(
            f"g/eta = {params.g_over_eta:.4g} outside the validated series "
            f"domain (<= {_MAX_G_OVER_ETA:g})"
        )


def exact_observables(params: ModelParams) -> ExactObservables:
    """Evaluate the closed-form steady-state moments.

    Valid for g/eta <= 100 where the series evaluations retain full
    double precision.  Quadrature variances follow from the moment
    identities x2 = n + Re[a2] + 1/2, p2 = n - Re[a2] + 1/2,
    xp_sym = Im[a2].
    """
    _check_domain(params)
    b = params.delta_over_eta
    r = params.g_over_eta
    z = r * r
    try:
        denom, num_n, num_a2, num_g4 = _series_trio(params)
    except RuntimeError as exc:
        raise RuntimeError(
            f"series evaluation failed for delta/eta = {b:.4g}, "
            f"g/eta = {r:.4g}: {exc}"
        ) from exc

    d = denom.value
    pref = 1.0 / (4.0 * b * b + 1.0)
    n = float((2.0 * z * pref * num_n.value / d).real)
    a2 = r / (2.0 * b + 1j) * num_a2.value / d
    a2dag_a2 = float((z * pref * num_g4.value / d).real)
    g2 = a2dag_a2 / (n * n) if n > 0.0 else None
    x2 = n + a2.real + 0.5
    p2 = n - a2.real + 0.5
    return ExactObservables(
        n=n,
        a2=a2,
        a2dag_a2=a2dag_a2,
        g2=g2,
        x2=x2,
        p2=p2,
        xp_sym=a2.imag,
    )


def series_diagnostics(params: ModelParams) -> Dict[str, SeriesResult]:
    """Expose per-series convergence and cancellation diagnostics."""
    _check_domain(params)
    denom, num_n, num_a2, num_g4 = _series_trio(params)
    return {
        "denominator": denom,
        "photon_number": num_n,
        "anomalous_average": num_a2,
        "fourth_order": num_g4,
    }


def default_grid_half_width(params: ModelParams) -> float:
    """Half-width of a phase-space grid that captures the state.

    Combines the semiclassical ring radius with the exact quadrature
    variances so that the discarded tail mass stays below about 1e-6
    in the normalization integral.  The variance term matters above
    threshold, where the semiclassical photon number vanishes but the
    fluctuations do not.
    """
    from .semiclassical import steady_states

    n_s = max(b.n_s for b in steady_states(params))
    obs = exact_observables(params)
    spread = max(obs.x2, obs.p2, 0.5)
    return max(
        4.0,
        1.5 * math.sqrt(2.0 * n_s + 1.0),
        math.sqrt(2.0 * n_s) + 4.0,
        1.8 * math.sqrt(2.0 * spread) + 3.5,
    )


def wigner_axis(
    params: ModelParams,
    n_points: int = _MIN_GRID_POINTS,
    half_width: Optional[float] = None,
) -> np.ndarray:
    """Symmetric quadrature axis for grid evaluation (odd point count)."""
    if n_points < _MIN_GRID_POINTS:
        raise ValueError(f"need at least {_MIN_GRID_POINTS} grid points")
    if n_points % 2 == 0:
        raise ValueError("grid point count must be odd for Simpson weights")
    if half_width is None:
        half_width = default_grid_half_width(params)
    return np.linspace(-half_width, half_width, n_points)


def _wigner_values(params: ModelParams, x: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Wigner density on the outer product of x and p (x-major)."""
    b = params.delta_over_eta
    u = params.g_over_eta / 2.0
    xx = np.asarray(x, dtype=float)[:, None]
    pp = np.asarray(p, dtype=float)[None, :]
    arg = -1j * u * (xx - 1j * pp) ** 2
    series = hyp0f1_array(0.5 - 1j * b, arg)
    denom = pfq(
        HypergeometricSpec(
            (0.5,),
            (0.5 - 1j * b, 0.5 + 1j * b),
            params.g_over_eta ** 2,
        )
    ).value.real
    env = np.exp(-(xx * xx + pp * pp))
    return (2.0 / math.pi) * (series.real ** 2 + series.imag ** 2) * env / denom


def exact_wigner(params: ModelParams, x: float, p: float) -> float:
    """Steady-state Wigner density at one phase-space point.

    Normalized so that the integral of W over dx dp / 2 is one.  The
    exact solution is a statistical mixture of the two wells and is
    non-negative everywhere.
    """
    _check_domain(params)
    return float(
        _wigner_values(params, np.array([x]), np.array([p]))[0, 0]
    )


def exact_wigner_grid(
    params: ModelParams,
    x_axis: np.ndarray,
    p_axis: np.ndarray,
) -> np.ndarray:
    """Wigner density sampled on a rectangular grid.

    Returns values[i, j] = W(x_axis[i], p_axis[j]).  One vectorized
    series evaluation covers the whole grid, which is orders of
    magnitude cheaper than per-point calls.
    """
    _check_domain(params)
    return _wigner_values(params, np.asarray(x_axis), np.asarray(p_axis))


def grid_moment(
    x_axis: np.ndarray,
    p_axis: np.ndarray,
    values: np.ndarray,
    k: int,
    m: int,
) -> float:
    """Symmetrized moment <(x^k p^m)_s> from gridded Wigner values.

    Tensor-product Simpson quadrature under the dx dp / 2 measure.
    With (k, m) = (0, 0) this is the normalization integral.
    """
    xk = np.asarray(x_axis, dtype=float) ** k
    pm = np.asarray(p_axis, dtype=float) ** m
    integrand = values * xk[:, None] * pm[None, :]
    inner = simpson(integrand, x=p_axis, axis=1)
    return float(simpson(inner, x=x_axis) / 2.0)


def exact_reduced_wigner(params: ModelParams, x: float) -> float:
    """Marginal Wigner density w(x) = integral dp / 2 of W(x, p).

    Normalized so that the plain integral of w over x is one.
    """
    _check_domain(params)
    half_width = default_grid_half_width(params)
    p_axis = np.linspace(-half_width, half_width, _MIN_GRID_POINTS)
    column = _wigner_values(params, np.array([x]), p_axis)[0]
    return float(simpson(column, x=p_axis) / 2.0)


def reduced_wigner_profile(
    params: ModelParams,
    x_axis: np.ndarray,
    n_p: int = _MIN_GRID_POINTS,
    half_width: Optional[float] = None,
) -> Tuple[np.ndarray, float]:
    """Marginal density on a whole axis, plus its grid normalization.

    Returns (w_values, norm) where norm is the Simpson estimate of the
    integral of w over x_axis; its distance from one measures the
    combined truncation and quadrature error.
    """
    _check_domain(params)
    if half_width is None:
        half_width = default_grid_half_width(params)
    p_axis = np.linspace(-half_width, half_width, n_p)
    values = _wigner_values(params, np.asarray(x_axis), p_axis)
    w = simpson(values, x=p_axis, axis=1) / 2.0
    norm = float(simpson(w, x=x_axis))
    return w, norm
