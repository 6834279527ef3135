"""Critical exponents and the thermodynamic-limit rescaling check.

The transition at delta = g has exponents (nu, mu, epsilon) =
(1/3, 0, 1/3): under eta -> eta/N the x-variance grows as N^(2/3),
the p-variance stays finite, and relaxation slows as N^(1/3).
Equivalently, critical observables follow (g/eta)^(2/3) and
(g/eta)^(1/3) power laws.  This module fits those exponents from any
observable source and drives the reduced stochastic model through the
rescaling to confirm them dynamically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .langevin import MomentEstimate, TrajectoryConfig, run_ensemble_detailed
from .model import ModelParams

__all__ = [
    "ScalingExponents",
    "ExponentFit",
    "ScalingPoint",
    "ScalingReport",
    "REFERENCE_EXPONENTS",
    "scale_params",
    "fit_exponent",
    "verify_reduced_model_scaling",
]

_MIN_FIT_POINTS = 5
_EPSILON_TOLERANCE = 0.05


@dataclass(frozen=True)
class ScalingExponents:
    """Exponent triple for x, p, and time under the N-rescaling.

    The time exponent is not independent: epsilon = nu - mu is a
    structural identity of the rescaled equations, enforced here.
    """

    nu: float
    mu: float
    epsilon: float

    def __post_init__(self) -> None:
        if abs(self.epsilon - (self.nu - self.mu)) > 1.0e-9:
            raise ValueError(
                "inconsistent exponents: epsilon must equal nu - mu"
            )

    @classmethod
    def from_nu_mu(cls, nu: float, mu: float) -> "ScalingExponents":
        return cls(nu=nu, mu=mu, epsilon=nu - mu)


REFERENCE_EXPONENTS = ScalingExponents(nu=1.0 / 3.0, mu=0.0, epsilon=1.0 / 3.0)


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares power-law fit in log-log coordinates."""

    slope: float
    intercept: float
    r_squared: float
    points: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.points) < _MIN_FIT_POINTS:
            raise ValueError(f"need at least {_MIN_FIT_POINTS} fit points")
        if not (0.0 <= self.r_squared <= 1.0):
            raise ValueError("r_squared outside [0, 1]")


def scale_params(params: ModelParams, n_scale: float) -> ModelParams:
    """Thermodynamic-limit rescaling: eta -> eta / N, rates unchanged."""
    if n_scale <= 0.0:
        raise ValueError("n_scale must be positive")
    return ModelParams(params.delta, params.g, params.eta / n_scale)


def _ols_loglog(
    log_x: np.ndarray, log_y: np.ndarray
) -> Tuple[float, float, float]:
    slope, intercept = np.polyfit(log_x, log_y, 1)
    fitted = slope * log_x + intercept
    ss_res = float(np.sum((log_y - fitted) ** 2))
    ss_tot = float(np.sum((log_y - log_y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(min(max(r2, 0.0), 1.0))


def fit_exponent(
    observable_fn: Callable[[float], float],
    g_over_eta_values: Sequence[float],
    sign_handling: str = "none",
) -> ExponentFit:
    """Fit the power-law exponent of a critical observable.

    observable_fn maps g/eta (at delta = g) to the observable value.
    sign_handling "negate" flips the sign before taking logs, for
    quantities such as xp_sym that approach a negative power law.
    """
    if sign_handling not in ("none", "negate"):
        raise ValueError(f"unknown sign handling {sign_handling!r}")
    ratios = [float(r) for r in g_over_eta_values]
    if len(ratios) < _MIN_FIT_POINTS:
        raise ValueError(f"need at least {_MIN_FIT_POINTS} ratios")
    if any(r <= 0.0 for r in ratios):
        raise ValueError("g/eta ratios must be positive")
    sign = -1.0 if sign_handling == "negate" else 1.0
    points = []
    for r in ratios:
        y = sign * observable_fn(r)
        if not (y > 0.0 and math.isfinite(y)):
            raise ValueError(
                f"observable non-positive after sign handling at g/eta = {r:g}"
            )
        points.append((math.log(r), math.log(y)))
    log_x = np.array([p[0] for p in points])
    log_y = np.array([p[1] for p in points])
    slope, intercept, r2 = _ols_loglog(log_x, log_y)
    return ExponentFit(
        slope=slope, intercept=intercept, r_squared=r2, points=tuple(points)
    )


@dataclass(frozen=True)
class ScalingPoint:
    """Reduced-model measurements at one rescaling factor."""

    n_scale: float
    params: ModelParams
    x2: MomentEstimate
    p2: MomentEstimate
    relaxation_time: float


@dataclass(frozen=True)
class ScalingReport:
    """Outcome of the dynamic rescaling verification.

    nu_fit and mu_fit come from log-log slopes of the measured
    variances against N (each variance scales with exponent twice the
    quadrature exponent).  epsilon_measured is the independent slope
    of the autocorrelation time; epsilon_consistent records whether it
    matches nu_fit - mu_fit within 0.05.  exponents holds the accepted
    triple with epsilon = nu - mu imposed, or None if the consistency
    check failed.
    """

    points: Tuple[ScalingPoint, ...]
    nu_fit: float
    mu_fit: float
    epsilon_measured: float
    epsilon_consistent: bool
    exponents: Optional[ScalingExponents]

    def variance_ratio(self, key: str) -> Tuple[float, float]:
        """(ratio, standard error) of last over first point for x2/p2."""
        first = getattr(self.points[0], key)
        last = getattr(self.points[-1], key)
        ratio = last.mean / first.mean
        rel = math.sqrt(
            (first.std_error / first.mean) ** 2
            + (last.std_error / last.mean) ** 2
        )
        return ratio, abs(ratio) * rel


def _scaled_config(base: TrajectoryConfig, n_scale: float) -> TrajectoryConfig:
    """Stretch burn and sampling windows with the slowing-down factor."""
    stretch = n_scale ** (1.0 / 3.0)
    return replace(
        base,
        t_burn=base.t_burn * stretch,
        t_sample=base.t_sample * stretch,
        system="reduced_critical",
    )


def verify_reduced_model_scaling(
    params: ModelParams,
    n_scale_list: Sequence[float],
    base_config: Optional[TrajectoryConfig] = None,
    threads: int = 1,
) -> ScalingReport:
    """Run the reduced model across rescalings and fit the exponents.

    Intended at delta = g.  Sampling windows grow as N^(1/3) so that
    every point covers a comparable number of correlation times.  The
    autocorrelation time of the x^2 series provides the dynamic
    (epsilon) measurement; it is the statistically loosest number
    here, which is why the consistency gate is +-0.05.
    """
    if len(n_scale_list) < 2:
        raise ValueError("need at least two rescaling factors")
    if base_config is None:
        base_config = TrajectoryConfig(n_traj=1000)
    points: List[ScalingPoint] = []
    for n_scale in n_scale_list:
        scaled = scale_params(params, n_scale)
        config = _scaled_config(base_config, n_scale)
        detail = run_ensemble_detailed(scaled, config, threads=threads)
        points.append(
            ScalingPoint(
                n_scale=float(n_scale),
                params=scaled,
                x2=detail.estimates["x2"],
                p2=detail.estimates["p2"],
                relaxation_time=detail.estimates[
                    "x2"
                ].autocorrelation_time_estimate,
            )
        )

    log_n = np.log([pt.n_scale for pt in points])
    nu_fit = float(np.polyfit(log_n, np.log([pt.x2.mean for pt in points]), 1)[0]) / 2.0
    mu_fit = float(np.polyfit(log_n, np.log([pt.p2.mean for pt in points]), 1)[0]) / 2.0
    epsilon_measured = float(
        np.polyfit(log_n, np.log([pt.relaxation_time for pt in points]), 1)[0]
    )
    consistent = abs(epsilon_measured - (nu_fit - mu_fit)) <= _EPSILON_TOLERANCE
    exponents = (
        ScalingExponents.from_nu_mu(nu_fit, mu_fit) if consistent else None
    )
    return ScalingReport(
        points=tuple(points),
        nu_fit=nu_fit,
        mu_fit=mu_fit,
        epsilon_measured=epsilon_measured,
        epsilon_consistent=consistent,
        exponents=exponents,
    )
