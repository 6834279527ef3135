"""Deterministic cross-validation suite behind the --check flag.

Every identity the package's four routes must satisfy, checked in a
fixed order with fixed inputs so that repeated runs produce identical
bytes.  Checks tagged as Monte Carlo use small fixed-seed ensembles;
they are deterministic too, but their tolerances are statistical.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.integrate import simpson

from . import _kernels, equilibrium, exact, langevin, model, semiclassical
from .specfun import HypergeometricSpec, complex_gamma, hermite, pfq

__all__ = ["CheckResult", "SelfCheckReport", "run_selfcheck"]

_PARAMS_BELOW = model.ModelParams(delta=17.0, g=20.0)
_DETUNINGS = (17.0, 20.0, 23.0, 30.0)
_G_OVER_ETA = 20.0

_SMOKE_CONFIG = langevin.TrajectoryConfig(
    dt=2.0e-3,
    t_burn=10.0,
    t_sample=40.0,
    sample_stride=5,
    n_traj=32,
    seed=1234,
    scheme="stratonovich_heun",
    system="full_quadrature",
)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named check."""

    name: str
    passed: bool
    detail: str
    monte_carlo: bool = False


@dataclass(frozen=True)
class SelfCheckReport:
    """Ordered results plus the overall verdict."""

    results: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def n_failed(self) -> int:
        return sum(0 if r.passed else 1 for r in self.results)

    def summary_lines(self) -> List[str]:
        lines = []
        for r in self.results:
            tag = " [mc]" if r.monte_carlo else ""
            verdict = "PASS" if r.passed else "FAIL"
            lines.append(f"{verdict} {r.name}{tag}: {r.detail}")
        lines.append(
            f"selfcheck: {len(self.results)} checks, {self.n_failed} failed"
        )
        return lines


def _rel(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(reference), 1.0e-300)


def _crel(value: complex, reference: complex) -> float:
    return abs(value - reference) / max(abs(reference), 1.0e-300)


# ---------------------------------------------------------------------------
# Special-function identities
# ---------------------------------------------------------------------------


def _check_0f1_hyperbolic() -> CheckResult:
    worst = 0.0
    for z in (1.0, 100.0, 625.0, 2500.0):
        s = math.sqrt(z)
        got_c = pfq(HypergeometricSpec((), (0.5,), z)).value
        got_s = pfq(HypergeometricSpec((), (1.5,), z)).value
        worst = max(worst, _crel(got_c, math.cosh(2.0 * s)))
        worst = max(worst, _crel(got_s, math.sinh(2.0 * s) / (2.0 * s)))
    return CheckResult(
        "specfun.0f1_hyperbolic",
        worst <= 1.0e-10,
        f"max rel err {worst:.3e} (tol 1.0e-10)",
    )


def _check_gamma_reflection() -> CheckResult:
    worst = 0.0
    for z in (0.3 + 0.7j, 0.5 - 20.0j, 2.5 + 3.0j, -1.3 + 0.4j):
        lhs = complex_gamma(z) * complex_gamma(1.0 - z)
        rhs = math.pi / cmath.sin(math.pi * z)
        worst = max(worst, _crel(lhs, rhs))
    return CheckResult(
        "specfun.gamma_reflection",
        worst <= 1.0e-10,
        f"max rel err {worst:.3e} (tol 1.0e-10)",
    )


def _check_gamma_values() -> CheckResult:
    worst = _crel(complex_gamma(0.5), math.sqrt(math.pi))
    # Legendre duplication at z = 1/6, the value entering the critical
    # closed forms.
    z = 1.0 / 6.0
    lhs = complex_gamma(z) * complex_gamma(z + 0.5)
    rhs = 2.0 ** (1.0 - 2.0 * z) * math.sqrt(math.pi) * complex_gamma(2.0 * z)
    worst = max(worst, _crel(lhs, rhs))
    return CheckResult(
        "specfun.gamma_values",
        worst <= 1.0e-10,
        f"max rel err {worst:.3e} (tol 1.0e-10)",
    )


def _check_hermite() -> CheckResult:
    z = 0.7 + 0.2j
    explicit = 16.0 * z ** 4 - 48.0 * z ** 2 + 12.0
    worst = _crel(hermite(4, z), explicit)
    worst = max(worst, _crel(hermite(5, -z), -hermite(5, z)))
    return CheckResult(
        "specfun.hermite",
        worst <= 1.0e-12,
        f"max rel err {worst:.3e} (tol 1.0e-12)",
    )


# ---------------------------------------------------------------------------
# Exact-solution grid checks
# ---------------------------------------------------------------------------


def _wigner_grid(params: model.ModelParams):
    half = exact.default_grid_half_width(params)
    n = max(257, 2 * math.ceil(half / 0.04) + 1)
    if n % 2 == 0:
        n += 1
    axis = exact.wigner_axis(params, n_points=n, half_width=half)
    values = exact.exact_wigner_grid(params, axis, axis)
    return axis, values


def _check_wigner_normalization(grids) -> CheckResult:
    worst = 0.0
    for delta in _DETUNINGS:
        axis, values = grids[delta]
        norm = exact.grid_moment(axis, axis, values, 0, 0)
        worst = max(worst, abs(norm - 1.0))
    return CheckResult(
        "exact.wigner_normalization",
        worst <= 1.0e-6,
        f"max |norm - 1| {worst:.3e} over delta/eta in {_DETUNINGS} "
        "(tol 1.0e-6)",
    )


def _check_wigner_nonnegative(grids) -> CheckResult:
    lowest = min(float(grids[d][1].min()) for d in _DETUNINGS)
    return CheckResult(
        "exact.wigner_nonnegative",
        lowest >= -1.0e-15,
        f"min grid value {lowest:.3e} (floor -1.0e-15)",
    )


def _check_wigner_parity(grids) -> CheckResult:
    worst = 0.0
    for delta in _DETUNINGS:
        axis, values = grids[delta]
        worst = max(worst, abs(exact.grid_moment(axis, axis, values, 1, 0)))
        worst = max(worst, abs(exact.grid_moment(axis, axis, values, 0, 1)))
    return CheckResult(
        "exact.wigner_parity",
        worst <= 1.0e-9,
        f"max |odd moment| {worst:.3e} (tol 1.0e-9)",
    )


def _check_grid_vs_series(grids) -> CheckResult:
    worst = 0.0
    for delta in _DETUNINGS:
        params = model.ModelParams(delta=delta, g=_G_OVER_ETA)
        obs = exact.exact_observables(params)
        axis, values = grids[delta]
        pairs = (
            (exact.grid_moment(axis, axis, values, 2, 0), obs.x2),
            (exact.grid_moment(axis, axis, values, 0, 2), obs.p2),
        )
        for got, want in pairs:
            worst = max(worst, _rel(got, want))
        got_xp = exact.grid_moment(axis, axis, values, 1, 1)
        worst = max(worst, abs(got_xp - obs.xp_sym) / max(1.0, abs(obs.xp_sym)))
    return CheckResult(
        "exact.grid_vs_series_moments",
        worst <= 1.0e-3,
        f"max rel err {worst:.3e} (tol 1.0e-3)",
    )


def _check_quadrature_identity() -> CheckResult:
    worst = 0.0
    for delta in _DETUNINGS:
        params = model.ModelParams(delta=delta, g=_G_OVER_ETA)
        obs = exact.exact_observables(params).to_observable_set()
        worst = max(worst, obs.quadrature_identity_residual())
    return CheckResult(
        "exact.quadrature_identity",
        worst <= 1.0e-12,
        f"max residual {worst:.3e} (tol 1.0e-12)",
    )


# ---------------------------------------------------------------------------
# Effective-equilibrium checks
# ---------------------------------------------------------------------------


def _check_boltzmann_normalization() -> CheckResult:
    worst = 0.0
    for delta in (17.0, 20.0, 23.0):
        params = model.ModelParams(delta=delta, g=_G_OVER_ETA)
        eq = equilibrium.effective_equilibrium(params)
        lx = equilibrium._support_half_width(
            eq.quad_coeff, eq.sextic_coeff, eq.t_eff
        )
        lp = params.eta * lx ** 3 / (4.0 * params.g) + 4.0
        x_axis = np.linspace(-lx, lx, 769)
        p_axis = np.linspace(-lp, lp, 769)
        values = equilibrium.boltzmann_wigner(
            eq, x_axis[:, None], p_axis[None, :]
        )
        norm = exact.grid_moment(x_axis, p_axis, values, 0, 0)
        worst = max(worst, abs(norm - 1.0))
    return CheckResult(
        "equilibrium.joint_normalization",
        worst <= 1.0e-6,
        f"max |norm - 1| {worst:.3e} (tol 1.0e-6)",
    )


def _check_reduced_normalization() -> CheckResult:
    worst = 0.0
    for delta in (17.0, 20.0, 23.0):
        params = model.ModelParams(delta=delta, g=_G_OVER_ETA)
        eq = equilibrium.effective_equilibrium(params)
        lx = equilibrium._support_half_width(
            eq.quad_coeff, eq.sextic_coeff, eq.t_eff
        )
        x_axis = np.linspace(-lx, lx, 4097)
        w = equilibrium.reduced_wigner(eq, x_axis)
        norm = float(simpson(w, x=x_axis))
        worst = max(worst, abs(norm - 1.0))
    return CheckResult(
        "equilibrium.reduced_normalization",
        worst <= 1.0e-6,
        f"max |norm - 1| {worst:.3e} (tol 1.0e-6)",
    )


def _check_momentum_identity() -> CheckResult:
    worst = 0.0
    for delta in (17.0, 20.0, 23.0):
        params = model.ModelParams(delta=delta, g=_G_OVER_ETA)
        eq = equilibrium.effective_equilibrium(params)
        lhs = equilibrium.moment(eq, 2, 0)
        coeff = (params.eta / (4.0 * params.g)) ** 2
        rhs = 0.25 + coeff * equilibrium.moment(eq, 0, 6)
        worst = max(worst, _rel(lhs, rhs))
    return CheckResult(
        "equilibrium.momentum_identity",
        worst <= 1.0e-8,
        f"max rel err {worst:.3e} (tol 1.0e-8)",
    )


def _check_critical_closed_forms() -> CheckResult:
    params = model.ModelParams(delta=_G_OVER_ETA, g=_G_OVER_ETA)
    eq = equilibrium.effective_equilibrium(params)
    closed = equilibrium.critical_closed_forms(params)
    worst = _rel(equilibrium.moment(eq, 0, 2), closed.x2)
    worst = max(worst, _rel(equilibrium.moment(eq, 2, 0), closed.p2))
    worst = max(worst, _rel(equilibrium.moment(eq, 1, 1), closed.xp_sym))
    worst = max(worst, abs(closed.p2 - 0.5))
    worst = max(worst, abs(equilibrium.critical_g2_x_only() - 2.0))
    return CheckResult(
        "equilibrium.critical_closed_forms",
        worst <= 1.0e-8,
        f"max deviation {worst:.3e} (tol 1.0e-8)",
    )


# ---------------------------------------------------------------------------
# Mean-field and model checks
# ---------------------------------------------------------------------------


def _check_fixed_points() -> CheckResult:
    worst = 0.0
    for branch in semiclassical.steady_states(_PARAMS_BELOW):
        v = semiclassical.drift(_PARAMS_BELOW, branch.amplitude)
        worst = max(worst, math.hypot(v.re, v.im))
    return CheckResult(
        "semiclassical.fixed_points",
        worst <= 1.0e-9,
        f"max |drift| {worst:.3e} (tol 1.0e-9)",
    )


def _check_quadrature_roundtrip() -> CheckResult:
    alpha = model.ComplexAmplitude(1.234, -0.567)
    state = model.amplitude_to_quadratures(alpha)
    back = model.quadratures_to_amplitude(state)
    err = math.hypot(back.re - alpha.re, back.im - alpha.im)
    return CheckResult(
        "model.quadrature_roundtrip",
        err <= 1.0e-15,
        f"roundtrip error {err:.3e} (tol 1.0e-15)",
    )


# ---------------------------------------------------------------------------
# Monte-Carlo smoke checks (fixed seed, deterministic output)
# ---------------------------------------------------------------------------


def _ensemble_fingerprint(res: langevin.EnsembleResult) -> Tuple[str, ...]:
    # repr strings so that NaN entries (possible for the g2 error when
    # a batch loses its denominator) still compare equal.
    keys = sorted(res.estimates)
    values: List[str] = []
    for key in keys:
        est = res.estimates[key]
        values.extend([repr(est.mean), repr(est.std_error)])
    return tuple(values)


def _check_langevin_determinism(threads: int) -> Tuple[CheckResult, ...]:
    res_a = langevin.run_ensemble_detailed(
        _PARAMS_BELOW, _SMOKE_CONFIG, threads=1
    )
    res_b = langevin.run_ensemble_detailed(
        _PARAMS_BELOW, _SMOKE_CONFIG, threads=max(2, threads)
    )
    identical = _ensemble_fingerprint(res_a) == _ensemble_fingerprint(res_b)
    results = [
        CheckResult(
            "langevin.thread_invariance",
            identical,
            "1-thread and multi-thread runs bitwise identical"
            if identical
            else "thread count changed the estimates",
            monte_carlo=True,
        )
    ]

    backends = _kernels.available_backends()
    if len(backends) > 1:
        res_py = langevin.run_ensemble_detailed(
            _PARAMS_BELOW, _SMOKE_CONFIG, backend="python"
        )
        same = _ensemble_fingerprint(res_a) == _ensemble_fingerprint(res_py)
        results.append(
            CheckResult(
                "langevin.backend_equivalence",
                same,
                "compiled and python backends bitwise identical"
                if same
                else "backends disagree",
                monte_carlo=True,
            )
        )
    else:
        results.append(
            CheckResult(
                "langevin.backend_equivalence",
                True,
                "skipped (only the python backend is available)",
                monte_carlo=True,
            )
        )

    # Walk-ratio spread is chi-squared with one dof per trajectory, so
    # its corridor is far wider than the per-step one.
    results.append(
        CheckResult(
            "langevin.noise_audit",
            abs(res_a.noise_step_variance_ratio - 1.0) <= 0.01
            and abs(res_a.noise_walk_variance_ratio - 1.0) <= 0.9,
            f"step ratio {res_a.noise_step_variance_ratio:.6f} "
            f"(tol 0.01), walk ratio "
            f"{res_a.noise_walk_variance_ratio:.4f} (tol 0.9)",
            monte_carlo=True,
        )
    )

    obs = exact.exact_observables(_PARAMS_BELOW)
    rel = _rel(res_a.observables.x2, obs.x2)
    results.append(
        CheckResult(
            "langevin.smoke_vs_exact",
            rel <= 0.10 and res_a.aborted_fraction == 0.0,
            f"x2 rel dev {rel:.3e} (corridor 0.10), "
            f"aborted fraction {res_a.aborted_fraction:.3f}",
            monte_carlo=True,
        )
    )
    residual = res_a.observables.quadrature_identity_residual()
    results.append(
        CheckResult(
            "langevin.quadrature_identity",
            residual <= 1.0e-12,
            f"residual {residual:.3e} (tol 1.0e-12)",
            monte_carlo=True,
        )
    )
    return tuple(results)


def run_selfcheck(threads: int = 2, include_monte_carlo: bool = True) -> SelfCheckReport:
    """Run every check in a fixed order and collect the results."""
    results: List[CheckResult] = [
        _check_0f1_hyperbolic(),
        _check_gamma_reflection(),
        _check_gamma_values(),
        _check_hermite(),
        _check_quadrature_roundtrip(),
        _check_fixed_points(),
    ]
    grids = {
        delta: _wigner_grid(model.ModelParams(delta=delta, g=_G_OVER_ETA))
        for delta in _DETUNINGS
    }
    results.extend(
        [
            _check_wigner_normalization(grids),
            _check_wigner_nonnegative(grids),
            _check_wigner_parity(grids),
            _check_grid_vs_series(grids),
            _check_quadrature_identity(),
            _check_boltzmann_normalization(),
            _check_reduced_normalization(),
            _check_momentum_identity(),
            _check_critical_closed_forms(),
        ]
    )
    if include_monte_carlo:
        results.extend(_check_langevin_determinism(threads))
    return SelfCheckReport(results=tuple(results))
