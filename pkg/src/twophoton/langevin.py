"""Stochastic trajectory simulation of the truncated-Wigner dynamics.

The Wigner distribution of the driven-dissipative mode evolves, after
truncating third-order derivative terms, like an ensemble of classical
trajectories with multiplicative noise.  This module integrates those
trajectories and estimates stationary moments with honest error bars.

Three systems are supported: the complex-amplitude equation, the same
flow written in quadratures, and the two-variable reduced system valid
near threshold.  Each comes in a Stratonovich (stochastic Heun) and an
Ito (Euler-Maruyama) discretization; the two must agree statistically,
which is one of the package's standing cross-checks.

Reproducibility: trajectory i draws from a Philox stream keyed by
(seed, i), so results are bitwise independent of chunking, thread
count, and kernel backend.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from . import _kernels
from ._stats import batch_means, integrated_autocorrelation_time
from .model import (
    ComplexAmplitude,
    ModelParams,
    ObservableSet,
    QuadratureState,
)
from .semiclassical import steady_states

__all__ = [
    "SCHEMES",
    "SYSTEMS",
    "TrajectoryConfig",
    "MomentEstimate",
    "NoiseRealization",
    "EnsembleResult",
    "default_config",
    "step_ito",
    "step_stratonovich",
    "ito_stratonovich_drift_correction",
    "step_quadrature",
    "step_reduced_critical",
    "run_ensemble",
    "run_ensemble_detailed",
    "simulate_trajectory",
]

SCHEMES = ("ito_euler_maruyama", "stratonovich_heun")
SYSTEMS = ("full_complex", "full_quadrature", "reduced_critical")

_MIN_SAMPLES = 10_000
_STABILITY_LIMIT = 0.05
_ABORT_FACTOR = 100.0
_MAX_ABORT_FRACTION = 0.01
_N_TIME_BLOCKS = 16
_N_PROBE = 8

_MOMENT_KEYS = ("x2", "p2", "xp_sym", "x4", "x2p2", "p4")
_CRITICAL_X2_COEFF = math.sqrt(math.pi) / (3.0 ** (2.0 / 3.0) * math.gamma(7.0 / 6.0))


@dataclass(frozen=True)
class TrajectoryConfig:
    """Discretization and sampling plan for an ensemble run.

    Times are in units of 1/eta at eta = 1; the step dt must resolve
    the fastest nonlinear rate (checked against the parameters when a
    run starts, not here).  The sampling plan must yield at least ten
    thousand pooled samples, otherwise moment errors are meaningless.
    """

    dt: float = 1.0e-3
    t_burn: float = 20.0
    t_sample: float = 200.0
    sample_stride: int = 10
    n_traj: int = 2000
    seed: int = 20250814
    scheme: str = "stratonovich_heun"
    system: str = "full_quadrature"

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError("dt must be positive and finite")
        if self.t_burn < 0.0 or self.t_sample <= 0.0:
            raise ValueError("need t_burn >= 0 and t_sample > 0")
        if self.sample_stride < 1 or self.n_traj < 1:
            raise ValueError("sample_stride and n_traj must be >= 1")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r}")
        pooled = self.n_traj * (self.t_sample / self.dt / self.sample_stride)
        if pooled < _MIN_SAMPLES:
            raise ValueError(
                f"sampling plan yields ~{pooled:.0f} pooled samples; "
                f"need >= {_MIN_SAMPLES}"
            )

    @property
    def burn_steps(self) -> int:
        return int(round(self.t_burn / self.dt))

    @property
    def sample_steps(self) -> int:
        return int(round(self.t_sample / self.dt))

    @property
    def samples_per_trajectory(self) -> int:
        return self.sample_steps // self.sample_stride


def default_config(**overrides) -> TrajectoryConfig:
    """The production sampling plan, with per-field overrides."""
    return TrajectoryConfig(**overrides)


@dataclass(frozen=True)
class MomentEstimate:
    """One Monte-Carlo moment with its error analysis.

    std_error comes from batch means (at least 16 batches, batching
    over independent trajectories when possible, over long time blocks
    otherwise).  autocorrelation_time_estimate is in time units of the
    run (1/eta), from the windowed estimator on probe trajectories.
    """

    mean: float
    std_error: float
    n_samples: int
    autocorrelation_time_estimate: float


@dataclass(frozen=True)
class NoiseRealization:
    """Gaussian increments for one step; each has variance dt."""

    xi_x: float
    xi_p: float


@dataclass(frozen=True)
class EnsembleResult:
    """Full output of an ensemble run.

    observables carries the headline numbers; estimates holds the
    per-quantity error analysis, keyed by x2, p2, xp_sym, x4, x2p2,
    p4, n, a2_re, a2_im, g2.  The noise ratios audit the generated
    increments: both should be 1 within a few parts in sqrt(N).
    """

    observables: ObservableSet
    estimates: Mapping[str, MomentEstimate]
    aborted_fraction: float
    backend: str
    noise_step_variance_ratio: float
    noise_walk_variance_ratio: float
    params: ModelParams
    config: TrajectoryConfig


# ---------------------------------------------------------------------------
# Single-step operations
# ---------------------------------------------------------------------------


def _strat_drift_c(params: ModelParams, a: complex) -> complex:
    return (
        1j * params.delta * a
        - 1j * params.g * a.conjugate()
        - params.eta * a.conjugate() * a * a
    )


def _ito_drift_c(params: ModelParams, a: complex) -> complex:
    return (
        1j * params.delta * a
        - 1j * params.g * a.conjugate()
        - params.eta * a * ((a.real * a.real + a.imag * a.imag) - 1.0)
    )


def _noise_term_c(params: ModelParams, a: complex, noise: NoiseRealization) -> complex:
    xi = (noise.xi_x + 1j * noise.xi_p) / math.sqrt(2.0)
    return -1j * math.sqrt(2.0 * params.eta) * a.conjugate() * xi


def step_ito(
    params: ModelParams,
    alpha: ComplexAmplitude,
    noise: NoiseRealization,
    dt: float,
) -> ComplexAmplitude:
    """Euler-Maruyama step of the Ito-form amplitude equation.

    The Ito drift carries the +eta*alpha correction relative to the
    Stratonovich drift; the noise coefficient is evaluated at the step
    start, as the Ito integral requires.
    """
    a = alpha.to_complex()
    a = a + _ito_drift_c(params, a) * dt + _noise_term_c(params, a, noise)
    return ComplexAmplitude(a.real, a.imag)


def step_stratonovich(
    params: ModelParams,
    alpha: ComplexAmplitude,
    noise: NoiseRealization,
    dt: float,
) -> ComplexAmplitude:
    """Stochastic Heun step of the Stratonovich-form amplitude equation."""
    a = alpha.to_complex()
    a0 = _strat_drift_c(params, a)
    b0 = _noise_term_c(params, a, noise)
    pred = a + a0 * dt + b0
    a1 = _strat_drift_c(params, pred)
    b1 = _noise_term_c(params, pred, noise)
    a = a + 0.5 * (a0 + a1) * dt + 0.5 * (b0 + b1)
    return ComplexAmplitude(a.real, a.imag)


def ito_stratonovich_drift_correction(
    params: ModelParams, alpha: ComplexAmplitude
) -> ComplexAmplitude:
    """Stratonovich drift minus Ito drift: exactly -eta * alpha."""
    return ComplexAmplitude(-params.eta * alpha.re, -params.eta * alpha.im)


def step_quadrature(
    params: ModelParams,
    state: QuadratureState,
    noise: NoiseRealization,
    dt: float,
) -> QuadratureState:
    """Stochastic Heun step of the full dynamics in quadrature form."""
    delta, g, eta = params.delta, params.g, params.eta
    sqeta = math.sqrt(eta)
    x, p = state.x, state.p
    xix, xip = noise.xi_x, noise.xi_p
    r2 = x * x + p * p
    ax = -(delta + g) * p - 0.5 * eta * x * r2
    ap = (delta - g) * x - 0.5 * eta * p * r2
    bx = sqeta * (x * xip - p * xix)
    bp = -sqeta * (x * xix + p * xip)
    xh = x + ax * dt + bx
    ph = p + ap * dt + bp
    rh = xh * xh + ph * ph
    axh = -(delta + g) * ph - 0.5 * eta * xh * rh
    aph = (delta - g) * xh - 0.5 * eta * ph * rh
    bxh = sqeta * (xh * xip - ph * xix)
    bph = -sqeta * (xh * xix + ph * xip)
    return QuadratureState(
        x + 0.5 * (ax + axh) * dt + 0.5 * (bx + bxh),
        p + 0.5 * (ap + aph) * dt + 0.5 * (bp + bph),
    )


def step_reduced_critical(
    params: ModelParams,
    state: QuadratureState,
    noise: NoiseRealization,
    dt: float,
) -> QuadratureState:
    """Stochastic Heun step of the near-threshold reduced system.

    Only the xi_x increment enters; the neglected noise channels are
    subleading close to threshold.  The noise coefficient does not
    involve p, so the Ito and Stratonovich readings of this system
    coincide.
    """
    delta, g, eta = params.delta, params.g, params.eta
    sqeta = math.sqrt(eta)
    x, p = state.x, state.p
    xix = noise.xi_x
    x2 = x * x
    ax = -2.0 * g * p - 0.5 * eta * x2 * x
    ap = (delta - g) * x - 0.5 * eta * p * x2
    bp = -sqeta * x * xix
    xh = x + ax * dt
    ph = p + ap * dt + bp
    x2h = xh * xh
    axh = -2.0 * g * ph - 0.5 * eta * x2h * xh
    aph = (delta - g) * xh - 0.5 * eta * ph * x2h
    bph = -sqeta * xh * xix
    return QuadratureState(
        x + 0.5 * (ax + axh) * dt,
        p + 0.5 * (ap + aph) * dt + 0.5 * (bp + bph),
    )


# ---------------------------------------------------------------------------
# Ensemble machinery
# ---------------------------------------------------------------------------


def _threshold_photon_estimate(params: ModelParams) -> float:
    """Rough stationary photon number at threshold, from the critical
    closed form for the x-variance.  Used only to size guards."""
    x2 = _CRITICAL_X2_COEFF * params.g_over_eta ** (2.0 / 3.0)
    return max(0.0, 0.5 * (x2 + 0.5 - 1.0))


def _guard_scale(params: ModelParams) -> float:
    n_s = max(b.n_s for b in steady_states(params))
    return max(n_s, _threshold_photon_estimate(params), 1.0)


def _ic_offsets(params: ModelParams, n_traj: int) -> np.ndarray:
    """Vacuum-centered draws are shifted onto the two wells,
    alternating by trajectory index, whenever the wells exist."""
    offsets = np.zeros((n_traj, 2))
    if params.delta < params.g:
        plus = next(b for b in steady_states(params) if b.branch_sign == "plus")
        signs = np.where(np.arange(n_traj) % 2 == 0, 1.0, -1.0)
        offsets[:, 0] = signs * plus.x_s
        offsets[:, 1] = signs * plus.p_s
    return offsets


def _batch_units(
    block_sums: np.ndarray, valid: np.ndarray, n_samples: int
) -> np.ndarray:
    """Rows of quasi-independent 6-moment means for batching.

    With 16 or more surviving trajectories each row is one trajectory
    (independent by construction).  Otherwise rows are the 16 time
    blocks pooled across trajectories; each block spans many
    autocorrelation times under the default plan.
    """
    n_valid = int(valid.sum())
    if n_valid >= _N_TIME_BLOCKS:
        traj_means = block_sums[valid].sum(axis=1) / n_samples
        return traj_means
    block_tot = block_sums[valid].sum(axis=0)
    edges = (np.arange(_N_TIME_BLOCKS + 1) * n_samples) // _N_TIME_BLOCKS
    counts = np.diff(edges) * n_valid
    return block_tot / counts[:, None]


def _derived_row(m: np.ndarray) -> np.ndarray:
    """Map a 6-moment row to (n, Re a2, Im a2, g2); g2 may be nan."""
    x2, p2, xp, x4, x2p2, p4 = m
    n = 0.5 * (x2 + p2 - 1.0)
    re = 0.5 * (x2 - p2)
    im = xp
    denom = (x2 + p2 - 1.0) ** 2
    if denom > 0.0:
        g2 = (x4 + 2.0 * x2p2 + p4 - 4.0 * x2 - 4.0 * p2 + 2.0) / denom
    else:
        g2 = math.nan
    return np.array([n, re, im, g2])


def _probe_tau(
    probe: np.ndarray, valid_probe: np.ndarray, dt: float, stride: int
) -> Dict[str, float]:
    """Autocorrelation times (time units) of each moment series,
    averaged over the surviving probe trajectories."""
    spacing = dt * stride
    taus = {key: [] for key in _MOMENT_KEYS}
    for i in range(probe.shape[0]):
        if not valid_probe[i]:
            continue
        xs = probe[i, :, 0]
        ps = probe[i, :, 1]
        series = {
            "x2": xs * xs,
            "p2": ps * ps,
            "xp_sym": xs * ps,
            "x4": xs ** 4,
            "x2p2": xs * xs * ps * ps,
            "p4": ps ** 4,
        }
        for key, s in series.items():
            taus[key].append(integrated_autocorrelation_time(s) * spacing)
    return {
        key: (float(np.mean(vals)) if vals else math.nan)
        for key, vals in taus.items()
    }


def run_ensemble_detailed(
    params: ModelParams,
    config: TrajectoryConfig,
    threads: int = 1,
    backend: Optional[str] = None,
    noise_scale: float = 1.0,
) -> EnsembleResult:
    """Integrate an ensemble and estimate stationary observables.

    Refuses to start if dt cannot resolve the nonlinear rate
    (dt * eta * n_expected <= 0.05) and fails loudly if more than 1%
    of trajectories abort.  noise_scale rescales the increments and
    exists for deterministic-drift diagnostics (set it to zero);
    production statistics always use the default of one.

    threads splits trajectories into contiguous slices integrated
    concurrently; results are bitwise independent of the split.
    """
    n_guard = _guard_scale(params)
    if config.dt * params.eta * n_guard > _STABILITY_LIMIT:
        raise ValueError(
            f"dt = {config.dt:g} violates the stability guard: "
            f"dt * eta * n_expected = {config.dt * params.eta * n_guard:.3g} "
            f"> {_STABILITY_LIMIT}"
        )
    which = _kernels.active_backend(backend)
    n_traj = config.n_traj
    n_samples = config.samples_per_trajectory
    if n_samples < 1:
        raise ValueError("sampling window shorter than one stride")
    burn_steps = config.burn_steps
    sample_steps = n_samples * config.sample_stride
    total_steps = burn_steps + sample_steps
    abort_threshold = 2.0 * _ABORT_FACTOR * n_guard

    system = (
        _kernels.SYSTEM_REDUCED
        if config.system == "reduced_critical"
        else _kernels.SYSTEM_FULL
    )
    scheme = (
        _kernels.SCHEME_STRATONOVICH
        if config.scheme == "stratonovich_heun"
        else _kernels.SCHEME_ITO
    )

    offsets = _ic_offsets(params, n_traj)
    n_probe = min(_N_PROBE, n_traj)
    block_sums = np.zeros((n_traj, _N_TIME_BLOCKS, 6))
    sum_xi = np.zeros(n_traj)
    sum_xi_sq = np.zeros(n_traj)
    aborted = np.zeros(n_traj, dtype=np.uint8)
    probe = np.zeros((n_probe, n_samples, 2))

    threads = max(1, min(int(threads), n_traj))
    slices = np.array_split(np.arange(n_traj), threads)

    def task(idx: np.ndarray) -> None:
        start = int(idx[0])
        stop = int(idx[-1]) + 1
        _kernels.run_block(
            system,
            scheme,
            params.delta,
            params.g,
            params.eta,
            config.dt,
            burn_steps,
            sample_steps,
            config.sample_stride,
            abort_threshold,
            config.seed,
            start,
            offsets[start:stop],
            _N_TIME_BLOCKS,
            block_sums[start:stop],
            sum_xi[start:stop],
            sum_xi_sq[start:stop],
            aborted[start:stop],
            probe,
            noise_scale=noise_scale,
            backend=which,
        )

    if threads == 1:
        task(slices[0])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(task, slices))

    valid = aborted == 0
    n_valid = int(valid.sum())
    aborted_fraction = 1.0 - n_valid / n_traj
    if aborted_fraction > _MAX_ABORT_FRACTION:
        raise RuntimeError(
            f"{n_traj - n_valid} of {n_traj} trajectories aborted "
            f"({100 * aborted_fraction:.2f}%); reduce dt or check parameters"
        )
    if n_valid < 2:
        raise RuntimeError("fewer than two surviving trajectories")

    units = _batch_units(block_sums, valid, n_samples)
    totals = block_sums[valid].sum(axis=(0, 1))
    m6 = totals / (n_valid * n_samples)

    n_batches = min(32, units.shape[0])
    centrals = {key: float(m6[i]) for i, key in enumerate(_MOMENT_KEYS)}
    ses = {}
    for i, key in enumerate(_MOMENT_KEYS):
        _, se = batch_means(units[:, i], n_batches)
        ses[key] = se

    derived_units = np.array([_derived_row(row) for row in units])
    derived_central = _derived_row(m6)
    derived_keys = ("n", "a2_re", "a2_im", "g2")
    for i, key in enumerate(derived_keys):
        col = derived_units[:, i]
        if np.all(np.isfinite(col)):
            _, se = batch_means(col, n_batches)
        else:
            se = math.nan
        ses[key] = se
        centrals[key] = float(derived_central[i])

    valid_probe = valid[:n_probe]
    taus = _probe_tau(probe, valid_probe, config.dt, config.sample_stride)
    taus["n"] = max(taus["x2"], taus["p2"])
    taus["a2_re"] = taus["n"]
    taus["a2_im"] = taus["xp_sym"]
    taus["g2"] = max(taus[k] for k in _MOMENT_KEYS)

    pooled = n_valid * n_samples
    estimates = {
        key: MomentEstimate(
            mean=centrals[key],
            std_error=float(ses[key]),
            n_samples=pooled,
            autocorrelation_time_estimate=float(taus[key]),
        )
        for key in (*_MOMENT_KEYS, *derived_keys)
    }

    g2_central: Optional[float] = centrals["g2"]
    if not math.isfinite(g2_central):
        g2_central = None
    error_map = {
        "n": ses["n"],
        "a2_re": ses["a2_re"],
        "a2_im": ses["a2_im"],
        "x2": ses["x2"],
        "p2": ses["p2"],
        "xp_sym": ses["xp_sym"],
        "g2": ses["g2"],
    }
    observables = ObservableSet(
        n=centrals["n"],
        a2=complex(centrals["a2_re"], centrals["a2_im"]),
        x2=centrals["x2"],
        p2=centrals["p2"],
        xp_sym=centrals["xp_sym"],
        g2=g2_central,
        method="langevin",
        errors=error_map,
    )

    if noise_scale != 0.0:
        per_step_var = config.dt * noise_scale * noise_scale
        step_ratio = float(
            sum_xi_sq[valid].sum() / (n_valid * total_steps * per_step_var)
        )
        walk_ratio = float(
            (sum_xi[valid] ** 2).mean() / (total_steps * per_step_var)
        )
    else:
        step_ratio = math.nan
        walk_ratio = math.nan

    return EnsembleResult(
        observables=observables,
        estimates=estimates,
        aborted_fraction=aborted_fraction,
        backend=which,
        noise_step_variance_ratio=step_ratio,
        noise_walk_variance_ratio=walk_ratio,
        params=params,
        config=config,
    )


def run_ensemble(
    params: ModelParams,
    config: TrajectoryConfig,
    threads: int = 1,
    backend: Optional[str] = None,
) -> ObservableSet:
    """Ensemble stationary observables; see run_ensemble_detailed."""
    return run_ensemble_detailed(
        params, config, threads=threads, backend=backend
    ).observables


def simulate_trajectory(
    params: ModelParams,
    config: TrajectoryConfig,
    backend: Optional[str] = None,
    noise_scale: float = 1.0,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sampled (times, x, p) series of a single trajectory.

    Integrates trajectory index zero of the configured seed, so the
    series is bit-identical to the first member of an ensemble run
    with the same configuration.  Sampling starts after the burn-in
    and records every sample_stride-th step.  With noise_scale zero
    this reduces to the deterministic drift flow.
    """
    n_guard = _guard_scale(params)
    if config.dt * params.eta * n_guard > _STABILITY_LIMIT:
        raise ValueError(
            f"dt = {config.dt:g} violates the stability guard: "
            f"dt * eta * n_expected = {config.dt * params.eta * n_guard:.3g} "
            f"> {_STABILITY_LIMIT}"
        )
    which = _kernels.active_backend(backend)
    n_samples = config.samples_per_trajectory
    if n_samples < 1:
        raise ValueError("sampling window shorter than one stride")
    burn_steps = config.burn_steps
    sample_steps = n_samples * config.sample_stride

    system = (
        _kernels.SYSTEM_REDUCED
        if config.system == "reduced_critical"
        else _kernels.SYSTEM_FULL
    )
    scheme = (
        _kernels.SCHEME_STRATONOVICH
        if config.scheme == "stratonovich_heun"
        else _kernels.SCHEME_ITO
    )

    block_sums = np.zeros((1, _N_TIME_BLOCKS, 6))
    sum_xi = np.zeros(1)
    sum_xi_sq = np.zeros(1)
    aborted = np.zeros(1, dtype=np.uint8)
    probe = np.zeros((1, n_samples, 2))
    _kernels.run_block(
        system,
        scheme,
        params.delta,
        params.g,
        params.eta,
        config.dt,
        burn_steps,
        sample_steps,
        config.sample_stride,
        2.0 * _ABORT_FACTOR * n_guard,
        config.seed,
        0,
        _ic_offsets(params, 1),
        _N_TIME_BLOCKS,
        block_sums,
        sum_xi,
        sum_xi_sq,
        aborted,
        probe,
        noise_scale=noise_scale,
        backend=which,
    )
    if aborted[0]:
        raise RuntimeError(
            "trajectory aborted (amplitude escape); reduce dt or check "
            "parameters"
        )
    steps = burn_steps + (np.arange(n_samples) + 1) * config.sample_stride
    times = steps * config.dt
    return times, probe[0, :, 0].copy(), probe[0, :, 1].copy()
