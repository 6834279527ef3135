"""Mean-field steady states and deterministic transients.

Dropping quantum noise from the field equation leaves

    d(alpha)/dt = i*delta*alpha - i*g*conj(alpha) - eta*|alpha|^2*alpha.

Below threshold (g^2 > delta^2) this supports two symmetry-broken
fixed points at photon number n_s = sqrt(g^2 - delta^2)/eta alongside
the vacuum; above threshold only the vacuum survives.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .model import ComplexAmplitude, ModelParams, ObservableSet

__all__ = [
    "SteadyStateBranch",
    "DivergenceError",
    "steady_states",
    "semiclassical_observables",
    "drift",
    "evolve",
]

BRANCH_SIGNS = ("plus", "minus", "vacuum")


class DivergenceError(RuntimeError):
    """Raised when a trajectory escapes the physically plausible region."""

    def __init__(self, t: float, amplitude_sq: float):
        super().__init__(
            f"trajectory diverged at t = {t:.6g} with |alpha|^2 = {amplitude_sq:.6g}"
        )
        self.t = t
        self.amplitude_sq = amplitude_sq


@dataclass(frozen=True)
class SteadyStateBranch:
    """One stationary mean-field solution.

    phase_factor is e^{2 i phi} for the field phase phi; it sits on
    the unit circle for the nontrivial branches and is fixed to 1 by
    convention on the vacuum branch, where the phase is undefined.
    """

    n_s: float
    phase_factor: complex
    x_s: float
    p_s: float
    branch_sign: str

    def __post_init__(self) -> None:
        if self.branch_sign not in BRANCH_SIGNS:
            raise ValueError(f"unknown branch sign {self.branch_sign!r}")
        if self.n_s < 0.0:
            raise ValueError("n_s must be non-negative")

    @property
    def amplitude(self) -> ComplexAmplitude:
        return ComplexAmplitude(self.x_s / math.sqrt(2.0), self.p_s / math.sqrt(2.0))


def steady_states(params: ModelParams) -> List[SteadyStateBranch]:
    """All stationary solutions of the mean-field flow.

    Returns the plus and minus symmetry-broken branches followed by
    the vacuum when g^2 > delta^2, else the vacuum alone.  The two
    nontrivial branches are related by alpha -> -alpha.
    """
    delta, g, eta = params.delta, params.g, params.eta
    branches: List[SteadyStateBranch] = []
    disc = g * g - delta * delta
    if disc > 0.0:
        n_s = math.sqrt(disc) / eta
        # Stationarity fixes e^{2 i phi} = (delta - i eta n_s) / g, so
        # the principal phase lies in (-pi/2, 0): x_s > 0, p_s < 0.
        phase_factor = complex(delta, -eta * n_s) / g
        phi = 0.5 * cmath.phase(phase_factor)
        r = math.sqrt(2.0 * n_s)
        x_s = r * math.cos(phi)
        p_s = r * math.sin(phi)
        branches.append(SteadyStateBranch(n_s, phase_factor, x_s, p_s, "plus"))
        branches.append(SteadyStateBranch(n_s, phase_factor, -x_s, -p_s, "minus"))
    branches.append(SteadyStateBranch(0.0, 1.0 + 0.0j, 0.0, 0.0, "vacuum"))
    return branches


def semiclassical_observables(params: ModelParams) -> ObservableSet:
    """Stationary observables of the mean-field theory.

    Below threshold the physical state is the equal-weight mixture of
    the two symmetry-broken wells, which share n, a^2 and all even
    quadrature moments.  Mean-field trajectories carry no fluctuations,
    so the vacuum branch has identically zero moments (no half-photon
    floor) and an undefined g2.
    """
    branches = steady_states(params)
    top = branches[0]
    if top.n_s <= 0.0:
        return ObservableSet(
            n=0.0,
            a2=0.0j,
            x2=0.0,
            p2=0.0,
            xp_sym=0.0,
            g2=None,
            method="semiclassical",
        )
    return ObservableSet(
        n=top.n_s,
        a2=top.n_s * top.phase_factor,
        x2=top.x_s * top.x_s,
        p2=top.p_s * top.p_s,
        xp_sym=top.x_s * top.p_s,
        g2=1.0,
        method="semiclassical",
    )


def drift(params: ModelParams, alpha: ComplexAmplitude) -> ComplexAmplitude:
    """Deterministic part of the field equation of motion."""
    a = alpha.to_complex()
    v = (
        1j * params.delta * a
        - 1j * params.g * a.conjugate()
        - params.eta * (a.real * a.real + a.imag * a.imag) * a
    )
    return ComplexAmplitude(v.real, v.imag)


def _drift_c(delta: float, g: float, eta: float, a: complex) -> complex:
    return 1j * delta * a - 1j * g * a.conjugate() - eta * abs(a) ** 2 * a


def evolve(
    params: ModelParams,
    alpha0: ComplexAmplitude,
    t_final: float,
    dt: float,
    sample_stride: int = 1,
) -> Tuple[np.ndarray, np.ndarray]:
    """Integrate the mean-field flow with fixed-step 4th-order Runge-Kutta.

    Parameters
    ----------
    params, alpha0 : system and initial amplitude.
    t_final, dt : integration horizon and step; the step must satisfy
        dt * max(|delta|, g, eta * n_s) <= 0.1 or the call is refused.
    sample_stride : keep every ``sample_stride``-th step in the output.

    Returns
    -------
    (times, alphas) : matching 1-D arrays, complex amplitudes in
        ``alphas``.  The initial condition is always included.

    Raises
    ------
    DivergenceError
        If |alpha|^2 exceeds 1000 * max(n_s, 1), which no physical
        transient of this model reaches.
    """
    if dt <= 0.0 or t_final < 0.0:
        raise ValueError("need dt > 0 and t_final >= 0")
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")
    n_s = max((b.n_s for b in steady_states(params)), default=0.0)
    rate = max(abs(params.delta), params.g, params.eta * n_s)
    if dt * rate > 0.1:
        raise ValueError(
            f"dt = {dt} too large for rates present (dt * {rate:.4g} > 0.1)"
        )
    escape = 1.0e3 * max(n_s, 1.0)

    n_steps = int(round(t_final / dt))
    delta, g, eta = params.delta, params.g, params.eta
    a = alpha0.to_complex()
    times = [0.0]
    alphas = [a]
    for step in range(1, n_steps + 1):
        k1 = _drift_c(delta, g, eta, a)
        k2 = _drift_c(delta, g, eta, a + 0.5 * dt * k1)
        k3 = _drift_c(delta, g, eta, a + 0.5 * dt * k2)
        k4 = _drift_c(delta, g, eta, a + dt * k3)
        a = a + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        mod_sq = a.real * a.real + a.imag * a.imag
        if not math.isfinite(mod_sq) or mod_sq > escape:
            raise DivergenceError(step * dt, mod_sq)
        if step % sample_stride == 0 or step == n_steps:
            times.append(step * dt)
            alphas.append(a)
    return np.asarray(times), np.asarray(alphas, dtype=np.complex128)
