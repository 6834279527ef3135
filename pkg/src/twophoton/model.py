"""Core domain types shared by every solution method.

The physical system is a single oscillator mode subject to coherent
two-photon driving (rate ``g``), two-photon dissipation (rate ``eta``)
and a detuning ``delta``.  Quadratures follow the convention
``x = sqrt(2) Re[alpha]``, ``p = sqrt(2) Im[alpha]``, so the vacuum has
``<x^2> = <p^2> = 1/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

__all__ = [
    "ModelParams",
    "ComplexAmplitude",
    "QuadratureState",
    "ObservableSet",
    "METHODS",
    "energy_gap",
    "amplitude_to_quadratures",
    "quadratures_to_amplitude",
    "observables_from_quadrature_moments",
]

METHODS = ("semiclassical", "exact", "boltzmann", "langevin")


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Physical rates (delta, g, eta) defining one oscillator instance.

    All three carry units of a rate; every dimensionless observable is
    invariant under the simultaneous rescaling
    (delta, g, eta, t) -> (s*delta, s*g, s*eta, t/s).
    """

    delta: float
    g: float
    eta: float = 1.0

    def __post_init__(self) -> None:
        for name in ("delta", "g", "eta"):
            _require_finite(name, getattr(self, name))
        if self.eta <= 0.0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.g < 0.0:
            raise ValueError(f"g must be non-negative, got {self.g}")

    @property
    def delta_over_eta(self) -> float:
        return self.delta / self.eta

    @property
    def g_over_eta(self) -> float:
        return self.g / self.eta

    def rescaled(self, s: float) -> "ModelParams":
        """Return the same physics expressed in units scaled by ``s``."""
        if s <= 0.0:
            raise ValueError("scale factor must be positive")
        return ModelParams(self.delta * s, self.g * s, self.eta * s)


@dataclass(frozen=True)
class ComplexAmplitude:
    """The coherent field amplitude alpha, stored as (re, im)."""

    re: float
    im: float

    def __post_init__(self) -> None:
        _require_finite("re", self.re)
        _require_finite("im", self.im)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexAmplitude":
        return cls(z.real, z.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class QuadratureState:
    """Photonic quadrature pair (x, p)."""

    x: float
    p: float

    def __post_init__(self) -> None:
        _require_finite("x", self.x)
        _require_finite("p", self.p)


_SQRT2 = math.sqrt(2.0)


def amplitude_to_quadratures(a: ComplexAmplitude) -> QuadratureState:
    """x = sqrt(2)*Re[alpha], p = sqrt(2)*Im[alpha]."""
    return QuadratureState(_SQRT2 * a.re, _SQRT2 * a.im)


def quadratures_to_amplitude(q: QuadratureState) -> ComplexAmplitude:
    """Inverse of :func:`amplitude_to_quadratures`."""
    return ComplexAmplitude(q.x / _SQRT2, q.p / _SQRT2)


@dataclass(frozen=True)
class ObservableSet:
    """Steady-state observables with provenance.

    ``g2`` is the normalized second-order correlation
    <a^+ a^+ a a> / <a^+ a>^2; it is ``None`` for a vacuum state where
    the ratio is undefined.  ``errors`` maps field names to standard
    errors and is present only for Monte-Carlo results.
    """

    n: float
    a2: complex
    x2: float
    p2: float
    xp_sym: float
    g2: Optional[float]
    method: str
    errors: Optional[Mapping[str, float]] = field(default=None)

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        for name in ("n", "x2", "p2", "xp_sym"):
            _require_finite(name, getattr(self, name))
        if not (math.isfinite(self.a2.real) and math.isfinite(self.a2.imag)):
            raise ValueError("a2 must be finite")
        if self.g2 is not None:
            _require_finite("g2", self.g2)

    def quadrature_identity_residual(self) -> float:
        """Largest absolute residual of the moment identities.

        The identities link the quadrature variances to the photon
        number and the anomalous average:
        x2 = n + Re[a2] + 1/2, p2 = n - Re[a2] + 1/2, xp_sym = Im[a2].
        """
        r1 = self.x2 - (self.n + self.a2.real + 0.5)
        r2 = self.p2 - (self.n - self.a2.real + 0.5)
        r3 = self.xp_sym - self.a2.imag
        return max(abs(r1), abs(r2), abs(r3))


def energy_gap(params: ModelParams) -> Optional[float]:
    """Spectral gap sqrt(delta^2 - g^2) of the linearized problem.

    Returns ``None`` when delta < g: the gap is closed there (spectral
    collapse region).
    """
    d2 = params.delta * params.delta
    g2 = params.g * params.g
    if d2 < g2:
        return None
    return math.sqrt(d2 - g2)


def observables_from_quadrature_moments(
    x2: float,
    p2: float,
    xp: float,
    x4: float,
    x2p2: float,
    p4: float,
    method: str,
    errors: Optional[Mapping[str, float]] = None,
) -> ObservableSet:
    """Assemble an :class:`ObservableSet` from symmetrized moments.

    Inverts the quadrature identities for n and a2, and evaluates g2
    from the phase-space moments:

        g2 = (x4 + 2*x2p2 + p4 - 4*x2 - 4*p2 + 2) / (x2 + p2 - 1)^2.

    The denominator vanishes for the vacuum; g2 is then ``None``.
    """
    n = 0.5 * (x2 + p2 - 1.0)
    a2 = complex(0.5 * (x2 - p2), xp)
    denom = (x2 + p2 - 1.0) ** 2
    if denom > 0.0:
        g2 = (x4 + 2.0 * x2p2 + p4 - 4.0 * x2 - 4.0 * p2 + 2.0) / denom
    else:
        g2 = None
    return ObservableSet(
        n=n, a2=a2, x2=x2, p2=p2, xp_sym=xp, g2=g2, method=method, errors=errors
    )
