"""Adaptive Simpson quadrature for 1-D equilibrium integrals.

Fixed phase-space grids use scipy's composite Simpson rule; this
module provides the adaptive variant used where the integrand support
shrinks or spreads strongly with the coupling (partition functions and
potential moments).
"""
from __future__ import annotations

from typing import Callable

__all__ = ["adaptive_simpson"]

_MAX_DEPTH = 48


def _simpson(fa, fm, fb, h):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _recurse(f, a, m, b, fa, fm, fb, whole, tol, depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if depth <= 0:
        raise RuntimeError("adaptive Simpson recursion limit reached")
    # Standard Richardson acceptance test for the composite rule.
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _recurse(
        f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1
    ) + _recurse(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)


def adaptive_simpson(
    f: Callable[[float], complex],
    a: float,
    b: float,
    abs_tol: float,
) -> complex:
    """Integrate ``f`` over [a, b] to absolute tolerance ``abs_tol``.

    The integrand may return real or complex values.  Subdivision
    halts when the local Richardson estimate meets the (halved per
    level) tolerance budget; pathological integrands that never settle
    raise rather than returning a silently wrong value.
    """
    if not (abs_tol > 0.0):
        raise ValueError("abs_tol must be positive")
    if a == b:
        return 0.0 * f(a)
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = _simpson(fa, fm, fb, b - a)
    # Seed a second level immediately: a single panel can fool the
    # acceptance test on symmetric integrands.
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    return _recurse(
        f, a, lm, m, fa, flm, fm, left, 0.5 * abs_tol, _MAX_DEPTH
    ) + _recurse(f, m, rm, b, fm, frm, fb, right, 0.5 * abs_tol, _MAX_DEPTH)
