"""Error analysis for correlated Monte-Carlo series.

Batch means for standard errors and the windowed (Sokal) estimator of
the integrated autocorrelation time.  Both are standard constructions;
they live here so the ensemble code stays focused on the dynamics.
"""
from __future__ import annotations

import math
from typing import Sequence, Tuple

import numpy as np

__all__ = [
    "batch_means",
    "integrated_autocorrelation_time",
]

MIN_BATCHES = 16
MAX_BATCHES = 32


def batch_means(values: np.ndarray, n_batches: int) -> Tuple[float, float]:
    """Mean and batch-means standard error of a 1-D sample.

    Contiguous batches; the standard error is the spread of the batch
    means over sqrt(n_batches).  Callers choose batches so that either
    the entries are independent (per-trajectory means) or each batch
    spans many correlation times (time blocks).
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("need a 1-D sample with at least two entries")
    n_batches = int(min(n_batches, v.size))
    if n_batches < 2:
        raise ValueError("need at least two batches")
    means = np.array([chunk.mean() for chunk in np.array_split(v, n_batches)])
    se = float(means.std(ddof=1) / math.sqrt(n_batches))
    return float(v.mean()), se


def _next_pow_two(n: int) -> int:
    k = 1
    while k < n:
        k <<= 1
    return k


def _autocorrelation(series: np.ndarray) -> np.ndarray:
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    n = x.size
    f = np.fft.rfft(x, n=2 * _next_pow_two(n))
    acov = np.fft.irfft(f * np.conjugate(f))[:n].real
    if acov[0] <= 0.0:
        return np.zeros(n)
    return acov / acov[0]


def integrated_autocorrelation_time(
    series: np.ndarray, window_factor: float = 5.0
) -> float:
    """Windowed integrated autocorrelation time, in sample units.

    tau(M) = 1 + 2 sum_{t<=M} rho(t), evaluated at the smallest window
    M >= window_factor * tau(M).  An uncorrelated series gives 1.  If
    no admissible window exists below n/4 the estimate at n/4 is
    returned; it is then a lower bound and the caller should treat the
    series as under-resolved.
    """
    x = np.asarray(series, dtype=float)
    if x.size < 8:
        raise ValueError("series too short for an autocorrelation estimate")
    rho = _autocorrelation(x)
    if not np.any(rho):
        return 1.0
    max_lag = x.size // 4
    taus = 1.0 + 2.0 * np.cumsum(rho[1 : max_lag + 1])
    windows = np.arange(1, taus.size + 1)
    admissible = windows >= window_factor * taus
    if np.any(admissible):
        m = int(np.argmax(admissible))
        return float(max(taus[m], 1.0e-12))
    return float(max(taus[-1], 1.0e-12))


def pooled_mean(per_unit_means: Sequence[float]) -> float:
    """Plain average across equally weighted units, fixed order."""
    return float(np.asarray(per_unit_means, dtype=float).mean())
