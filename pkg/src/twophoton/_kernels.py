"""Trajectory-integration kernels.

Two interchangeable backends step the stochastic dynamics: a compiled
extension (built from _kernels_cy.pyx) and a numpy-vectorized fallback.
Both consume identical pre-generated noise arrays and apply identical
floating-point expression trees, so a given seed produces bitwise
identical accumulators on either backend; the extension is compiled
with floating-point contraction disabled to keep that guarantee.

Backend choice: the TWOPHOTON_KERNEL environment variable may be
"auto" (compiled when available, the default), "compiled", or
"python".

Noise accounting per trajectory, shared by both backends: two draws
for the initial condition, then exactly two per step regardless of
system or scheme.  This fixed budget makes the stream independent of
chunk size, thread count, and backend.
"""
from __future__ import annotations

import math
import os
from typing import List, Optional

import numpy as np

try:
    from . import _kernels_cy as _compiled
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None

__all__ = [
    "SYSTEM_FULL",
    "SYSTEM_REDUCED",
    "SCHEME_STRATONOVICH",
    "SCHEME_ITO",
    "active_backend",
    "available_backends",
    "run_block",
]

SYSTEM_FULL = 0
SYSTEM_REDUCED = 1
SCHEME_STRATONOVICH = 0
SCHEME_ITO = 1

_ENV_VAR = "TWOPHOTON_KERNEL"
_IC_STD = math.sqrt(0.5)
_DEFAULT_CHUNK = 1024


def available_backends() -> List[str]:
    backends = ["python"]
    if _compiled is not None:
        backends.insert(0, "compiled")
    return backends


def active_backend(requested: Optional[str] = None) -> str:
    """Resolve the backend name, honoring the environment override."""
    choice = requested or os.environ.get(_ENV_VAR, "auto")
    if choice == "auto":
        return "compiled" if _compiled is not None else "python"
    if choice == "compiled":
        if _compiled is None:
            raise RuntimeError(
                "compiled kernel requested but the extension is not built"
            )
        return "compiled"
    if choice == "python":
        return "python"
    raise ValueError(f"unknown kernel backend {choice!r}")


def _generators(seed: int, traj_start: int, n_block: int):
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return [
        np.random.Generator(
            np.random.Philox(key=np.array([seed, traj_start + i], dtype=np.uint64))
        )
        for i in range(n_block)
    ]


def run_block(
    system: int,
    scheme: int,
    delta: float,
    g: float,
    eta: float,
    dt: float,
    burn_steps: int,
    sample_steps: int,
    stride: int,
    abort_threshold: float,
    seed: int,
    traj_start: int,
    ic_offsets: np.ndarray,
    n_blocks: int,
    block_sums: np.ndarray,
    sum_xi: np.ndarray,
    sum_xi_sq: np.ndarray,
    aborted: np.ndarray,
    probe: np.ndarray,
    chunk_steps: int = _DEFAULT_CHUNK,
    noise_scale: float = 1.0,
    backend: Optional[str] = None,
) -> None:
    """Integrate one contiguous block of trajectories in place.

    ic_offsets has shape (n_block, 2) and holds the well-centering
    offsets added to the vacuum initial draw.  Output arrays are the
    caller's rows for this block: block_sums (n_block, n_blocks, 6)
    accumulates x^2, p^2, xp, x^4, x^2 p^2, p^4 per time block;
    sum_xi and sum_xi_sq audit the xi_x increments; aborted flags
    diverged trajectories (their state is pinned to the origin, which
    every system fixes, and their rows are excluded downstream).
    probe rows [traj_start + i] for global indices below probe.shape[0]
    receive the sampled (x, p) series.  abort_threshold bounds
    x^2 + p^2.
    """
    which = active_backend(backend)
    n_block = ic_offsets.shape[0]
    n_samples = sample_steps // stride
    total_steps = burn_steps + sample_steps
    gens = _generators(seed, traj_start, n_block)

    x = np.empty(n_block, dtype=np.float64)
    p = np.empty(n_block, dtype=np.float64)
    for i, gen in enumerate(gens):
        z = gen.standard_normal(2)
        x[i] = ic_offsets[i, 0] + _IC_STD * z[0]
        p[i] = ic_offsets[i, 1] + _IC_STD * z[1]

    scale = math.sqrt(dt) * noise_scale
    step_fn = _compiled.step_chunk if which == "compiled" else _step_chunk_python
    done = 0
    while done < total_steps:
        c = int(min(chunk_steps, total_steps - done))
        noise = np.empty((n_block, c, 2), dtype=np.float64)
        for i, gen in enumerate(gens):
            gen.standard_normal(out=noise[i])
        noise *= scale
        step_fn(
            system,
            scheme,
            delta,
            g,
            eta,
            dt,
            abort_threshold,
            done,
            burn_steps,
            stride,
            n_samples,
            n_blocks,
            noise,
            x,
            p,
            aborted,
            block_sums,
            sum_xi,
            sum_xi_sq,
            probe,
            traj_start,
        )
        done += c


def _step_chunk_python(
    system,
    scheme,
    delta,
    g,
    eta,
    dt,
    abort_threshold,
    step_start,
    burn_steps,
    stride,
    n_samples,
    n_blocks,
    noise,
    x,
    p,
    aborted,
    block_sums,
    sum_xi,
    sum_xi_sq,
    probe,
    traj_start,
):
    """Numpy twin of the compiled chunk stepper.

    Vectorized across trajectories, one python-level iteration per
    step.  Every arithmetic expression below is transcribed verbatim
    in the compiled kernel; edit the two together.
    """
    sqeta = math.sqrt(eta)
    n_block = x.shape[0]
    c = noise.shape[1]
    n_probe_local = min(max(probe.shape[0] - traj_start, 0), n_block)
    flagged = aborted.view(bool)

    for j in range(c):
        xix = noise[:, j, 0]
        xip = noise[:, j, 1]
        sum_xi += xix
        sum_xi_sq += xix * xix

        if system == SYSTEM_FULL:
            if scheme == SCHEME_STRATONOVICH:
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
                xn = x + 0.5 * (ax + axh) * dt + 0.5 * (bx + bxh)
                pn = p + 0.5 * (ap + aph) * dt + 0.5 * (bp + bph)
            else:
                r2 = x * x + p * p
                ax = -(delta + g) * p - 0.5 * eta * x * r2 + eta * x
                ap = (delta - g) * x - 0.5 * eta * p * r2 + eta * p
                bx = sqeta * (x * xip - p * xix)
                bp = -sqeta * (x * xix + p * xip)
                xn = x + ax * dt + bx
                pn = p + ap * dt + bp
        else:
            if scheme == SCHEME_STRATONOVICH:
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
                xn = x + 0.5 * (ax + axh) * dt
                pn = p + 0.5 * (ap + aph) * dt + 0.5 * (bp + bph)
            else:
                x2 = x * x
                ax = -2.0 * g * p - 0.5 * eta * x2 * x
                ap = (delta - g) * x - 0.5 * eta * p * x2
                bp = -sqeta * x * xix
                xn = x + ax * dt
                pn = p + ap * dt + bp

        x[:] = xn
        p[:] = pn

        chk = x * x + p * p
        bad = ~np.isfinite(chk) | (chk > abort_threshold)
        if bad.any():
            x[bad] = 0.0
            p[bad] = 0.0
            flagged[bad] = True

        k = step_start + j + 1
        if k > burn_steps and (k - burn_steps) % stride == 0:
            s = (k - burn_steps) // stride - 1
            b = (s * n_blocks) // n_samples
            x2v = x * x
            p2v = p * p
            xpv = x * p
            block_sums[:, b, 0] += x2v
            block_sums[:, b, 1] += p2v
            block_sums[:, b, 2] += xpv
            block_sums[:, b, 3] += x2v * x2v
            block_sums[:, b, 4] += x2v * p2v
            block_sums[:, b, 5] += p2v * p2v
            if n_probe_local > 0:
                probe[traj_start : traj_start + n_probe_local, s, 0] = x[
                    :n_probe_local
                ]
                probe[traj_start : traj_start + n_probe_local, s, 1] = p[
                    :n_probe_local
                ]
