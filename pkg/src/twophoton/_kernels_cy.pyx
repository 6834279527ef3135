# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled chunk stepper for the stochastic kernels.

This is a line-for-line transcription of _kernels._step_chunk_python
into scalar C: same expression trees in the same order, so that both
backends produce bitwise identical trajectories from identical noise
arrays.  The build disables floating-point contraction for the same
reason.  Edit the two files together.
"""

from libc.math cimport isfinite, sqrt


def step_chunk(
    int system,
    int scheme,
    double delta,
    double g,
    double eta,
    double dt,
    double abort_threshold,
    long long step_start,
    long long burn_steps,
    long long stride,
    long long n_samples,
    long long n_blocks,
    double[:, :, ::1] noise,
    double[::1] x,
    double[::1] p,
    unsigned char[::1] aborted,
    double[:, :, ::1] block_sums,
    double[::1] sum_xi,
    double[::1] sum_xi_sq,
    double[:, :, ::1] probe,
    long long traj_start,
):
    cdef Py_ssize_t n_block = x.shape[0]
    cdef Py_ssize_t c = noise.shape[1]
    cdef Py_ssize_t n_probe_local = probe.shape[0] - traj_start
    if n_probe_local < 0:
        n_probe_local = 0
    if n_probe_local > n_block:
        n_probe_local = n_block

    cdef double sqeta = sqrt(eta)
    cdef Py_ssize_t i, j
    cdef long long k, s, b
    cdef double xi, pi, xix, xip
    cdef double r2, ax, ap, bx, bp, xh, ph, rh, axh, aph, bxh, bph, xn, pn
    cdef double x2, x2h, chk, x2v, p2v, xpv

    with nogil:
        for i in range(n_block):
            xi = x[i]
            pi = p[i]
            for j in range(c):
                xix = noise[i, j, 0]
                xip = noise[i, j, 1]
                sum_xi[i] = sum_xi[i] + xix
                sum_xi_sq[i] = sum_xi_sq[i] + xix * xix

                if system == 0:
                    if scheme == 0:
                        r2 = xi * xi + pi * pi
                        ax = -(delta + g) * pi - 0.5 * eta * xi * r2
                        ap = (delta - g) * xi - 0.5 * eta * pi * r2
                        bx = sqeta * (xi * xip - pi * xix)
                        bp = -sqeta * (xi * xix + pi * xip)
                        xh = xi + ax * dt + bx
                        ph = pi + ap * dt + bp
                        rh = xh * xh + ph * ph
                        axh = -(delta + g) * ph - 0.5 * eta * xh * rh
                        aph = (delta - g) * xh - 0.5 * eta * ph * rh
                        bxh = sqeta * (xh * xip - ph * xix)
                        bph = -sqeta * (xh * xix + ph * xip)
                        xn = xi + 0.5 * (ax + axh) * dt + 0.5 * (bx + bxh)
                        pn = pi + 0.5 * (ap + aph) * dt + 0.5 * (bp + bph)
                    else:
                        r2 = xi * xi + pi * pi
                        ax = -(delta + g) * pi - 0.5 * eta * xi * r2 + eta * xi
                        ap = (delta - g) * xi - 0.5 * eta * pi * r2 + eta * pi
                        bx = sqeta * (xi * xip - pi * xix)
                        bp = -sqeta * (xi * xix + pi * xip)
                        xn = xi + ax * dt + bx
                        pn = pi + ap * dt + bp
                else:
                    if scheme == 0:
                        x2 = xi * xi
                        ax = -2.0 * g * pi - 0.5 * eta * x2 * xi
                        ap = (delta - g) * xi - 0.5 * eta * pi * x2
                        bp = -sqeta * xi * xix
                        xh = xi + ax * dt
                        ph = pi + ap * dt + bp
                        x2h = xh * xh
                        axh = -2.0 * g * ph - 0.5 * eta * x2h * xh
                        aph = (delta - g) * xh - 0.5 * eta * ph * x2h
                        bph = -sqeta * xh * xix
                        xn = xi + 0.5 * (ax + axh) * dt
                        pn = pi + 0.5 * (ap + aph) * dt + 0.5 * (bp + bph)
                    else:
                        x2 = xi * xi
                        ax = -2.0 * g * pi - 0.5 * eta * x2 * xi
                        ap = (delta - g) * xi - 0.5 * eta * pi * x2
                        bp = -sqeta * xi * xix
                        xn = xi + ax * dt
                        pn = pi + ap * dt + bp

                xi = xn
                pi = pn

                chk = xi * xi + pi * pi
                if (not isfinite(chk)) or chk > abort_threshold:
                    xi = 0.0
                    pi = 0.0
                    aborted[i] = 1

                k = step_start + j + 1
                if k > burn_steps and (k - burn_steps) % stride == 0:
                    s = (k - burn_steps) // stride - 1
                    b = (s * n_blocks) // n_samples
                    x2v = xi * xi
                    p2v = pi * pi
                    xpv = xi * pi
                    block_sums[i, b, 0] += x2v
                    block_sums[i, b, 1] += p2v
                    block_sums[i, b, 2] += xpv
                    block_sums[i, b, 3] += x2v * x2v
                    block_sums[i, b, 4] += x2v * p2v
                    block_sums[i, b, 5] += p2v * p2v
                    if i < n_probe_local:
                        probe[traj_start + i, s, 0] = xi
                        probe[traj_start + i, s, 1] = pi
            x[i] = xi
            p[i] = pi
