"""Hot inner loops: the five-point weighted stencil, conjugate gradients in the
mass inner product, and the two scalar recursions.

Each kernel exists twice: a loop form compiled with numba and a vectorized
numpy form. ``AXILIFT_DISABLE_NUMBA=1`` selects the numpy forms; both are
importable directly for benchmarking and cross-checks.
"""
import math

import numpy as np

from ._accel import HAS_NUMBA, njit

# ---------------------------------------------------------------- numpy forms


def stencil_apply_numpy(u, kr_in, kz_in, diag, out):
    np.multiply(diag, u, out=out)
    out[1:] -= kr_in[:, None] * u[:-1]
    out[:-1] -= kr_in[:, None] * u[1:]
    out[:, 1:] -= kz_in[:, None] * u[:, :-1]
    out[:, :-1] -= kz_in[:, None] * u[:, 1:]
    return out


def cg_numpy(kr_in, kz_in, diag, mass, f, x, tol, maxiter):
    """Solve ``M^-1 K x = f`` by CG in the ``M`` inner product.

    ``x`` is updated in place. Returns ``(iterations, relative residual)``
    where the residual is ``||f - M^-1 K x||_M / ||f||_M``.
    """
    fnorm = math.sqrt(float(np.sum(mass * f * f)))
    if fnorm == 0.0:
        x[:] = 0.0
        return 0, 0.0
    kx = np.empty_like(x)
    stencil_apply_numpy(x, kr_in, kz_in, diag, kx)
    r = f - kx / mass
    rr = float(np.sum(mass * r * r))
    if math.sqrt(rr) <= tol * fnorm:
        return 0, math.sqrt(rr) / fnorm
    p = r.copy()
    q = np.empty_like(x)
    it = 0
    while it < maxiter:
        stencil_apply_numpy(p, kr_in, kz_in, diag, q)
        pq = float(np.sum(p * q))
        alpha = rr / pq
        x += alpha * p
        r -= alpha * (q / mass)
        rr_new = float(np.sum(mass * r * r))
        it += 1
        if math.sqrt(rr_new) <= tol * fnorm:
            # confirm against the true residual; recurrences drift
            stencil_apply_numpy(x, kr_in, kz_in, diag, kx)
            r = f - kx / mass
            rr_new = float(np.sum(mass * r * r))
            if math.sqrt(rr_new) <= tol * fnorm:
                return it, math.sqrt(rr_new) / fnorm
            p = r.copy()
            rr = rr_new
            continue
        p *= rr_new / rr
        p += r
        rr = rr_new
    return it, math.sqrt(rr) / fnorm


# ---------------------------------------------------------------- loop forms


def stencil_apply_loops(u, kr_in, kz_in, diag, out):
    nr, nz = u.shape
    for i in range(nr):
        for j in range(nz):
            s = diag[i, j] * u[i, j]
            if i > 0:
                s -= kr_in[i - 1] * u[i - 1, j]
            if i < nr - 1:
                s -= kr_in[i] * u[i + 1, j]
            if j > 0:
                s -= kz_in[i] * u[i, j - 1]
            if j < nz - 1:
                s -= kz_in[i] * u[i, j + 1]
            out[i, j] = s
    return out


def _residual_loops(kr_in, kz_in, diag, mass, f, x, kx, r):
    stencil_apply_loops(x, kr_in, kz_in, diag, kx)
    nr, nz = x.shape
    rr = 0.0
    for i in range(nr):
        for j in range(nz):
            v = f[i, j] - kx[i, j] / mass[i, j]
            r[i, j] = v
            rr += mass[i, j] * v * v
    return rr


def cg_loops(kr_in, kz_in, diag, mass, f, x, tol, maxiter):
    nr, nz = x.shape
    ff = 0.0
    for i in range(nr):
        for j in range(nz):
            ff += mass[i, j] * f[i, j] * f[i, j]
    fnorm = math.sqrt(ff)
    if fnorm == 0.0:
        for i in range(nr):
            for j in range(nz):
                x[i, j] = 0.0
        return 0, 0.0
    kx = np.empty_like(x)
    r = np.empty_like(x)
    rr = _residual_loops(kr_in, kz_in, diag, mass, f, x, kx, r)
    if math.sqrt(rr) <= tol * fnorm:
        return 0, math.sqrt(rr) / fnorm
    p = r.copy()
    q = np.empty_like(x)
    it = 0
    while it < maxiter:
        stencil_apply_loops(p, kr_in, kz_in, diag, q)
        pq = 0.0
        for i in range(nr):
            for j in range(nz):
                pq += p[i, j] * q[i, j]
        alpha = rr / pq
        rr_new = 0.0
        for i in range(nr):
            for j in range(nz):
                x[i, j] += alpha * p[i, j]
                v = r[i, j] - alpha * q[i, j] / mass[i, j]
                r[i, j] = v
                rr_new += mass[i, j] * v * v
        it += 1
        if math.sqrt(rr_new) <= tol * fnorm:
            rr_new = _residual_loops(kr_in, kz_in, diag, mass, f, x, kx, r)
            if math.sqrt(rr_new) <= tol * fnorm:
                return it, math.sqrt(rr_new) / fnorm
            for i in range(nr):
                for j in range(nz):
                    p[i, j] = r[i, j]
            rr = rr_new
            continue
        beta = rr_new / rr
        for i in range(nr):
            for j in range(nz):
                p[i, j] = r[i, j] + beta * p[i, j]
        rr = rr_new
    return it, math.sqrt(rr) / fnorm


# Scalar recursions. Same source for both backends; they are plain loops.

_LOG_LO = math.log(1e-300)
_LOG_HI = math.log(1e300)


def morrey_loop(kappa, c_src, gain_delta, theta, r0, e0, max_steps, out):
    """Fill ``out`` with E_0..E_n; return (n_filled, code).

    code: 0 decayed, 1 diverged, 2 exhausted.
    """
    e = e0
    out[0] = e
    if e < 1e-300:
        return 1, 0
    log_theta = math.log(theta)
    log_r0 = math.log(r0)
    for n in range(max_steps):
        rn_pow = math.exp(gain_delta * (log_r0 + n * log_theta))
        e = kappa * e + c_src * rn_pow * e * e
        out[n + 1] = e
        if not e <= 1e300:
            return n + 2, 1
        if e < 1e-300:
            return n + 2, 0
    return max_steps + 1, 2


def degiorgi_loop(beta, lambda1, lambda2, c_big, k_level, radius, phi_r, y0, max_steps, out):
    """Log-domain De Giorgi level recursion. Same return convention as
    :func:`morrey_loop`."""
    out[0] = y0
    if y0 < 1e-300:
        return 1, 0
    ly = math.log(y0)
    log2 = math.log(2.0)
    c1 = math.log(c_big) - 2.0 * math.log(radius) - 2.0 * beta * math.log(k_level)
    has_phi = phi_r > 0.0
    c2 = 0.0
    if has_phi:
        c2 = math.log(c_big) + (2.0 - 2.0 * beta) * math.log(k_level) + math.log(phi_r)
    for j in range(max_steps):
        t1 = c1 + lambda1 * j * log2 + (1.0 + beta) * ly
        if has_phi:
            t2 = c2 + lambda2 * j * log2 + beta * ly
            hi = max(t1, t2)
            ly = hi + math.log1p(math.exp(min(t1, t2) - hi))
        else:
            ly = t1
        if ly > _LOG_HI:
            out[j + 1] = math.inf
            return j + 2, 1
        out[j + 1] = math.exp(ly)
        if ly < _LOG_LO:
            return j + 2, 0
    return max_steps + 1, 2


if HAS_NUMBA:
    stencil_apply_loops = njit(cache=True, nogil=True)(stencil_apply_loops)
    _residual_loops = njit(cache=True, nogil=True)(_residual_loops)
    cg_loops = njit(cache=True, nogil=True)(cg_loops)
    morrey_loop = njit(cache=True, nogil=True)(morrey_loop)
    degiorgi_loop = njit(cache=True, nogil=True)(degiorgi_loop)
    stencil_apply = stencil_apply_loops
    cg = cg_loops
else:
    stencil_apply = stencil_apply_numpy
    cg = cg_numpy
