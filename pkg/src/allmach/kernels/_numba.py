"""Per-interface flux loop compiled with numba.

Kind codes follow ``allmach.fluxes.FluxKind``. Inputs are contiguous
``(n, 4)`` primitive arrays; the return value is the flux array and the index
of the first interface with a degenerate Roe eigensystem (-1 if none).
"""
import math

import numpy as np

from .._backend import njit

ROE, ROE_LM, ES, ES_KES, ES_LM, ES_KES_LM, LLF, EC = range(8)
LOGMEAN_SERIES_CUTOFF = 1e-2


@njit
def logmean(a, b):
    f = (a - b) / (a + b)
    u = f * f
    if u < LOGMEAN_SERIES_CUTOFF:
        den = 1.0 + u * (1 / 3 + u * (1 / 5 + u * (1 / 7 + u * (1 / 9 + u * (1 / 11 + u * (1 / 13 + u / 15))))))
        return 0.5 * (a + b) / den
    hi = max(a, b)
    lo = min(a, b)
    return (hi - lo) / math.log(hi / lo)


@njit
def _rescale(c, speed, m_cut):
    return c * max(min(speed / c, 1.0), m_cut)


@njit
def _ec_flux(rl, ul, vl, pl, rr, ur, vr, pr, gamma):
    bl = rl / (2.0 * pl)
    br = rr / (2.0 * pr)
    rho_hat = logmean(rl, rr)
    beta_hat = logmean(bl, br)
    u_bar = 0.5 * (ul + ur)
    v_bar = 0.5 * (vl + vr)
    v2_bar = 0.5 * (ul * ul + vl * vl + ur * ur + vr * vr)
    p_tilde = 0.5 * (rl + rr) / (bl + br)
    f0 = rho_hat * u_bar
    f1 = u_bar * f0 + p_tilde
    f2 = v_bar * f0
    f3 = (1.0 / (2.0 * (gamma - 1.0) * beta_hat) - 0.5 * v2_bar) * f0 + u_bar * f1 + v_bar * f2
    return f0, f1, f2, f3


@njit
def _entropy_vars(rho, u, v, p, gamma):
    beta = rho / (2.0 * p)
    s = math.log(p) - gamma * math.log(rho)
    return (
        (gamma - s) / (gamma - 1.0) - beta * (u * u + v * v),
        2.0 * beta * u,
        2.0 * beta * v,
        -2.0 * beta,
    )


@njit
def _es_diffusion(rl, ul, vl, pl, rr, ur, vr, pr, kind, m_cut, gamma):
    a0, a1, a2, a3 = _entropy_vars(rl, ul, vl, pl, gamma)
    b0, b1, b2, b3 = _entropy_vars(rr, ur, vr, pr, gamma)
    d0, d1, d2, d3 = b0 - a0, b1 - a1, b2 - a2, b3 - a3

    beta_hat = logmean(rl / (2.0 * pl), rr / (2.0 * pr))
    u = 0.5 * (ul + ur)
    v = 0.5 * (vl + vr)
    p = 0.5 * (pl + pr)
    rho = 2.0 * p * beta_hat
    c = math.sqrt(gamma * p / rho)
    h = c * c / (gamma - 1.0) + 0.5 * (u * u + v * v)

    ca = c
    if kind == ES_LM or kind == ES_KES_LM:
        ca = _rescale(c, math.sqrt(u * u + v * v), m_cut)
    if kind == ES_KES or kind == ES_KES_LM:
        l1 = abs(u) + ca
        l4 = l1
    else:
        l1 = abs(u - ca)
        l4 = abs(u + ca)
    l2 = abs(u)

    s14 = rho / (2.0 * gamma)
    s2 = (gamma - 1.0) * rho / gamma
    # wave strengths |lambda_k| S_k (R_k . dr), eigenvectors built with the unscaled c
    w1 = l1 * s14 * (d0 + (u - c) * d1 + v * d2 + (h - c * u) * d3)
    w2 = l2 * s2 * (d0 + u * d1 + v * d2 + 0.5 * (u * u + v * v) * d3)
    w3 = l2 * p * (-d2 - v * d3)
    w4 = l4 * s14 * (d0 + (u + c) * d1 + v * d2 + (h + c * u) * d3)

    g0 = w1 + w2 + w4
    g1 = (u - c) * w1 + u * w2 + (u + c) * w4
    g2 = v * (w1 + w2 + w4) - w3
    g3 = (h - c * u) * w1 + 0.5 * (u * u + v * v) * w2 - v * w3 + (h + c * u) * w4
    return -0.5 * g0, -0.5 * g1, -0.5 * g2, -0.5 * g3


@njit
def _physical(rho, u, v, p, gamma):
    E = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    m = rho * u
    return m, m * u + p, m * v, (E + p) * u


@njit
def _roe_flux(rl, ul, vl, pl, rr, ur, vr, pr, low_mach, m_cut, gamma):
    sl = math.sqrt(rl)
    sr = math.sqrt(rr)
    hl = gamma / (gamma - 1.0) * pl / rl + 0.5 * (ul * ul + vl * vl)
    hr = gamma / (gamma - 1.0) * pr / rr + 0.5 * (ur * ur + vr * vr)
    ws = sl + sr
    u = (sl * ul + sr * ur) / ws
    v = (sl * vl + sr * vr) / ws
    h = (sl * hl + sr * hr) / ws
    c2 = (gamma - 1.0) * (h - 0.5 * (u * u + v * v))
    if not c2 > 1e-28:
        return 0.0, 0.0, 0.0, 0.0, False
    c = math.sqrt(c2)

    El = pl / (gamma - 1.0) + 0.5 * rl * (ul * ul + vl * vl)
    Er = pr / (gamma - 1.0) + 0.5 * rr * (ur * ur + vr * vr)
    q0 = rr - rl
    q1 = rr * ur - rl * ul
    q2 = rr * vr - rl * vl
    q3 = Er - El

    shear = q2 - v * q0
    a2 = (gamma - 1.0) / c2 * (q0 * (h - u * u) + u * q1 - (q3 - shear * v))
    a1 = (q0 * (u + c) - q1 - c * a2) / (2.0 * c)
    a4 = q0 - a1 - a2

    ca = c
    if low_mach:
        ca = _rescale(c, math.sqrt(u * u + v * v), m_cut)
    w1 = abs(u - ca) * a1
    w2 = abs(u) * a2
    w3 = abs(u) * shear
    w4 = abs(u + ca) * a4

    g0 = w1 + w2 + w4
    g1 = (u - c) * w1 + u * w2 + (u + c) * w4
    g2 = v * (w1 + w2 + w4) + w3
    g3 = (h - c * u) * w1 + 0.5 * (u * u + v * v) * w2 + v * w3 + (h + c * u) * w4

    fl0, fl1, fl2, fl3 = _physical(rl, ul, vl, pl, gamma)
    fr0, fr1, fr2, fr3 = _physical(rr, ur, vr, pr, gamma)
    return (
        0.5 * (fl0 + fr0 - g0),
        0.5 * (fl1 + fr1 - g1),
        0.5 * (fl2 + fr2 - g2),
        0.5 * (fl3 + fr3 - g3),
        True,
    )


@njit
def _llf_flux(rl, ul, vl, pl, rr, ur, vr, pr, gamma):
    alpha = max(abs(ul) + math.sqrt(gamma * pl / rl), abs(ur) + math.sqrt(gamma * pr / rr))
    fl0, fl1, fl2, fl3 = _physical(rl, ul, vl, pl, gamma)
    fr0, fr1, fr2, fr3 = _physical(rr, ur, vr, pr, gamma)
    El = pl / (gamma - 1.0) + 0.5 * rl * (ul * ul + vl * vl)
    Er = pr / (gamma - 1.0) + 0.5 * rr * (ur * ur + vr * vr)
    return (
        0.5 * (fl0 + fr0) - 0.5 * alpha * (rr - rl),
        0.5 * (fl1 + fr1) - 0.5 * alpha * (rr * ur - rl * ul),
        0.5 * (fl2 + fr2) - 0.5 * alpha * (rr * vr - rl * vl),
        0.5 * (fl3 + fr3) - 0.5 * alpha * (Er - El),
    )


@njit
def _point_flux(rl, ul, vl, pl, rr, ur, vr, pr, kind, m_cut, gamma):
    if kind == LLF:
        f0, f1, f2, f3 = _llf_flux(rl, ul, vl, pl, rr, ur, vr, pr, gamma)
        return f0, f1, f2, f3, True
    if kind == ROE or kind == ROE_LM:
        return _roe_flux(rl, ul, vl, pl, rr, ur, vr, pr, kind == ROE_LM, m_cut, gamma)
    f0, f1, f2, f3 = _ec_flux(rl, ul, vl, pl, rr, ur, vr, pr, gamma)
    if kind != EC:
        d0, d1, d2, d3 = _es_diffusion(rl, ul, vl, pl, rr, ur, vr, pr, kind, m_cut, gamma)
        f0 += d0
        f1 += d1
        f2 += d2
        f3 += d3
    return f0, f1, f2, f3, True


@njit
def interface_flux(wl, wr, kind, m_cut, gamma):
    n = wl.shape[0]
    out = np.empty((n, 4))
    bad = -1
    for i in range(n):
        f0, f1, f2, f3, ok = _point_flux(wl[i, 0], wl[i, 1], wl[i, 2], wl[i, 3],
                                         wr[i, 0], wr[i, 1], wr[i, 2], wr[i, 3], kind, m_cut, gamma)
        if not ok and bad < 0:
            bad = i
        out[i, 0] = f0
        out[i, 1] = f1
        out[i, 2] = f2
        out[i, 3] = f3
    return out, bad


@njit
def _neighbour(i, n, periodic):
    if periodic:
        return i % n
    return min(max(i, 0), n - 1)


@njit
def rhs_constant(q, periodic_x, periodic_y, kind, m_cut, gamma, dx, dy, floor):
    """First-order flux-difference rate in one pass.

    Returns ``(rate, ok)``; ``ok`` is False if a cell is inadmissible or a Roe
    eigensystem degenerates, in which case the caller re-runs the checked path.
    """
    nx, ny = q.shape[0], q.shape[1]
    w = np.empty_like(q)
    rate = np.zeros_like(q)
    for i in range(nx):
        for j in range(ny):
            rho = q[i, j, 0]
            if not rho > floor:
                return rate, False
            u = q[i, j, 1] / rho
            v = q[i, j, 2] / rho
            p = (gamma - 1.0) * (q[i, j, 3] - 0.5 * rho * (u * u + v * v))
            if not p > floor:
                return rate, False
            w[i, j, 0] = rho
            w[i, j, 1] = u
            w[i, j, 2] = v
            w[i, j, 3] = p
    if nx > 1:
        for j in range(ny):
            for i in range(nx + 1):
                a = _neighbour(i - 1, nx, periodic_x)
                b = _neighbour(i, nx, periodic_x)
                f0, f1, f2, f3, ok = _point_flux(w[a, j, 0], w[a, j, 1], w[a, j, 2], w[a, j, 3],
                                                 w[b, j, 0], w[b, j, 1], w[b, j, 2], w[b, j, 3],
                                                 kind, m_cut, gamma)
                if not ok:
                    return rate, False
                if i > 0:
                    rate[i - 1, j, 0] -= f0 / dx
                    rate[i - 1, j, 1] -= f1 / dx
                    rate[i - 1, j, 2] -= f2 / dx
                    rate[i - 1, j, 3] -= f3 / dx
                if i < nx:
                    rate[i, j, 0] += f0 / dx
                    rate[i, j, 1] += f1 / dx
                    rate[i, j, 2] += f2 / dx
                    rate[i, j, 3] += f3 / dx
    if ny > 1:
        for i in range(nx):
            for j in range(ny + 1):
                a = _neighbour(j - 1, ny, periodic_y)
                b = _neighbour(j, ny, periodic_y)
                # normal velocity first; components 1 and 2 come back swapped
                g0, g2, g1, g3, ok = _point_flux(w[i, a, 0], w[i, a, 2], w[i, a, 1], w[i, a, 3],
                                                 w[i, b, 0], w[i, b, 2], w[i, b, 1], w[i, b, 3],
                                                 kind, m_cut, gamma)
                if not ok:
                    return rate, False
                if j > 0:
                    rate[i, j - 1, 0] -= g0 / dy
                    rate[i, j - 1, 1] -= g1 / dy
                    rate[i, j - 1, 2] -= g2 / dy
                    rate[i, j - 1, 3] -= g3 / dy
                if j < ny:
                    rate[i, j, 0] += g0 / dy
                    rate[i, j, 1] += g1 / dy
                    rate[i, j, 2] += g2 / dy
                    rate[i, j, 3] += g3 / dy
    return rate, True
