"""Exact primitive-variable diffusion matrices at the scaling-probe states, built with sympy."""
import functools

import sympy as sp

from allmach.fluxes import FluxKind


@functools.lru_cache(maxsize=None)
def exact_zero_entries(kind, gamma=1.4):
    """Entries of D_prim that vanish identically in M at rho = 1, p = 1/gamma, velocity (M, 0), M < 1, m_cut = 0.

    Returned as a frozenset of 0-based (row, col) pairs.
    """
    kind = FluxKind(kind)
    M = sp.symbols("M", positive=True)
    g = sp.nsimplify(gamma)
    rho0, u0, v0, p0, c = sp.Integer(1), M, sp.Integer(0), 1 / g, sp.Integer(1)
    h = c ** 2 / (g - 1) + (u0 ** 2 + v0 ** 2) / 2
    R = sp.Matrix([[1, 1, 0, 1], [u0 - c, u0, 0, u0 + c], [v0, v0, -1, v0], [h - c * u0, (u0 ** 2 + v0 ** 2) / 2, -v0, h + c * u0]])
    S = [rho0 / (2 * g), (g - 1) * rho0 / g, p0, rho0 / (2 * g)]
    # Roe baselines share the small-jump matrix of ES / ES-LM
    low_mach = kind in (FluxKind.ES_LM, FluxKind.ES_KES_LM, FluxKind.ROE_LM)
    kes = kind in (FluxKind.ES_KES, FluxKind.ES_KES_LM)
    ct = M if low_mach else c  # c~ = |v| for M < 1 and m_cut = 0
    if kes:
        lam = [u0 + ct, u0, u0, u0 + ct]
    else:
        lam = [ct - u0, u0, u0, u0 + ct]
    Q = R * sp.diag(*[lam[i] * S[i] for i in range(4)]) * R.T

    r_, u_, v_, p_ = sp.symbols("rho u v p", positive=True)
    w = sp.Matrix([r_, u_, v_, p_])
    q = sp.Matrix([r_, r_ * u_, r_ * v_, p_ / (g - 1) + r_ * (u_ ** 2 + v_ ** 2) / 2])
    s = sp.log(p_) - g * sp.log(r_)
    beta = r_ / (2 * p_)
    r = sp.Matrix([(g - s) / (g - 1) - beta * (u_ ** 2 + v_ ** 2), 2 * beta * u_, 2 * beta * v_, -2 * beta])
    at = {r_: rho0, u_: u0, v_: v0, p_: p0}
    D = q.jacobian(w).subs(at).inv() * Q * r.jacobian(w).subs(at)
    return frozenset((i, j) for i in range(4) for j in range(4) if sp.simplify(D[i, j]) == 0)
