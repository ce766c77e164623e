"""Two-state numerical fluxes for the x-direction Euler flux.

The entropy-stable family is ``F* - 1/2 R|Lambda|S R^T (r+ - r-)`` evaluated at
an intermediate state that keeps stationary contacts exact. The four members
differ only in the diagonal ``|Lambda|``:

==========  ==========================================
ES          ``|u-c|, |u|, |u|, |u+c|``
ES-KES      ``|u|+c, |u|, |u|, |u|+c``
ES-LM       ``|u-c~|, |u|, |u|, |u+c~|``
ES-KES-LM   ``|u|+c~, |u|, |u|, |u|+c~``
==========  ==========================================

with ``c~ = c * max(min(|v|/c, 1), m_cut)``. Roe, Roe-LM and local
Lax-Friedrichs are kept as baselines.

Functions here are the vectorised numpy implementation; ``allmach.kernels``
holds the compiled per-interface loop used by the solver.
"""
from enum import IntEnum
from typing import NamedTuple

import numpy as np

from .averages import arithmetic_mean, average_pressure, beta, logarithmic_mean
from .eos import (
    IDEAL_AIR,
    conserved_to_primitive,
    primitive_to_conserved,
    primitive_to_entropy_vars,
    sound_speed,
)
from .errors import DegenerateEigensystem


class FluxKind(IntEnum):
    ROE = 0
    ROE_LM = 1
    ES = 2
    ES_KES = 3
    ES_LM = 4
    ES_KES_LM = 5
    LLF = 6
    # diffusion-free entropy-conservative flux F*
    EC = 7

    @property
    def label(self):
        return _LABELS[self]

    @property
    def is_entropy_family(self):
        return self in ENTROPY_FAMILY or self is FluxKind.EC

    @property
    def is_low_mach(self):
        return self in (FluxKind.ROE_LM, FluxKind.ES_LM, FluxKind.ES_KES_LM)

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().upper().replace("-", "").replace("_", "")
        for kind, label in _LABELS.items():
            if label.upper().replace("-", "") == key:
                return kind
        raise ValueError(f"unknown flux kind {text!r}; expected one of {', '.join(_LABELS.values())}")


_LABELS = {
    FluxKind.ROE: "Roe",
    FluxKind.ROE_LM: "Roe-LM",
    FluxKind.ES: "ES",
    FluxKind.ES_KES: "ES-KES",
    FluxKind.ES_LM: "ES-LM",
    FluxKind.ES_KES_LM: "ES-KES-LM",
    FluxKind.LLF: "LLF",
    FluxKind.EC: "EC",
}

ENTROPY_FAMILY = (FluxKind.ES, FluxKind.ES_KES, FluxKind.ES_LM, FluxKind.ES_KES_LM)
SOLVER_KINDS = (FluxKind.ROE, FluxKind.ROE_LM) + ENTROPY_FAMILY + (FluxKind.LLF,)


class IntermediateState(NamedTuple):
    rho: np.ndarray
    u: np.ndarray
    v: np.ndarray
    p: np.ndarray
    c: np.ndarray
    h: np.ndarray


def physical_flux(w, gas=IDEAL_AIR):
    """x-direction Euler flux from primitive states."""
    w = np.asarray(w, dtype=float)
    rho, u, v, p = w[..., 0], w[..., 1], w[..., 2], w[..., 3]
    E = p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    mass = rho * u
    return np.stack([mass, mass * u + p, mass * v, (E + p) * u], axis=-1)


def physical_flux_x(q, gas=IDEAL_AIR):
    return physical_flux(conserved_to_primitive(q, gas), gas)


def entropy_conservative_flux(left, right, gas=IDEAL_AIR):
    """Kinetic-energy-preserving entropy-conservative flux F* on primitive states."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    rho_hat = logarithmic_mean(left[..., 0], right[..., 0])
    beta_hat = logarithmic_mean(beta(left), beta(right))
    u_bar = arithmetic_mean(left[..., 1], right[..., 1])
    v_bar = arithmetic_mean(left[..., 2], right[..., 2])
    v2_bar = arithmetic_mean(
        left[..., 1] ** 2 + left[..., 2] ** 2, right[..., 1] ** 2 + right[..., 2] ** 2
    )
    p_tilde = average_pressure(left, right)

    f_rho = rho_hat * u_bar
    f_mx = u_bar * f_rho + p_tilde
    f_my = v_bar * f_rho
    f_e = (1.0 / (2.0 * (gas.gamma - 1.0) * beta_hat) - 0.5 * v2_bar) * f_rho + u_bar * f_mx + v_bar * f_my
    return np.stack([f_rho, f_mx, f_my, f_e], axis=-1)


def intermediate_state(left, right, gas=IDEAL_AIR):
    """Average state (v_bar, p_bar, rho = 2 p_bar beta_hat) for the diffusion matrix."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    beta_hat = logarithmic_mean(beta(left), beta(right))
    u = arithmetic_mean(left[..., 1], right[..., 1])
    v = arithmetic_mean(left[..., 2], right[..., 2])
    p = arithmetic_mean(left[..., 3], right[..., 3])
    rho = 2.0 * p * beta_hat
    c = np.sqrt(gas.gamma * p / rho)
    h = c * c / (gas.gamma - 1.0) + 0.5 * (u * u + v * v)
    return IntermediateState(rho, u, v, p, c, h)


def state_from_primitive(w, gas=IDEAL_AIR):
    """Diffusion-matrix state taken directly from one primitive state."""
    w = np.asarray(w, dtype=float)
    rho, u, v, p = w[..., 0], w[..., 1], w[..., 2], w[..., 3]
    c = sound_speed(w, gas)
    h = c * c / (gas.gamma - 1.0) + 0.5 * (u * u + v * v)
    return IntermediateState(rho, u, v, p, c, h)


def eigenvector_matrix(state, gas=IDEAL_AIR):
    """Right eigenvectors of the x-flux Jacobian, columns ordered (u-c, u, u, u+c)."""
    u, v, c, h = (np.asarray(x, dtype=float) for x in (state.u, state.v, state.c, state.h))
    one = np.ones_like(u)
    zero = np.zeros_like(u)
    rows = [
        [one, one, zero, one],
        [u - c, u, zero, u + c],
        [v, v, -one, v],
        [h - c * u, 0.5 * (u * u + v * v), -v, h + c * u],
    ]
    return np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)


def _scaling_diag(state, gas):
    g = gas.gamma
    rho = np.asarray(state.rho, dtype=float)
    return np.stack([rho / (2 * g), (g - 1) * rho / g, np.asarray(state.p, dtype=float), rho / (2 * g)], axis=-1)


def scaling_matrix(state, gas=IDEAL_AIR):
    """Diagonal S with ``R S R^T = dq/dr``."""
    d = _scaling_diag(state, gas)
    return d[..., :, None] * np.eye(4)


def rescaled_sound_speed(c, speed, m_cut):
    """``c * max(min(speed/c, 1), m_cut)``."""
    c = np.asarray(c, dtype=float)
    mach = np.asarray(speed, dtype=float) / c
    return c * np.maximum(np.minimum(mach, 1.0), m_cut)


def _lambda_diag(kind, u, c, speed, m_cut):
    kind = FluxKind(kind)
    if kind.is_low_mach:
        c = rescaled_sound_speed(c, speed, m_cut)
    au = np.abs(u)
    if kind in (FluxKind.ES_KES, FluxKind.ES_KES_LM):
        l1 = l4 = au + c
    else:
        l1 = np.abs(u - c)
        l4 = np.abs(u + c)
    return np.stack(np.broadcast_arrays(l1, au, au, l4), axis=-1)


def lambda_matrix(kind, state, m_cut=0.0):
    """Diagonal eigenvalue magnitudes for an entropy-family flux kind."""
    kind = FluxKind(kind)
    if kind not in ENTROPY_FAMILY:
        raise ValueError(f"lambda_matrix is defined for the ES family, not {kind.label}")
    speed = np.hypot(state.u, state.v)
    d = _lambda_diag(kind, state.u, state.c, speed, m_cut)
    return d[..., :, None] * np.eye(4)


def diffusion_operator(state, kind, gas=IDEAL_AIR, m_cut=0.0):
    """``Q = R |Lambda| S R^T`` at an intermediate state."""
    R = eigenvector_matrix(state, gas)
    speed = np.hypot(state.u, state.v)
    lam = _lambda_diag(kind, state.u, state.c, speed, m_cut)
    S = _scaling_diag(state, gas)
    return (R * (lam * S)[..., None, :]) @ np.swapaxes(R, -1, -2)


def entropy_diffusion(left, right, kind, gas=IDEAL_AIR, m_cut=0.0):
    """``-1/2 Q (r+ - r-)`` for an entropy-family kind; summed wave by wave."""
    kind = FluxKind(kind)
    if kind not in ENTROPY_FAMILY:
        raise ValueError(f"entropy diffusion is defined for the ES family, not {kind.label}")
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    dr = primitive_to_entropy_vars(right, gas) - primitive_to_entropy_vars(left, gas)
    st = intermediate_state(left, right, gas)
    R = eigenvector_matrix(st, gas)
    lam = _lambda_diag(kind, st.u, st.c, np.hypot(st.u, st.v), m_cut)
    S = _scaling_diag(st, gas)
    strength = lam * S * np.einsum("...ik,...i->...k", R, dr)
    return -0.5 * np.einsum("...ik,...k->...i", R, strength)


def entropy_stable_flux(left, right, kind, gas=IDEAL_AIR, m_cut=0.0):
    return entropy_conservative_flux(left, right, gas) + entropy_diffusion(left, right, kind, gas, m_cut)


def roe_average(left, right, gas=IDEAL_AIR):
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    g = gas.gamma
    sl = np.sqrt(left[..., 0])
    sr = np.sqrt(right[..., 0])

    def enthalpy(w):
        return g / (g - 1) * w[..., 3] / w[..., 0] + 0.5 * (w[..., 1] ** 2 + w[..., 2] ** 2)

    wsum = sl + sr
    u = (sl * left[..., 1] + sr * right[..., 1]) / wsum
    v = (sl * left[..., 2] + sr * right[..., 2]) / wsum
    h = (sl * enthalpy(left) + sr * enthalpy(right)) / wsum
    c2 = (g - 1) * (h - 0.5 * (u * u + v * v))
    if np.any(~(c2 > 1e-28)):
        raise DegenerateEigensystem("Roe-average sound speed vanished")
    c = np.sqrt(c2)
    rho = sl * sr
    p = rho * c2 / g
    return IntermediateState(rho, u, v, p, c, h)


def roe_wave_strengths(state, dq, gas=IDEAL_AIR):
    """``R^{-1} dq`` for the eigenvector matrix of :func:`eigenvector_matrix`."""
    u, v, c, h = state.u, state.v, state.c, state.h
    d0, d1, d2, d3 = dq[..., 0], dq[..., 1], dq[..., 2], dq[..., 3]
    shear = d2 - v * d0
    a2 = (gas.gamma - 1) / (c * c) * (d0 * (h - u * u) + u * d1 - (d3 - shear * v))
    a1 = (d0 * (u + c) - d1 - c * a2) / (2 * c)
    a4 = d0 - a1 - a2
    # third column is (0, 0, -1, -v)
    return np.stack([a1, a2, -shear, a4], axis=-1)


def _roe_flux_prim(left, right, low_mach, m_cut, gas):
    st = roe_average(left, right, gas)
    dq = primitive_to_conserved(right, gas) - primitive_to_conserved(left, gas)
    c = rescaled_sound_speed(st.c, np.hypot(st.u, st.v), m_cut) if low_mach else st.c
    lam = np.stack(np.broadcast_arrays(np.abs(st.u - c), np.abs(st.u), np.abs(st.u), np.abs(st.u + c)), axis=-1)
    alpha = roe_wave_strengths(st, dq, gas)
    R = eigenvector_matrix(st, gas)
    diff = np.einsum("...ik,...k->...i", R, lam * alpha)
    return 0.5 * (physical_flux(left, gas) + physical_flux(right, gas)) - 0.5 * diff


def roe_flux(q_left, q_right, low_mach=False, m_cut=0.0, gas=IDEAL_AIR):
    """Roe flux with Roe-average diffusion; ``low_mach`` rescales the acoustic eigenvalues."""
    wl = conserved_to_primitive(q_left, gas)
    wr = conserved_to_primitive(q_right, gas)
    return _roe_flux_prim(wl, wr, low_mach, m_cut, gas)


def _llf_flux_prim(left, right, gas):
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    alpha = np.maximum(np.abs(left[..., 1]) + sound_speed(left, gas), np.abs(right[..., 1]) + sound_speed(right, gas))
    dq = primitive_to_conserved(right, gas) - primitive_to_conserved(left, gas)
    return 0.5 * (physical_flux(left, gas) + physical_flux(right, gas)) - 0.5 * alpha[..., None] * dq


def llf_flux(q_left, q_right, gas=IDEAL_AIR):
    return _llf_flux_prim(conserved_to_primitive(q_left, gas), conserved_to_primitive(q_right, gas), gas)


def interface_flux_prim(left, right, kind, m_cut=0.0, gas=IDEAL_AIR):
    """x-direction flux of any kind on primitive states (numpy path)."""
    kind = FluxKind(kind)
    if kind is FluxKind.EC:
        return entropy_conservative_flux(left, right, gas)
    if kind in ENTROPY_FAMILY:
        return entropy_stable_flux(left, right, kind, gas, m_cut)
    if kind is FluxKind.LLF:
        return _llf_flux_prim(left, right, gas)
    return _roe_flux_prim(left, right, kind is FluxKind.ROE_LM, m_cut, gas)


def central_flux_prim(left, right, kind, gas=IDEAL_AIR):
    """Non-dissipative part of a flux: F* for the entropy family, the flux mean otherwise."""
    if FluxKind(kind).is_entropy_family:
        return entropy_conservative_flux(left, right, gas)
    return 0.5 * (physical_flux(left, gas) + physical_flux(right, gas))


def swap_xy(a):
    """Exchange the x- and y-velocity (or momentum) components."""
    out = np.array(a, dtype=float, copy=True)
    out[..., 1], out[..., 2] = a[..., 2], a[..., 1]
    return out


def numerical_flux(q_left, q_right, kind, direction="x", gas=IDEAL_AIR, m_cut=0.0):
    """Interface flux for conserved states; ``direction='y'`` rotates into the x-frame and back."""
    from .kernels import interface_flux

    wl = conserved_to_primitive(q_left, gas)
    wr = conserved_to_primitive(q_right, gas)
    if direction == "y":
        wl, wr = swap_xy(wl), swap_xy(wr)
    elif direction != "x":
        raise ValueError(f"direction must be 'x' or 'y', got {direction!r}")
    shape = np.broadcast_shapes(wl.shape, wr.shape)
    wl = np.broadcast_to(wl, shape).reshape(-1, 4)
    wr = np.broadcast_to(wr, shape).reshape(-1, 4)
    f = interface_flux(np.ascontiguousarray(wl), np.ascontiguousarray(wr), kind, m_cut, gas).reshape(shape)
    return swap_xy(f) if direction == "y" else f
