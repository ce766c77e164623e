"""Ideal-gas thermodynamics and the three state representations.

All state arrays carry the four components on the last axis:

* conserved ``q = (rho, rho*u, rho*v, E)``
* primitive ``w = (rho, u, v, p)``
* entropy variables ``r = (r1, r2, r3, r4)`` with ``r4 = -2*beta < 0``

Every function broadcasts over the leading axes.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidEntropyState, NonPositiveDensity, NonPositivePressure

# density / pressure below this are treated as loss of admissibility
ADMISSIBILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4
    gas_constant: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.gas_constant > 0.0:
            raise ValueError(f"gas_constant must be positive, got {self.gas_constant}")


IDEAL_AIR = GasModel()


def _first_bad(mask):
    idx = np.argwhere(mask)
    return tuple(int(i) for i in idx[0]) if idx.size else ()


def primitive_to_conserved(w, gas=IDEAL_AIR):
    w = np.asarray(w, dtype=float)
    rho, u, v, p = w[..., 0], w[..., 1], w[..., 2], w[..., 3]
    q = np.empty_like(w)
    q[..., 0] = rho
    q[..., 1] = rho * u
    q[..., 2] = rho * v
    q[..., 3] = p / (gas.gamma - 1.0) + 0.5 * rho * (u * u + v * v)
    return q


def conserved_to_primitive(q, gas=IDEAL_AIR):
    """Recover ``(rho, u, v, p)``; raises when a cell has left the admissible set."""
    q = np.asarray(q, dtype=float)
    rho = q[..., 0]
    bad = ~(rho > ADMISSIBILITY_FLOOR)
    if np.any(bad):
        where = _first_bad(np.atleast_1d(bad))
        raise NonPositiveDensity(f"density {np.atleast_1d(rho)[where]!r} at index {where}")
    u = q[..., 1] / rho
    v = q[..., 2] / rho
    p = (gas.gamma - 1.0) * (q[..., 3] - 0.5 * rho * (u * u + v * v))
    bad = ~(p > ADMISSIBILITY_FLOOR)
    if np.any(bad):
        where = _first_bad(np.atleast_1d(bad))
        raise NonPositivePressure(f"pressure {np.atleast_1d(p)[where]!r} at index {where}")
    return np.stack([rho, u, v, p], axis=-1)


def sound_speed(w, gas=IDEAL_AIR):
    w = np.asarray(w, dtype=float)
    return np.sqrt(gas.gamma * w[..., 3] / w[..., 0])


def physical_entropy(w, gas=IDEAL_AIR):
    """``s = ln(p rho^-gamma)``; independent of velocity."""
    w = np.asarray(w, dtype=float)
    return np.log(w[..., 3]) - gas.gamma * np.log(w[..., 0])


def entropy_density(w, gas=IDEAL_AIR):
    """Mathematical entropy ``U = -rho s / (gamma - 1)`` from primitive states."""
    w = np.asarray(w, dtype=float)
    return -w[..., 0] * physical_entropy(w, gas) / (gas.gamma - 1.0)


def entropy_pair(q, gas=IDEAL_AIR):
    """Return ``(U, phi_x, phi_y)`` with ``phi = U * velocity``."""
    w = conserved_to_primitive(q, gas)
    U = entropy_density(w, gas)
    return U, U * w[..., 1], U * w[..., 2]


def primitive_to_entropy_vars(w, gas=IDEAL_AIR):
    w = np.asarray(w, dtype=float)
    rho, u, v, p = w[..., 0], w[..., 1], w[..., 2], w[..., 3]
    g = gas.gamma
    beta = rho / (2.0 * p)
    s = np.log(p) - g * np.log(rho)
    r = np.empty_like(w)
    r[..., 0] = (g - s) / (g - 1.0) - beta * (u * u + v * v)
    r[..., 1] = 2.0 * beta * u
    r[..., 2] = 2.0 * beta * v
    r[..., 3] = -2.0 * beta
    return r


def conserved_to_entropy_vars(q, gas=IDEAL_AIR):
    return primitive_to_entropy_vars(conserved_to_primitive(q, gas), gas)


def entropy_vars_to_primitive(r, gas=IDEAL_AIR):
    r = np.asarray(r, dtype=float)
    if np.any(~(r[..., 3] < 0.0)):
        raise InvalidEntropyState("entropy variable r4 must be negative")
    g = gas.gamma
    beta = -0.5 * r[..., 3]
    u = r[..., 1] / (2.0 * beta)
    v = r[..., 2] / (2.0 * beta)
    s = g - (g - 1.0) * (r[..., 0] + beta * (u * u + v * v))
    # s = (1 - gamma) ln rho - ln(2 beta) once p = rho / (2 beta) is substituted
    rho = np.exp(-(s + np.log(2.0 * beta)) / (g - 1.0))
    p = rho / (2.0 * beta)
    return np.stack([rho, u, v, p], axis=-1)


def entropy_vars_to_conserved(r, gas=IDEAL_AIR):
    return primitive_to_conserved(entropy_vars_to_primitive(r, gas), gas)


def entropy_flux_potential(q):
    """``psi = rho * velocity``, i.e. the two momentum components."""
    q = np.asarray(q, dtype=float)
    return q[..., 1].copy(), q[..., 2].copy()
