"""Batched interface-flux evaluation with a selectable backend.

The solver calls :func:`interface_flux` on ``(n, 4)`` arrays of primitive
states. With numba available it runs the compiled loop in ``_numba``;
setting ``ALLMACH_BACKEND=numpy`` (read at import) switches to the
vectorised functions of :mod:`allmach.fluxes`. Both paths are exposed
directly so tests and the benchmark can compare them.
"""
import numpy as np

from .._backend import HAVE_NUMBA, requested_backend
from ..errors import DegenerateEigensystem
from ..fluxes import FluxKind, interface_flux_prim

BACKEND = requested_backend()


def numpy_interface_flux(wl, wr, kind, m_cut, gas):
    return interface_flux_prim(wl, wr, FluxKind(kind), m_cut, gas)


if HAVE_NUMBA:
    from . import _numba

    def numba_interface_flux(wl, wr, kind, m_cut, gas):
        out, bad = _numba.interface_flux(
            np.ascontiguousarray(wl, dtype=np.float64),
            np.ascontiguousarray(wr, dtype=np.float64),
            int(kind),
            float(m_cut),
            float(gas.gamma),
        )
        if bad >= 0:
            raise DegenerateEigensystem(f"Roe-average sound speed vanished at interface {bad}")
        return out

    def numba_rhs_constant(cells, periodic, kind, m_cut, gas, dx, dy, floor):
        """Fused first-order rate, or None when the checked path must take over."""
        rate, ok = _numba.rhs_constant(np.ascontiguousarray(cells, dtype=np.float64), bool(periodic[0]),
                                       bool(periodic[1]), int(kind), float(m_cut), float(gas.gamma),
                                       float(dx), float(dy), float(floor))
        return rate if ok else None

else:  # pragma: no cover
    numba_interface_flux = None
    numba_rhs_constant = None


def interface_flux(wl, wr, kind, m_cut, gas, backend=None):
    backend = backend or BACKEND
    if backend == "numba":
        return numba_interface_flux(wl, wr, kind, m_cut, gas)
    return numpy_interface_flux(wl, wr, kind, m_cut, gas)


__all__ = ["BACKEND", "interface_flux", "numpy_interface_flux", "numba_interface_flux", "numba_rhs_constant"]
