"""Cartesian finite-volume discretisation and explicit time integration.

Cells are stored as an ``(nx, ny, 4)`` array of conserved states. The spatial
operator reconstructs primitive variables, evaluates one two-state flux per
interface and takes flux differences; the y-sweep reuses the x-flux by
exchanging the velocity components. Time stepping is the four-stage,
third-order SSP Runge-Kutta scheme (SSP coefficient 2).
"""
from dataclasses import dataclass, field as dc_field, replace
from enum import Enum

import numpy as np

from .eos import ADMISSIBILITY_FLOOR, IDEAL_AIR, conserved_to_primitive, sound_speed
from .errors import EulerError, InvalidGrid, NonFiniteState
from .fluxes import FluxKind, swap_xy
from . import kernels
from .kernels import interface_flux

DEFAULT_CFL = 0.4
N_GHOST = 2


class Boundary(Enum):
    PERIODIC = "periodic"
    TRANSMISSIVE = "transmissive"


class Reconstruction(Enum):
    CONSTANT = "constant"
    LIMITED_LINEAR = "limited_linear"

    @classmethod
    def parse(cls, text):
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower().replace("-", "_")
        aliases = {"constant": cls.CONSTANT, "none": cls.CONSTANT, "linear": cls.LIMITED_LINEAR,
                   "limited_linear": cls.LIMITED_LINEAR, "minmod": cls.LIMITED_LINEAR}
        if key not in aliases:
            raise ValueError(f"unknown reconstruction {text!r}")
        return aliases[key]


@dataclass(frozen=True)
class Grid2D:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self):
        return (self.y_max - self.y_min) / self.ny

    @property
    def cell_area(self):
        return self.dx * self.dy

    def x_centers(self):
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self):
        return self.y_min + (np.arange(self.ny) + 0.5) * self.dy

    def x_interfaces(self):
        return self.x_min + np.arange(self.nx + 1) * self.dx

    def y_interfaces(self):
        return self.y_min + np.arange(self.ny + 1) * self.dy

    def meshgrid(self):
        """Cell-center coordinates, each of shape ``(nx, ny)``."""
        return np.meshgrid(self.x_centers(), self.y_centers(), indexing="ij")


def build_grid(bounds, nx, ny):
    x_min, x_max, y_min, y_max = (float(b) for b in bounds)
    if not (x_min < x_max and y_min < y_max):
        raise InvalidGrid(f"bounds must be ordered, got {bounds}")
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise InvalidGrid(f"cell counts must be integers >= 1, got nx={nx}, ny={ny}")
    return Grid2D(x_min, x_max, y_min, y_max, int(nx), int(ny))


@dataclass
class Field2D:
    grid: Grid2D
    cells: np.ndarray
    time: float = 0.0
    boundary: tuple = dc_field(default=(Boundary.PERIODIC, Boundary.PERIODIC))

    def __post_init__(self):
        self.cells = np.asarray(self.cells, dtype=float)
        if self.cells.shape != (self.grid.nx, self.grid.ny, 4):
            raise InvalidGrid(f"cells must have shape {(self.grid.nx, self.grid.ny, 4)}, got {self.cells.shape}")

    def primitive(self, gas=IDEAL_AIR):
        return conserved_to_primitive(self.cells, gas)

    def with_cells(self, cells, time=None):
        return replace(self, cells=cells, time=self.time if time is None else time)

    def totals(self):
        """Integrals of mass, momenta and energy over the domain."""
        return self.cells.sum(axis=(0, 1)) * self.grid.cell_area


def _ghost_index(n, boundary, ng):
    idx = np.arange(-ng, n + ng)
    if boundary is Boundary.PERIODIC:
        return idx % n
    return np.clip(idx, 0, n - 1)


def fill_ghosts(w, boundary, ng=N_GHOST):
    """Pad both axes with ``ng`` ghost layers according to the per-axis policy."""
    ix = _ghost_index(w.shape[0], boundary[0], ng)
    iy = _ghost_index(w.shape[1], boundary[1], ng)
    return w.take(ix, axis=0).take(iy, axis=1)


def minmod(a, b):
    return np.where(a * b > 0.0, np.where(np.abs(a) < np.abs(b), a, b), 0.0)


def reconstruct_padded(wp, scheme, axis):
    """Interface states along ``axis`` from a ghost-padded primitive array.

    Returns ``(left, right)`` with ``n + 1`` interfaces along ``axis`` and the
    ghost layers stripped from the other axis.
    """
    ng = N_GHOST
    w = np.moveaxis(wp, axis, 0)
    other = slice(ng, w.shape[1] - ng)
    w = w[:, other]
    n = w.shape[0] - 2 * ng
    # cells ng-1 .. ng+n cover both sides of the n+1 interfaces
    lo, hi = ng - 1, ng + n + 1
    if scheme is Reconstruction.CONSTANT:
        left, right = w[lo:hi - 1], w[lo + 1:hi]
    else:
        centre = w[lo:hi]
        slope = minmod(centre - w[lo - 1:hi - 1], w[lo + 1:hi + 1] - centre)
        minus = centre - 0.5 * slope
        plus = centre + 0.5 * slope
        bad = (np.minimum(minus[..., 0], plus[..., 0]) <= 0.0) | (np.minimum(minus[..., 3], plus[..., 3]) <= 0.0)
        if np.any(bad):
            minus = np.where(bad[..., None], centre, minus)
            plus = np.where(bad[..., None], centre, plus)
        left, right = plus[:-1], minus[1:]
    return np.moveaxis(left, 0, axis), np.moveaxis(right, 0, axis)


def reconstruct(field, scheme, axis, gas=IDEAL_AIR):
    wp = fill_ghosts(field.primitive(gas), field.boundary)
    return reconstruct_padded(wp, Reconstruction.parse(scheme), axis)


def _sweep(wp, scheme, axis, kind, m_cut, gas, backend=None):
    left, right = reconstruct_padded(wp, scheme, axis)
    if axis == 1:
        left, right = swap_xy(left), swap_xy(right)
    shape = left.shape
    f = interface_flux(left.reshape(-1, 4), right.reshape(-1, 4), kind, m_cut, gas, backend).reshape(shape)
    return left, right, f


def interface_fluxes(field, kind, scheme=Reconstruction.CONSTANT, gas=IDEAL_AIR, m_cut=0.0, backend=None):
    """Interface states and fluxes, both expressed in the interface-normal frame.

    Returns ``{axis: (left, right, flux)}``; the x-entry has shape
    ``(nx+1, ny, 4)``, the y-entry ``(nx, ny+1, 4)``.
    """
    kind = FluxKind(kind)
    scheme = Reconstruction.parse(scheme)
    try:
        w = field.primitive(gas)
    except EulerError as exc:
        raise type(exc)(f"{exc} (t={field.time})") from exc
    wp = fill_ghosts(w, field.boundary)
    out = {}
    for axis, n in ((0, field.grid.nx), (1, field.grid.ny)):
        if n > 1:
            out[axis] = _sweep(wp, scheme, axis, kind, m_cut, gas, backend)
    return out


def compute_rhs(field, kind, scheme=Reconstruction.CONSTANT, gas=IDEAL_AIR, m_cut=0.0, backend=None):
    """Semi-discrete rate ``-(F_{i+1/2} - F_{i-1/2})/dx - (G_{j+1/2} - G_{j-1/2})/dy``."""
    scheme = Reconstruction.parse(scheme)
    if scheme is Reconstruction.CONSTANT and (backend or kernels.BACKEND) == "numba":
        periodic = tuple(b is Boundary.PERIODIC for b in field.boundary)
        rate = kernels.numba_rhs_constant(field.cells, periodic, FluxKind(kind), m_cut, gas,
                                          field.grid.dx, field.grid.dy, ADMISSIBILITY_FLOOR)
        if rate is not None:
            return rate
    rate = np.zeros_like(field.cells)
    for axis, (_, _, f) in interface_fluxes(field, kind, scheme, gas, m_cut, backend).items():
        if axis == 0:
            rate -= (f[1:] - f[:-1]) / field.grid.dx
        else:
            g = swap_xy(f)
            rate -= (g[:, 1:] - g[:, :-1]) / field.grid.dy
    return rate


def cfl_dt(field, cfl=DEFAULT_CFL, gas=IDEAL_AIR):
    if not 0.0 < cfl <= 1.0:
        raise ValueError(f"cfl must lie in (0, 1], got {cfl}")
    w = field.primitive(gas)
    c = sound_speed(w, gas)
    rate = (np.abs(w[..., 1]) + c) / field.grid.dx + (np.abs(w[..., 2]) + c) / field.grid.dy
    return cfl / float(rate.max())


def ssprk43_step(q, dt, rhs):
    """One step of the four-stage third-order SSP Runge-Kutta scheme.

    ``q`` is an array or a :class:`Field2D`; ``rhs`` maps the same type to a
    rate array.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if isinstance(q, Field2D):
        def wrap(cells):
            return q.with_cells(cells)

        def lift(field):
            return rhs(field)

        q0 = q.cells
        q1 = q0 + 0.5 * dt * lift(q)
        q2 = q1 + 0.5 * dt * lift(wrap(q1))
        q3 = 2.0 / 3.0 * q0 + (q2 + 0.5 * dt * lift(wrap(q2))) / 3.0
        q4 = q3 + 0.5 * dt * lift(wrap(q3))
        return q.with_cells(q4, q.time + dt)
    q = np.asarray(q)
    if not np.iscomplexobj(q):
        q = q.astype(float, copy=False)
    q1 = q + 0.5 * dt * rhs(q)
    q2 = q1 + 0.5 * dt * rhs(q1)
    q3 = 2.0 / 3.0 * q + (q2 + 0.5 * dt * rhs(q2)) / 3.0
    return q3 + 0.5 * dt * rhs(q3)


def evolve(field, t_end, kind, scheme=Reconstruction.CONSTANT, cfl=DEFAULT_CFL, gas=IDEAL_AIR,
           m_cut=0.0, callbacks=(), max_steps=None):
    """Advance ``field`` to ``t_end`` with CFL-limited steps, landing exactly on ``t_end``.

    Each callback is called as ``callback(field, step)`` after every step.
    """
    if t_end < field.time:
        raise ValueError(f"t_end={t_end} lies before the field time {field.time}")
    kind = FluxKind(kind)
    scheme = Reconstruction.parse(scheme)

    def rhs(f):
        return compute_rhs(f, kind, scheme, gas, m_cut)

    step = 0
    while field.time < t_end:
        if max_steps is not None and step >= max_steps:
            break
        dt = cfl_dt(field, cfl, gas)
        last = field.time + dt >= t_end
        if last:
            dt = t_end - field.time
        field = ssprk43_step(field, dt, rhs)
        if last:
            field.time = t_end
        step += 1
        if not np.all(np.isfinite(field.cells)):
            bad = tuple(int(i) for i in np.argwhere(~np.isfinite(field.cells))[0][:2])
            raise NonFiniteState(f"non-finite state in cell {bad} at t={field.time}")
        for cb in callbacks:
            cb(field, step)
    return field
