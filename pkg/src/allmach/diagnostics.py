"""Entropy, kinetic-energy and Mach-scaling diagnostics.

Everything here is a pure function of a field snapshot or of a pair of
states, so recomputation is bit-identical.
"""
import csv
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from .eos import IDEAL_AIR, entropy_density, physical_entropy, primitive_to_entropy_vars, sound_speed
from .errors import DegenerateFit
from .fluxes import FluxKind, central_flux_prim, diffusion_operator, interface_flux_prim, state_from_primitive
from .solver import Boundary, Reconstruction, compute_rhs, interface_fluxes


def entropy_field(field, gas=IDEAL_AIR):
    """Physical entropy ``s = ln(p rho^-gamma)`` per cell."""
    return physical_entropy(field.primitive(gas), gas)


def entropy_density_field(field, gas=IDEAL_AIR):
    """Mathematical entropy ``U = -rho s/(gamma-1)`` per cell."""
    return entropy_density(field.primitive(gas), gas)


def total_entropy(field, gas=IDEAL_AIR):
    return float(entropy_density_field(field, gas).sum() * field.grid.cell_area)


def kinetic_energy_field(field):
    q = field.cells
    return 0.5 * (q[..., 1] ** 2 + q[..., 2] ** 2) / q[..., 0]


def total_kinetic_energy(field):
    return float(kinetic_energy_field(field).sum() * field.grid.cell_area)


def mach_field(field, gas=IDEAL_AIR):
    w = field.primitive(gas)
    return np.hypot(w[..., 1], w[..., 2]) / sound_speed(w, gas)


def flux_entropy_dissipation(left, right, kind, gas=IDEAL_AIR, m_cut=0.0):
    """``(r+ - r-) . F - (psi+ - psi-)`` for primitive states; zero for F*, <= 0 for the ES family."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    f = interface_flux_prim(left, right, kind, m_cut, gas)
    dr = primitive_to_entropy_vars(right, gas) - primitive_to_entropy_vars(left, gas)
    dpsi = right[..., 0] * right[..., 1] - left[..., 0] * left[..., 1]
    return np.einsum("...i,...i->...", dr, f) - dpsi


class KineticEnergyBalance(NamedTuple):
    ke_rate: float
    pressure_work: float
    residual: float
    scale: float


def ke_balance(field, kind, gas=IDEAL_AIR, m_cut=0.0):
    """Semi-discrete kinetic-energy budget of the first-order operator.

    ``ke_rate`` is ``sum(-|v|^2/2 drho/dt + v . d(rho v)/dt) dx dy`` and
    ``pressure_work`` is ``sum <p> dv_n / dn dx dy`` over interfaces, with
    ``<p>`` read off the central part of the flux as ``F_mn - v_n_bar F_rho``.
    The residual is their difference; it vanishes for F* and is non-positive
    when the diffusion dissipates kinetic energy.
    """
    kind = FluxKind(kind)
    scheme = Reconstruction.CONSTANT
    rate = compute_rhs(field, kind, scheme, gas, m_cut)
    q = field.cells
    vel = q[..., 1:3] / q[..., :1]
    area = field.grid.cell_area
    cell_terms = (-0.5 * (vel ** 2).sum(axis=-1) * rate[..., 0] + (vel * rate[..., 1:3]).sum(axis=-1)) * area
    ke_rate = float(cell_terms.sum())
    scale = float(np.abs(cell_terms).sum())

    work = 0.0
    spacing = {0: field.grid.dx, 1: field.grid.dy}
    for axis, (left, right, _) in interface_fluxes(field, kind, scheme, gas, m_cut).items():
        central = central_flux_prim(left, right, kind, gas)
        p_avg = central[..., 1] - 0.5 * (left[..., 1] + right[..., 1]) * central[..., 0]
        terms = p_avg * (right[..., 1] - left[..., 1]) * (area / spacing[axis])
        if field.boundary[axis] is Boundary.PERIODIC:
            # first and last interface coincide
            terms = np.delete(terms, -1, axis=axis)
        work += float(terms.sum())
        scale += float(np.abs(terms).sum())
    return KineticEnergyBalance(ke_rate, work, ke_rate - work, scale)


def ke_balance_residual(field, kind, gas=IDEAL_AIR, m_cut=0.0):
    return ke_balance(field, kind, gas, m_cut).residual


@dataclass
class DiagnosticsRecord:
    time: float
    total_entropy: float
    total_kinetic_energy: float
    max_mach: float
    ke_balance_residual: float


CSV_COLUMNS = tuple(f.name for f in fields(DiagnosticsRecord))


def record(field, kind, gas=IDEAL_AIR, m_cut=0.0):
    return DiagnosticsRecord(
        time=float(field.time),
        total_entropy=total_entropy(field, gas),
        total_kinetic_energy=total_kinetic_energy(field),
        max_mach=float(mach_field(field, gas).max()),
        ke_balance_residual=ke_balance_residual(field, kind, gas, m_cut),
    )


def write_records_csv(records, path, comments=()):
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([repr(float(getattr(rec, name))) for name in CSV_COLUMNS])


def read_records_csv(path):
    with open(path) as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(rows)
    return [DiagnosticsRecord(**{k: float(v) for k, v in row.items()}) for row in reader]


# ---------------------------------------------------------------------------
# Mach scaling of the diffusion matrix in primitive variables

# Expected formal orders of the diffusion matrix in non-dimensional primitive
# variables: -1 for O(1/M), 0 for O(1), None for a vanishing leading term (the
# remainder is O(M)). Indices follow (rho, u, v, p).
_ROE_ORDERS = (
    (0, None, None, -1),
    (None, -1, None, -1),
    (None, None, 0, 0),
    (None, None, None, -1),
)
_LM_ORDERS = (
    (0, None, None, 0),
    (None, 0, None, -1),
    (None, None, 0, None),
    (None, None, None, 0),
)


def _without_u_p_coupling(orders):
    # |lambda_1| = |lambda_4| cancels the (u, p) entry exactly
    rows = [list(r) for r in orders]
    rows[1][3] = None
    return tuple(tuple(r) for r in rows)


EXPECTED_ORDERS = {
    FluxKind.ES: _ROE_ORDERS,
    FluxKind.ROE: _ROE_ORDERS,
    FluxKind.ES_KES: _without_u_p_coupling(_ROE_ORDERS),
    FluxKind.ES_LM: _LM_ORDERS,
    FluxKind.ROE_LM: _LM_ORDERS,
    FluxKind.ES_KES_LM: _without_u_p_coupling(_LM_ORDERS),
}

ZERO_TOL = 1e-10


@dataclass
class ScalingReport:
    kind: FluxKind
    mach_levels: np.ndarray
    # D_prim at the probe states (c = 1, |v| = M), shape (levels, 4, 4)
    prim_matrices: np.ndarray
    # same matrices in non-dimensional variables scaled with u_ref = M c
    nondim_matrices: np.ndarray
    # entries that are below ZERO_TOL at every level
    vanishing: np.ndarray
    # log-log slopes of |nondim entry| vs M; NaN where vanishing
    fitted_exponents: np.ndarray

    def compare(self, expected=None, tol=0.15):
        """Per-entry agreement with a table of formal orders.

        O(1/M) entries need slope -1 +- tol. O(1) entries need slope 0 +- tol
        or must vanish identically. Entries with a zero leading term must
        vanish or decay at least like M (slope >= 1 - tol).
        """
        expected = EXPECTED_ORDERS[self.kind] if expected is None else expected
        ok = np.zeros((4, 4), dtype=bool)
        for i in range(4):
            for j in range(4):
                order = expected[i][j]
                slope = self.fitted_exponents[i, j]
                zero = self.vanishing[i, j]
                if order is None:
                    ok[i, j] = zero or slope >= 1.0 - tol
                elif order == 0:
                    ok[i, j] = zero or abs(slope) <= tol
                else:
                    ok[i, j] = (not zero) and abs(slope - order) <= tol
        return ok


def _dq_dprim(w, gas):
    rho, u, v, _ = w
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [u, rho, 0.0, 0.0],
        [v, 0.0, rho, 0.0],
        [0.5 * (u * u + v * v), rho * u, rho * v, 1.0 / (gas.gamma - 1.0)],
    ])


def _dr_dprim(w, gas):
    rho, u, v, p = w
    g = gas.gamma
    k2 = u * u + v * v
    return np.array([
        [g / ((g - 1.0) * rho) - k2 / (2.0 * p), -rho * u / p, -rho * v / p, -1.0 / ((g - 1.0) * p) + rho * k2 / (2.0 * p * p)],
        [u / p, rho / p, 0.0, -rho * u / p ** 2],
        [v / p, 0.0, rho / p, -rho * v / p ** 2],
        [-1.0 / p, 0.0, 0.0, rho / p ** 2],
    ])


def primitive_diffusion_matrix(w, kind, gas=IDEAL_AIR, m_cut=0.0):
    """``(du/dq) R|Lambda|S R^T (dr/dq) (dq/du)`` at one primitive state."""
    w = np.asarray(w, dtype=float)
    Q = diffusion_operator(state_from_primitive(w, gas), kind, gas, m_cut)
    # (dr/dq)(dq/du) collapses to dr/du
    return np.linalg.solve(_dq_dprim(w, gas), Q @ _dr_dprim(w, gas))


def diffusion_scaling_probe(kind, mach_levels=(1e-1, 1e-2, 1e-3, 1e-4), gas=IDEAL_AIR, m_cut=0.0, angle=0.0):
    """Measure how each entry of the primitive diffusion matrix scales with Mach number.

    Probe states have rho = 1, p = 1/gamma (so c = 1) and velocity of size M
    at ``angle`` to the interface normal.
    """
    kind = FluxKind(kind)
    if kind not in EXPECTED_ORDERS:
        raise ValueError(f"no diffusion matrix to probe for {kind.label}")
    levels = np.asarray(mach_levels, dtype=float)
    if levels.size < 3 or np.any(np.diff(levels) >= 0) or np.any(levels <= 0):
        raise DegenerateFit("need at least 3 strictly decreasing positive Mach levels")
    if np.log10(levels[0] / levels[-1]) < 2.0 - 1e-12:
        raise DegenerateFit("Mach levels must span at least two decades")

    # Roe and Roe-LM share their small-jump diffusion matrix with ES and ES-LM
    probe_kind = {FluxKind.ROE: FluxKind.ES, FluxKind.ROE_LM: FluxKind.ES_LM}.get(kind, kind)
    prim = []
    for m in levels:
        w = np.array([1.0, m * np.cos(angle), m * np.sin(angle), 1.0 / gas.gamma])
        prim.append(primitive_diffusion_matrix(w, probe_kind, gas, m_cut))
    prim = np.array(prim)
    # u_ref = M c with c = 1: velocities scale by 1/M, the rate by 1/M
    t = np.stack([np.array([1.0, 1.0 / m, 1.0 / m, 1.0]) for m in levels])
    nondim = prim * t[:, :, None] / t[:, None, :] / levels[:, None, None]

    vanishing = np.all(np.abs(prim) <= ZERO_TOL, axis=0)
    slopes = np.full((4, 4), np.nan)
    logm = np.log(levels)
    for i in range(4):
        for j in range(4):
            vals = np.abs(nondim[:, i, j])
            if not vanishing[i, j] and np.all(vals > 0):
                slopes[i, j] = np.polyfit(logm, np.log(vals), 1)[0]
    return ScalingReport(kind, levels, prim, nondim, vanishing, slopes)


def write_scaling_csv(report, path, comments=()):
    """Long-format CSV: one row per (row, col) entry with its slope and per-level values.

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _write_scaling(report, path, comments)
    else:
        with open(path, "w", newline="") as fh:
            _write_scaling(report, fh, comments)


def _write_scaling(report, fh, comments):
    for line in comments:
        fh.write(f"# {line}\n")
    writer = csv.writer(fh)
    ok = report.compare()
    expected = EXPECTED_ORDERS[report.kind]
    writer.writerow(["kind", "row", "col", "expected_order", "fitted_slope", "vanishing", "matches"]
                    + [f"M={m:g}" for m in report.mach_levels])
    for i in range(4):
        for j in range(4):
            order = expected[i][j]
            writer.writerow(
                [report.kind.label, i + 1, j + 1, "zero" if order is None else order,
                 repr(float(report.fitted_exponents[i, j])), int(report.vanishing[i, j]), int(ok[i, j])]
                + [repr(float(x)) for x in report.nondim_matrices[:, i, j]]
            )
