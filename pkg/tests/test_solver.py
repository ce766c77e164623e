import numpy as np
import pytest
import sympy as sp

from allmach import solver
from allmach.eos import primitive_to_conserved
from allmach.errors import InvalidGrid, NonFiniteState
from allmach.experiments import setup_gresho, setup_sound_wave
from allmach.fluxes import FluxKind
from allmach.solver import (
    Boundary,
    Field2D,
    Reconstruction,
    build_grid,
    cfl_dt,
    compute_rhs,
    evolve,
    fill_ghosts,
    minmod,
    reconstruct,
    ssprk43_step,
)


def uniform_field(nx, ny, w, boundary=(Boundary.PERIODIC, Boundary.PERIODIC), bounds=(0, 1, 0, 1)):
    grid = build_grid(bounds, nx, ny)
    cells = np.broadcast_to(primitive_to_conserved(np.array(w, float)), (nx, ny, 4)).copy()
    return Field2D(grid, cells, 0.0, boundary)


def test_grid_geometry():
    g = build_grid((0, 2, -1, 1), 4, 2)
    assert (g.dx, g.dy, g.cell_area) == (0.5, 1.0, 0.5)
    np.testing.assert_allclose(g.x_centers(), [0.25, 0.75, 1.25, 1.75])
    np.testing.assert_allclose(g.y_interfaces(), [-1, 0, 1])
    x, y = g.meshgrid()
    assert x.shape == (4, 2) and y[0, 1] == 0.5


@pytest.mark.parametrize("bounds, nx, ny", [((0, 0, 0, 1), 4, 4), ((0, 1, 0, 1), 0, 4), ((0, 1, 0, 1), 2.5, 1)])
def test_invalid_grid(bounds, nx, ny):
    with pytest.raises(InvalidGrid):
        build_grid(bounds, nx, ny)


def test_field_shape_checked():
    with pytest.raises(InvalidGrid):
        Field2D(build_grid((0, 1, 0, 1), 3, 2), np.ones((2, 3, 4)))


def test_fill_ghosts():
    w = np.arange(3 * 2 * 4, dtype=float).reshape(3, 2, 4)
    p = fill_ghosts(w, (Boundary.PERIODIC, Boundary.TRANSMISSIVE))
    assert p.shape == (7, 6, 4)
    np.testing.assert_array_equal(p[0, 2], w[1, 0])
    np.testing.assert_array_equal(p[1, 2], w[2, 0])
    np.testing.assert_array_equal(p[5, 2], w[0, 0])
    np.testing.assert_array_equal(p[2, 0], w[0, 0])
    np.testing.assert_array_equal(p[2, 5], w[0, 1])


def test_minmod():
    np.testing.assert_array_equal(minmod(np.array([1.0, -2.0, 1.0, 0.0]), np.array([3.0, -1.0, -1.0, 2.0])),
                                  [1.0, -1.0, 0.0, 0.0])


def test_linear_reconstruction_is_exact_for_linear_data():
    field = setup_sound_wave(20)
    x = field.grid.x_centers()
    w = np.column_stack([1 + 0.1 * x, 0.2 + 0 * x, 0 * x, 2 - 0.5 * x])[:, None, :]
    field = field.with_cells(primitive_to_conserved(w))
    left, right = reconstruct(field, Reconstruction.LIMITED_LINEAR, 0)
    xi = field.grid.x_interfaces()
    # interior interfaces see the exact linear profile from both sides
    np.testing.assert_allclose(left[2:-2, 0, 0], 1 + 0.1 * xi[2:-2], rtol=1e-14)
    np.testing.assert_allclose(right[2:-2, 0, 3], 2 - 0.5 * xi[2:-2], rtol=1e-14)


def test_reconstruction_falls_back_to_constant_when_inadmissible():
    # a tiny pressure next to a large one: the limited slope would make p negative at a face
    w = np.array([[1, 0, 0, 10.0], [1, 0, 0, 10.0], [1, 0, 0, 1e-3], [1, 0, 0, 1e-3 * 0.5], [1, 0, 0, 1e-3 * 0.1]])
    wp = fill_ghosts(w[:, None, :], (Boundary.TRANSMISSIVE, Boundary.PERIODIC))
    left, right = solver.reconstruct_padded(wp, Reconstruction.LIMITED_LINEAR, 0)
    assert np.all(left[..., 3] > 0) and np.all(right[..., 3] > 0)


def test_cfl_dt():
    f = uniform_field(10, 10, (1.4, 0, 0, 1.0))  # c = 1, dx = dy = 0.1
    assert cfl_dt(f, 0.4) == pytest.approx(0.02, rel=1e-14)
    assert cfl_dt(uniform_field(20, 20, (1.4, 0, 0, 1.0)), 0.4) == pytest.approx(0.01, rel=1e-14)
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            cfl_dt(f, bad)


def test_ssprk_zero_rate_is_identity():
    q = np.array([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(ssprk43_step(q, 0.1, lambda y: np.zeros_like(y)), q)
    with pytest.raises(ValueError):
        ssprk43_step(q, 0.0, lambda y: y)


def test_ssprk_matches_stability_polynomial():
    # symbolic expansion of the four stages for L(q) = lambda q
    z = sp.symbols("z")
    h = z / 2
    q1 = 1 + h
    q2 = q1 + h * q1
    q3 = sp.Rational(2, 3) + (q2 + h * q2) / 3
    q4 = sp.expand(q3 + h * q3)
    assert sp.simplify(q4 - (1 + z + z ** 2 / 2 + z ** 3 / 6 + z ** 4 / 48)) == 0
    poly = sp.lambdify(z, q4)
    for lam in (-1.0, -3.7, 0.5 + 2j):
        got = ssprk43_step(np.array([1.0 + 0j]), 0.1, lambda y: lam * y)[0]
        assert got == pytest.approx(complex(poly(0.1 * lam)), rel=1e-15)


def test_ssprk_single_step_error():
    dt = 0.1
    err = abs(ssprk43_step(np.array([1.0]), dt, lambda y: -y)[0] - np.exp(-dt))
    # local error of a third-order method: (1/24 - 1/48) dt^4
    assert err == pytest.approx(dt ** 4 / 48, rel=0.05)


def test_ssprk_observed_order():
    # nonlinear smooth system y' = (-y2, y1) * (1 + 0.1 y1), integrated to t = 1
    def rhs(y):
        return np.array([-y[1], y[0]]) * (1 + 0.1 * y[0])

    def solve(dt):
        y = np.array([1.0, 0.0])
        for _ in range(round(1.0 / dt)):
            y = ssprk43_step(y, dt, rhs)
        return y

    ref = solve(1e-4)
    errs = [np.abs(solve(dt) - ref).max() for dt in (1e-1, 5e-2, 2.5e-2)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert orders.min() >= 2.9


def test_evolve_to_current_time_is_identity():
    f = setup_sound_wave(10)
    g = evolve(f, 0.0, FluxKind.ES)
    np.testing.assert_array_equal(g.cells, f.cells)
    with pytest.raises(ValueError):
        evolve(f.with_cells(f.cells, 1.0), 0.5, FluxKind.ES)


@pytest.mark.parametrize("kind", list(FluxKind))
def test_free_stream_preserved(kind):
    for scheme in Reconstruction:
        for boundary in ((Boundary.PERIODIC, Boundary.PERIODIC), (Boundary.TRANSMISSIVE, Boundary.TRANSMISSIVE)):
            f = uniform_field(6, 5, (0.8, 0.3, -0.2, 1.1), boundary)
            g = evolve(f, 1.0, kind, scheme)
            assert g.time == 1.0
            assert np.abs(g.cells - f.cells).max() <= 1e-12


@pytest.mark.parametrize("kind", list(FluxKind))
def test_periodic_conservation(kind, rng):
    f = setup_gresho(12, 12, 0.3)
    f.cells[...] *= 1 + 0.02 * rng.standard_normal(f.cells.shape)
    totals = f.totals()
    g = evolve(f, 10.0, kind, Reconstruction.LIMITED_LINEAR, max_steps=100)
    scale = np.abs(f.cells).sum(axis=(0, 1)) * f.grid.cell_area
    assert np.all(np.abs(g.totals() - totals) <= 1e-10 * scale)


@pytest.mark.parametrize("scheme", list(Reconstruction))
def test_one_d_two_d_consistency(scheme):
    one = setup_sound_wave(40)
    cells = np.repeat(one.cells, 3, axis=1)
    two = Field2D(build_grid((0, 1, 0, 3), 40, 3), cells, 0.0, one.boundary)
    a = evolve(one, 0.1, FluxKind.ES_KES_LM, scheme)
    b = evolve(two, 0.1, FluxKind.ES_KES_LM, scheme)
    for j in range(3):
        assert np.abs(b.cells[:, j] - a.cells[:, 0]).max() <= 1e-12


def test_callbacks_and_step_limit():
    seen = []
    f = evolve(setup_sound_wave(20), 0.2, FluxKind.ES_LM, callbacks=(lambda fld, step: seen.append((step, fld.time)),))
    assert [s for s, _ in seen] == list(range(1, len(seen) + 1))
    assert seen[-1][1] == 0.2 == f.time
    assert all(t1 > t0 for (_, t0), (_, t1) in zip(seen, seen[1:]))
    g = evolve(setup_sound_wave(20), 0.2, FluxKind.ES_LM, max_steps=3)
    assert 0 < g.time < 0.2


def test_non_finite_state_is_reported(monkeypatch):
    def broken(field, *args, **kwargs):
        out = np.zeros_like(field.cells)
        out[2, 0, 1] = np.inf
        return out

    monkeypatch.setattr(solver, "compute_rhs", broken)
    with pytest.raises(NonFiniteState, match=r"cell \(2, 0\)"):
        evolve(setup_sound_wave(8), 0.1, FluxKind.ES)


def test_rhs_of_uniform_state_vanishes():
    f = uniform_field(5, 4, (1.0, 0.4, 0.1, 2.0))
    for kind in FluxKind:
        assert np.abs(compute_rhs(f, kind, Reconstruction.LIMITED_LINEAR)).max() <= 1e-13
