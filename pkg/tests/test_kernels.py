import os
import subprocess
import sys

import numpy as np
import pytest

from allmach import kernels
from allmach.eos import IDEAL_AIR, GasModel
from allmach.errors import DegenerateEigensystem, NonPositiveDensity, NonPositivePressure
from allmach.experiments import setup_gresho, setup_sound_wave
from allmach.fluxes import FluxKind
from allmach.kernels import _numba
from allmach.solver import Reconstruction, compute_rhs

from _states import random_pairs

needs_numba = pytest.mark.skipif(kernels.numba_interface_flux is None, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("kind", list(FluxKind))
@pytest.mark.parametrize("m_cut", [0.0, 0.3])
def test_backends_agree(rng, kind, m_cut):
    wl, wr = random_pairs(rng, 5000)
    # include near-equal pairs to exercise the log-mean series branch
    wr[:500] = wl[:500] * (1 + 1e-7 * rng.standard_normal((500, 4)))
    gas = GasModel(1.3)
    a = kernels.interface_flux(wl, wr, kind, m_cut, gas, backend="numba")
    b = kernels.interface_flux(wl, wr, kind, m_cut, gas, backend="numpy")
    scale = np.abs(b).max(axis=-1, keepdims=True)
    assert np.max(np.abs(a - b) / scale) <= 1e-12


def test_kind_codes_match_enum():
    names = ["ROE", "ROE_LM", "ES", "ES_KES", "ES_LM", "ES_KES_LM", "LLF", "EC"]
    assert [getattr(_numba, n) for n in names] == [int(FluxKind[n]) for n in names]


@needs_numba
def test_numba_logmean_matches_numpy(rng):
    from allmach.averages import logarithmic_mean

    a = 10 ** rng.uniform(-3, 3, 2000)
    b = a * (1 + 10 ** rng.uniform(-10, 3, 2000))
    got = np.array([_numba.logmean(x, y) for x, y in zip(a, b)])
    np.testing.assert_allclose(got, logarithmic_mean(a, b), rtol=1e-15)
    assert _numba.logmean(2.0, 3.0) == _numba.logmean(3.0, 2.0)


@needs_numba
def test_numba_degenerate_roe():
    cold = np.array([[1.0, 0.0, 0.0, 1e-40]])
    with pytest.raises(DegenerateEigensystem, match="interface 0"):
        kernels.interface_flux(cold, cold, FluxKind.ROE, 0.0, IDEAL_AIR, backend="numba")


@needs_numba
@pytest.mark.parametrize("kind", list(FluxKind))
@pytest.mark.parametrize("scheme", list(Reconstruction))
def test_rhs_backends_agree(rng, kind, scheme):
    field = setup_gresho(12, 10, 0.3)
    field.cells[..., 1:3] += 0.05 * rng.standard_normal((12, 10, 2))
    for f in (field, setup_sound_wave(40)):
        a = compute_rhs(f, kind, scheme, m_cut=0.05, backend="numba")
        b = compute_rhs(f, kind, scheme, m_cut=0.05, backend="numpy")
        assert np.abs(a - b).max() <= 1e-12 * np.abs(b).max()


@needs_numba
def test_fused_rhs_falls_back_to_checked_errors():
    field = setup_sound_wave(10)
    field.cells[3, 0, 0] = -1.0
    with pytest.raises(NonPositiveDensity):
        compute_rhs(field, FluxKind.ES_LM, backend="numba")
    field = setup_sound_wave(10)
    field.cells[4, 0, 3] = 0.0
    with pytest.raises(NonPositivePressure):
        compute_rhs(field, FluxKind.ES, backend="numba")


def _backend_in_subprocess(value):
    env = dict(os.environ)
    env["ALLMACH_BACKEND"] = value
    return subprocess.run([sys.executable, "-c", "from allmach import kernels; print(kernels.BACKEND)"],
                          env=env, capture_output=True, text=True)


def test_env_flag_selects_backend():
    out = _backend_in_subprocess("numpy")
    assert out.returncode == 0 and out.stdout.strip() == "numpy"
    out = _backend_in_subprocess("NumBa")
    assert out.returncode == 0 and out.stdout.strip() in ("numba", "numpy")
    out = _backend_in_subprocess("fortran")
    assert out.returncode != 0 and "ALLMACH_BACKEND" in out.stderr
