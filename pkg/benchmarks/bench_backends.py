"""Compare the numba and numpy backends on the interface-flux kernel and a full RHS.

Usage: python benchmarks/bench_backends.py [--cells N] [--repeat R]

Both backends are timed in the same process by passing ``backend=`` explicitly,
so the ALLMACH_BACKEND flag does not matter here. The first numba call is
excluded from timing (JIT compilation, or cache load).
"""
import argparse
import time

import numpy as np

from allmach import kernels
from allmach.eos import IDEAL_AIR
from allmach.experiments import setup_gresho, setup_sound_wave
from allmach.fluxes import FluxKind
from allmach.solver import Reconstruction, compute_rhs


def _best(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def random_pairs(n, seed=0):
    rng = np.random.default_rng(seed)

    def side():
        return np.column_stack([rng.uniform(0.1, 10, n), rng.uniform(-3, 3, n),
                                rng.uniform(-3, 3, n), rng.uniform(0.1, 10, n)])

    return side(), side()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if kernels.numba_interface_flux is None:
        raise SystemExit("numba is not installed; nothing to compare")

    wl, wr = random_pairs(args.cells)
    print(f"interface flux, {args.cells} pairs (best of {args.repeat})")
    print(f"{'kind':10s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speed-up':>9s}")
    for kind in FluxKind:
        t_np = _best(lambda: kernels.interface_flux(wl, wr, kind, 0.0, IDEAL_AIR, backend="numpy"), args.repeat)
        t_nb = _best(lambda: kernels.interface_flux(wl, wr, kind, 0.0, IDEAL_AIR, backend="numba"), args.repeat)
        print(f"{kind.label:10s} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {t_np / t_nb:9.1f}")

    cases = [
        ("sound wave 10000x1, constant", setup_sound_wave(10_000), Reconstruction.CONSTANT),
        ("Gresho 128x128, constant", setup_gresho(128, 128, 0.1), Reconstruction.CONSTANT),
        ("Gresho 128x128, limited linear", setup_gresho(128, 128, 0.1), Reconstruction.LIMITED_LINEAR),
    ]
    print(f"\nfull right-hand side, ES-LM (best of {args.repeat})")
    print(f"{'case':32s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speed-up':>9s}")
    for name, field, scheme in cases:
        t_np = _best(lambda: compute_rhs(field, FluxKind.ES_LM, scheme, backend="numpy"), args.repeat)
        t_nb = _best(lambda: compute_rhs(field, FluxKind.ES_LM, scheme, backend="numba"), args.repeat)
        print(f"{name:32s} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {t_np / t_nb:9.1f}")


if __name__ == "__main__":
    main()
