"""Random admissible states shared by the test modules."""
import numpy as np


def random_primitive(rng, n, rho=(0.1, 10.0), p=(0.1, 10.0), speed=3.0):
    """``n`` primitive states with density and pressure uniform in the given ranges and |v| <= speed."""
    mag = speed * np.sqrt(rng.uniform(0.0, 1.0, n))
    ang = rng.uniform(0.0, 2.0 * np.pi, n)
    return np.column_stack([rng.uniform(*rho, n), mag * np.cos(ang), mag * np.sin(ang), rng.uniform(*p, n)])


def random_pairs(rng, n, **kw):
    return random_primitive(rng, n, **kw), random_primitive(rng, n, **kw)
