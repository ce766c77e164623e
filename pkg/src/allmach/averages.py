"""Interface averages used by the entropy-conservative flux."""
import numpy as np

from .errors import NonPositiveInput

# below this value of u = ((a-b)/(a+b))^2 the log mean is evaluated by series
LOGMEAN_SERIES_CUTOFF = 1e-2


def arithmetic_mean(a, b):
    return 0.5 * (a + b)


def _logmean_series(u):
    # f / artanh(f) = 1 / (1 + u/3 + u^2/5 + ...), truncated past double precision for u < 1e-2
    return 1.0 / (1.0 + u * (1 / 3 + u * (1 / 5 + u * (1 / 7 + u * (1 / 9 + u * (1 / 11 + u * (1 / 13 + u / 15)))))))


def logarithmic_mean(a, b):
    """Logarithmic mean ``(a - b) / (ln a - ln b)`` without the removable singularity at a == b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(~(a > 0.0)) or np.any(~(b > 0.0)):
        raise NonPositiveInput("logarithmic mean needs strictly positive arguments")
    f = (a - b) / (a + b)
    u = f * f
    series = u < LOGMEAN_SERIES_CUTOFF
    # ln(a/b) stays well conditioned for widely separated arguments, unlike artanh(f) near f = 1
    # ordered arguments keep the result exactly symmetric
    hi, lo = np.maximum(a, b), np.minimum(a, b)
    zeta = np.where(series, 2.0, hi / lo)
    exact = (hi - lo) / np.log(zeta)
    out = np.where(series, 0.5 * (a + b) * _logmean_series(u), exact)
    return out[()] if out.ndim == 0 else out


def beta(w):
    """``rho / (2 p)`` for primitive states."""
    w = np.asarray(w, dtype=float)
    return w[..., 0] / (2.0 * w[..., 3])


def average_pressure(left, right):
    """``rho_bar / (2 beta_bar)``: the temperature-harmonic pressure average."""
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    rho_bar = arithmetic_mean(left[..., 0], right[..., 0])
    beta_bar = arithmetic_mean(beta(left), beta(right))
    return rho_bar / (2.0 * beta_bar)
