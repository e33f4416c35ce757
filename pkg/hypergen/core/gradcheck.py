import numpy as np

from ..errors import InputError


def finite_diff_grad(f, params, h=1e-6):
    """Central-difference gradient of a scalar function of a flat parameter vector.

    Evaluated in float64 whatever the dtype of ``params``.
    """
    if h <= 0:
        raise InputError(f"step h must be positive, got {h}")
    p = np.array(params, dtype=np.float64).ravel()
    grad = np.zeros_like(p)
    for i in range(p.size):
        saved = p[i]
        p[i] = saved + h
        f_plus = float(f(p.copy()))
        p[i] = saved - h
        f_minus = float(f(p.copy()))
        p[i] = saved
        grad[i] = (f_plus - f_minus) / (2 * h)
    return grad


def relative_error(analytic, numeric):
    analytic = np.asarray(analytic, dtype=np.float64).ravel()
    numeric = np.asarray(numeric, dtype=np.float64).ravel()
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / scale)
