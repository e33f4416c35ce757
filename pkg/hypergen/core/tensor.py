import numpy as np

from ..errors import InputError, ShapeError

# working precision of every generated and trained tensor
DTYPE = np.float32


def as_matrix(x, what='input'):
    x = np.asarray(x)
    if x.ndim != 2:
        raise ShapeError(f"{what} must be a 2-D batch, got shape {x.shape}")
    return x


def check_finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} contains NaN or Inf")
    return arr


def numel(shape):
    count = 1
    for dim in shape:
        count *= int(dim)
    return count
