"""Input checks shared by the estimator and the functional API."""

import numpy as np

from .linalg import ShapeError, as_complex_matrix


def check_channels(h_t, h_r):
    """Validate a ``(H_t, H_r)`` pair and return them as complex arrays.

    ``H_t`` is ``N x N_t`` and ``H_r`` is ``N_r x N``; the surface size ``N``
    must agree.
    """
    h_t = as_complex_matrix(h_t, "H_t")
    h_r = as_complex_matrix(h_r, "H_r")
    if h_t.shape[0] != h_r.shape[1]:
        raise ShapeError(
            f"surface size mismatch: H_t has {h_t.shape[0]} rows, H_r has {h_r.shape[1]} columns"
        )
    return h_t, h_r


def check_active_set(active_set, n):
    """Sorted tuple of distinct active indices within ``[0, n)``."""
    if active_set is None:
        return ()
    idx = np.asarray(list(active_set))
    if idx.size and not np.issubdtype(idx.dtype, np.integer):
        raise TypeError(f"active_set must contain integers, got {list(active_set)}")
    out = tuple(sorted(int(i) for i in idx))
    if len(set(out)) != len(out):
        raise ValueError(f"active_set has duplicate indices: {list(active_set)}")
    if out and (out[0] < 0 or out[-1] >= n):
        raise ValueError(f"active_set indices must lie in [0, {n}), got {list(out)}")
    return out
