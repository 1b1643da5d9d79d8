"""Numpy fallback for the stencil kernel.

Operation order mirrors the compiled version exactly so results are
bit-identical between backends.
"""
import numpy as np


def apply_passes(values: np.ndarray, nus: np.ndarray) -> np.ndarray:
    """Run one explicit stencil pass per entry of ``nus``.

    Interior nodes update as v[i] + nu * (v[i+1] - 2 v[i] + v[i-1]);
    the two edge nodes keep their incoming values.
    """
    if values.shape[0] < 3:
        raise ValueError("stencil needs at least 3 nodes")
    a = np.array(values, dtype=np.float64)
    b = np.empty_like(a)
    for nu in nus:
        b[0] = a[0]
        b[-1] = a[-1]
        lap = (a[2:] - 2.0 * a[1:-1]) + a[:-2]
        b[1:-1] = a[1:-1] + nu * lap
        a, b = b, a
    return a
