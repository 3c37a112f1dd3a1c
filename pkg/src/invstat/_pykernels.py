"""Pure numpy kernels; the reference the compiled kernels are tested against.

Symmetric arrays are filled from their sorted multi-index so that index
permutations agree bit-for-bit.
"""
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _sorted_index(d: int, k: int) -> tuple[np.ndarray, ...]:
    grids = np.indices((d,) * k).reshape(k, -1)
    s = np.sort(grids, axis=0)
    return tuple(s[i].reshape((d,) * k) for i in range(k))


def symmetrize_fill(t: np.ndarray) -> np.ndarray:
    """Copy each sorted-index entry of ``t`` to all its permutations."""
    return t[_sorted_index(t.shape[0], t.ndim)]


def pair_traces(ms: np.ndarray) -> np.ndarray:
    """``P[a, b] = tr(M_a M_b)`` for a stack ``ms`` of shape ``(d, n, n)``."""
    p = np.einsum("aij,bji->ab", ms, ms)
    return symmetrize_fill(p)


def cubic_components(ms: np.ndarray, a: float, b: float, c: float, w2: float) -> np.ndarray:
    """Components of ``a*tr(XYZ) + b*w2*(sym. tr*tr) + c*trX trY trZ`` on ``ms``."""
    t = np.einsum("aii->a", ms)
    p = np.einsum("aij,bji->ab", ms, ms)
    q = np.einsum("aij,bjk,cki->abc", ms, ms, ms, optimize=True)
    out = a * q
    if b != 0.0:
        out = out + b * w2 * (
            t[:, None, None] * p[None, :, :]
            + t[None, :, None] * p[:, None, :]
            + t[None, None, :] * p[:, :, None]
        )
    if c != 0.0:
        out = out + c * (t[:, None, None] * t[None, :, None] * t[None, None, :])
    return symmetrize_fill(out)


def score_moments(x: np.ndarray, amats: np.ndarray, offsets: np.ndarray) -> tuple[int, float, float]:
    """Count, mean and centred sum of squares of ``prod_j (x^T A_j x / 2 - off_j)``."""
    quad = 0.5 * np.einsum("si,jik,sk->js", x, amats, x)
    vals = np.prod(quad - offsets[:, None], axis=0)
    m = vals.size
    if m == 0:
        return 0, 0.0, 0.0
    mean = float(vals.mean())
    m2 = float(np.sum((vals - mean) ** 2))
    return m, mean, m2
