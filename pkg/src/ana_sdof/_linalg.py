"""Small numerical linear algebra helpers shared across modules."""

from __future__ import annotations

import numpy as np

DEFAULT_RANK_TOL = 1e-10


def numeric_rank(a, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above ``tol * sigma_max * max(a.shape)``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol * s[0] * max(a.shape)))


def block_diag(blocks, shape=None) -> np.ndarray:
    """Block-diagonal stacking that also accepts an empty block list.

    ``shape`` gives the (rows, cols) of a single block and is only needed to
    size the result when ``blocks`` is empty.
    """
    blocks = [np.atleast_2d(np.asarray(b)) for b in blocks]
    if not blocks:
        return np.zeros((0, 0), dtype=complex)
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    dtype = np.result_type(*blocks)
    out = np.zeros((rows, cols), dtype=dtype)
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def logdet_factor_bits(factor, scale: float) -> float:
    """``log2 det(I + scale * F F^H)`` evaluated from the singular values of ``F``.

    Working from singular values keeps the result accurate when the
    covariance spans many orders of magnitude, which a Cholesky of the
    assembled covariance does not.
    """
    factor = np.asarray(factor)
    if factor.size == 0:
        return 0.0
    s = np.linalg.svd(factor, compute_uv=False)
    return float(np.sum(np.log1p(scale * s * s)) / np.log(2.0))
