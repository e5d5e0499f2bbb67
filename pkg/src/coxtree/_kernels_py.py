"""Pure-numpy implementations of the batched matrix kernels.

Matrices live over Z[theta] (or its reduction mod p) and are stored as
integer arrays of shape (..., n, n, d) holding the coefficients of
1, theta, ..., theta^(d-1).  ``red`` is the (2d-1, d) table expressing
theta^e in that basis.
"""

from __future__ import annotations

import numpy as np

_SAFE = 2**62


def _poly_matmul(X: np.ndarray, Y: np.ndarray, red: np.ndarray, p: int) -> np.ndarray:
    d = X.shape[-1]
    if d == 1:
        out = np.matmul(X[..., 0], Y[..., 0])
        if red[0, 0] != 1:
            out = out * red[0, 0]
        out = out[..., None]
    else:
        shape = np.broadcast_shapes(X.shape[:-3], Y.shape[:-3]) + (X.shape[-3], Y.shape[-2], 2 * d - 1)
        P = np.zeros(shape, dtype=np.result_type(X, Y))
        for a in range(d):
            for b in range(d):
                P[..., a + b] += np.matmul(X[..., a], Y[..., b])
        out = np.matmul(P, red.astype(P.dtype))
    if p:
        out %= p
    return out


def _check_bound(X: np.ndarray, Y: np.ndarray, red: np.ndarray) -> None:
    n = X.shape[-2]
    d = X.shape[-1]
    mx = int(np.abs(X).max(initial=0))
    my = int(np.abs(Y).max(initial=0))
    mr = int(np.abs(red).sum(axis=0).max(initial=1))
    if mx * my * n * d * max(mr, 1) >= _SAFE:
        raise OverflowError("int64 product may overflow")


def polymat_mul(A: np.ndarray, B: np.ndarray, red: np.ndarray, p: int = 0) -> np.ndarray:
    """Batch right product A[k] @ B."""
    if not p:
        _check_bound(A, B, red)
    return _poly_matmul(A, B[None], red, p)


def polymat_lmul(B: np.ndarray, A: np.ndarray, red: np.ndarray, p: int = 0) -> np.ndarray:
    """Batch left product B @ A[k]."""
    if not p:
        _check_bound(A, B, red)
    return _poly_matmul(B[None], A, red, p)


def polymat_mul_object(A: np.ndarray, B: np.ndarray, red: np.ndarray, left: bool = False) -> np.ndarray:
    """Exact product with Python integers; used when int64 would overflow."""
    A = A.astype(object)
    B = B.astype(object)
    red = red.astype(object)
    if left:
        return _poly_matmul(B[None], A, red, 0)
    return _poly_matmul(A, B[None], red, 0)
