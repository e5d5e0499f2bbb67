"""Backend selection for the batched matrix kernels.

The compiled extension ``coxtree._core`` is used when importable; set
``COXTREE_PURE=1`` to force the numpy fallback.  Both expose
``polymat_mul`` / ``polymat_lmul`` with identical semantics.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("COXTREE_PURE"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _kernels_py
        BACKEND = "python"

_INT64_LIMIT = 2**62


def use_backend(name: str) -> None:
    """Switch backend at runtime ("compiled" or "python"); used by the benchmark."""
    global _impl, BACKEND
    if name == "python":
        _impl, BACKEND = _kernels_py, "python"
    elif name == "compiled":
        from . import _core  # type: ignore[attr-defined]

        _impl, BACKEND = _core, "compiled"
    else:
        raise ValueError(name)


def canonical(arr: np.ndarray) -> np.ndarray:
    """Return int64 storage whenever every entry fits, else object storage."""
    if arr.dtype == np.int64:
        return arr
    if arr.size == 0:
        return arr.astype(np.int64)
    big = max(int(np.max(arr)), -int(np.min(arr)))
    if big < _INT64_LIMIT:
        return arr.astype(np.int64)
    return arr.astype(object)


def matmul(A: np.ndarray, B: np.ndarray, red: np.ndarray, red64: np.ndarray | None = None,
           p: int = 0, left: bool = False) -> np.ndarray:
    """Exact batched product over Z[theta] (p = 0) or its reduction mod p.

    ``A`` has shape (N, n, n, d) and ``B`` shape (n, n, d).  Computes
    ``A[k] @ B`` (or ``B @ A[k]`` when ``left``).  Exact products that would
    overflow int64 are redone with Python integers.
    """
    if red64 is None:
        red64 = red.astype(np.int64)
    if A.dtype == np.int64 and B.dtype == np.int64:
        # below degree 3 numpy's matmul is as fast as the compiled loop (see benchmarks/)
        impl = _kernels_py if A.shape[-1] <= 2 else _impl
        try:
            if left:
                return impl.polymat_lmul(B, A, red64, p)
            return impl.polymat_mul(A, B, red64, p)
        except OverflowError:
            if p:
                raise
    out = _kernels_py.polymat_mul_object(A, B, red, left=left)
    if p:
        out %= p
    return canonical(out)
