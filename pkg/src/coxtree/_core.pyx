# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched matrix products over Z[theta] and Z[theta]/p.

Same contract as ``_kernels_py``: exact products raise OverflowError
instead of wrapping, so callers can promote to Python integers.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

cdef extern from *:
    bint __builtin_mul_overflow(long long a, long long b, long long *res) nogil
    bint __builtin_add_overflow(long long a, long long b, long long *res) nogil


cdef void _fast(const int64_t *P, const int64_t *Q, const int64_t *R, Py_ssize_t n, Py_ssize_t d,
                Py_ssize_t N, bint left, int64_t p, int64_t *acc, int64_t *O) noexcept nogil:
    # batch-last layout: P, O are (n, n, d, N); Q is one (n, n, d) matrix.
    # left: O[..., k] = Q @ P[..., k]; otherwise O[..., k] = P[..., k] @ Q.
    # No overflow is possible here (checked by the caller).
    cdef Py_ssize_t i, j, l, a, b, c, e, k, D = 2 * d - 1
    cdef int64_t q
    cdef int64_t *dst
    cdef const int64_t *src
    for i in range(n):
        for j in range(n):
            for k in range(D * N):
                acc[k] = 0
            for l in range(n):
                for a in range(d):
                    for b in range(d):
                        if left:
                            q = Q[(i * n + l) * d + a]
                            src = P + ((l * n + j) * d + b) * N
                        else:
                            q = Q[(l * n + j) * d + b]
                            src = P + ((i * n + l) * d + a) * N
                        if q == 0:
                            continue
                        dst = acc + (a + b) * N
                        for k in range(N):
                            dst[k] += q * src[k]
            for c in range(d):
                dst = O + ((i * n + j) * d + c) * N
                for k in range(N):
                    dst[k] = 0
                for e in range(D):
                    q = R[e * d + c]
                    if q == 0:
                        continue
                    src = acc + e * N
                    for k in range(N):
                        dst[k] += q * src[k]
                if p:
                    for k in range(N):
                        dst[k] = dst[k] % p
                        if dst[k] < 0:
                            dst[k] += p


cdef int _checked(const int64_t *P, const int64_t *Q, const int64_t *R, Py_ssize_t n, Py_ssize_t d,
                  int64_t *O) noexcept nogil:
    # exact product with overflow detection; returns 1 on overflow
    cdef Py_ssize_t i, j, l, a, b, c, e, D = 2 * d - 1
    cdef long long acc[64]
    cdef long long t, u, x
    cdef const int64_t *row
    cdef const int64_t *col
    for i in range(n):
        for j in range(n):
            for e in range(D):
                acc[e] = 0
            for l in range(n):
                row = P + (i * n + l) * d
                col = Q + (l * n + j) * d
                for a in range(d):
                    x = row[a]
                    if x == 0:
                        continue
                    for b in range(d):
                        if __builtin_mul_overflow(x, col[b], &t):
                            return 1
                        if __builtin_add_overflow(acc[a + b], t, &acc[a + b]):
                            return 1
            for c in range(d):
                u = 0
                for e in range(D):
                    if __builtin_mul_overflow(acc[e], R[e * d + c], &t):
                        return 1
                    if __builtin_add_overflow(u, t, &u):
                        return 1
                O[(i * n + j) * d + c] = u
    return 0


cdef int _product(const int64_t[:, :, :, ::1] X, const int64_t[:, :, ::1] Y,
                  const int64_t[:, ::1] red, bint left, int64_t[:, :, :, ::1] out) noexcept nogil:
    # exact product with overflow detection; left: out[k] = Y @ X[k], else X[k] @ Y
    cdef Py_ssize_t N = X.shape[0], n = X.shape[1], d = X.shape[3], k
    cdef Py_ssize_t step = n * n * d
    cdef const int64_t *x0
    cdef const int64_t *y0 = &Y[0, 0, 0]
    cdef const int64_t *R = &red[0, 0]
    cdef int64_t *o0
    if N == 0:
        return 0
    x0 = &X[0, 0, 0, 0]
    o0 = &out[0, 0, 0, 0]
    for k in range(N):
        if left:
            if _checked(y0, x0 + k * step, R, n, d, o0 + k * step):
                return 1
        elif _checked(x0 + k * step, y0, R, n, d, o0 + k * step):
            return 1
    return 0


def _run(X, Y, red, long long p, bint left):
    X = np.ascontiguousarray(X, dtype=np.int64)
    Y = np.ascontiguousarray(Y, dtype=np.int64)
    red = np.ascontiguousarray(red, dtype=np.int64)
    cdef Py_ssize_t N = X.shape[0], n = X.shape[1], d = X.shape[3]
    if d > 32:
        raise ValueError("field degree above 32 is not supported by the compiled kernel")
    if p:
        # reduce in case a caller passed raw entries
        X = X % p
        Y = Y % p
        red = red % p
    mx = int(np.abs(X).max(initial=0))
    my = int(np.abs(Y).max(initial=0))
    mr = int(np.abs(red).max(initial=0))
    # bound on every partial sum before the final reduction
    cdef bint safe = mx * my * n * d * mr * (2 * d - 1) < 2**62
    if p and not safe:
        raise ValueError("prime too large for the compiled kernel")
    cdef int rc = 0
    cdef const int64_t[:, :, :, ::1] xv
    cdef const int64_t[:, :, ::1] yv = Y
    cdef const int64_t[:, ::1] rv = red
    cdef int64_t[:, :, :, ::1] ov
    cdef int64_t[:, ::1] accv
    if safe:
        if N == 0:
            return np.empty_like(X)
        xt = np.ascontiguousarray(np.moveaxis(X, 0, -1))
        ot = np.empty_like(xt)
        acc = np.empty((2 * d - 1, N), dtype=np.int64)
        xv, ov, accv = xt, ot, acc
        with nogil:
            _fast(&xv[0, 0, 0, 0], &yv[0, 0, 0], &rv[0, 0], n, d, N, left, p, &accv[0, 0], &ov[0, 0, 0, 0])
        return np.ascontiguousarray(np.moveaxis(ot, -1, 0))
    out = np.empty_like(X)
    xv, ov = X, out
    with nogil:
        rc = _product(xv, yv, rv, left, ov)
    if rc:
        raise OverflowError("int64 product overflowed")
    return out


def polymat_mul(A, B, red, p=0):
    """Batch right product A[k] @ B."""
    return _run(A, B, red, p, False)


def polymat_lmul(B, A, red, p=0):
    """Batch left product B @ A[k]."""
    return _run(A, B, red, p, True)
