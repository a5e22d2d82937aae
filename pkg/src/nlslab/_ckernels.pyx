# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled single-mode kernels.

Both functions act on one tensor factor of a row-major multimode array.
``left`` is the product of the dimensions of the modes before the acted-on
mode and ``right`` the product of those after it. Zero operator entries are
skipped, which matters because loss Kraus operators are shifted diagonals.

Every update is a row axpy over a contiguous row. Real operators (all the
filters and loss operators) run on the float64 view of the data, so the
inner loop is a plain real axpy the compiler can vectorise.
"""
import numpy as np

ctypedef double complex cplx


cdef void _rows_real(double[:, ::1] dst, const double[:, ::1] src, const double[:, ::1] op,
                     Py_ssize_t left, Py_ssize_t right) noexcept nogil:
    cdef Py_ssize_t d_out = op.shape[0], d_in = op.shape[1], width = src.shape[1]
    cdef Py_ssize_t i, m, n, j, c, ro, ri
    cdef double a
    for m in range(d_out):
        for n in range(d_in):
            a = op[m, n]
            if a == 0.0:
                continue
            for i in range(left):
                for j in range(right):
                    ro = (i * d_out + m) * right + j
                    ri = (i * d_in + n) * right + j
                    for c in range(width):
                        dst[ro, c] += a * src[ri, c]


cdef void _rows_complex(cplx[:, ::1] dst, const cplx[:, ::1] src, const cplx[:, ::1] op,
                        Py_ssize_t left, Py_ssize_t right) noexcept nogil:
    cdef Py_ssize_t d_out = op.shape[0], d_in = op.shape[1], width = src.shape[1]
    cdef Py_ssize_t i, m, n, j, c, ro, ri
    cdef cplx a
    for m in range(d_out):
        for n in range(d_in):
            a = op[m, n]
            if a.real == 0.0 and a.imag == 0.0:
                continue
            for i in range(left):
                for j in range(right):
                    ro = (i * d_out + m) * right + j
                    ri = (i * d_in + n) * right + j
                    for c in range(width):
                        dst[ro, c] = dst[ro, c] + a * src[ri, c]


def _rows(dst, src, op, Py_ssize_t left, Py_ssize_t right):
    """``dst += op`` applied to the row index of ``src`` (both complex, C order)."""
    if not np.iscomplexobj(op) or not op.imag.any():
        _rows_real(dst.view(np.float64), src.view(np.float64),
                   np.ascontiguousarray(op.real, dtype=np.float64), left, right)
    else:
        _rows_complex(dst, src, np.ascontiguousarray(op, dtype=np.complex128), left, right)


def apply_mode(x, ops, Py_ssize_t left, Py_ssize_t right):
    """Return ``op @ x`` on one mode; ``x`` is a vector or a row-stacked matrix."""
    op = np.ascontiguousarray(ops, dtype=np.complex128)
    arr = np.ascontiguousarray(x, dtype=np.complex128)
    ncol = 1 if arr.ndim == 1 else arr.shape[1]
    d_out, d_in = op.shape
    src = arr.reshape(left * d_in * right, ncol)
    out = np.zeros((left * d_out * right, ncol), dtype=np.complex128)
    _rows(out, src, op, left, right)
    if arr.ndim == 1:
        return out.reshape(-1)
    return out


def sandwich(rho, ops, Py_ssize_t left, Py_ssize_t right):
    """Return ``sum_k K_k rho K_k^dagger`` with every ``K_k`` acting on one mode.

    ``ops`` has shape ``(n_ops, d_out, d_in)``. Uses
    ``(K rho K^dagger)^T = conj(K) (K rho)^T`` so both passes are row passes.
    """
    K = np.ascontiguousarray(ops, dtype=np.complex128)
    r = np.ascontiguousarray(rho, dtype=np.complex128)
    n_ops, d_out, d_in = K.shape
    dim_in = left * d_in * right
    dim_out = left * d_out * right
    if r.shape[0] != dim_in or r.shape[1] != dim_in:
        raise ValueError("density matrix does not match mode layout")
    acc = np.zeros((dim_out, dim_out), dtype=np.complex128)
    tmp = np.empty((dim_out, dim_in), dtype=np.complex128)
    for k in range(n_ops):
        if not K[k].any():
            continue
        tmp[...] = 0.0
        _rows(tmp, r, K[k], left, right)
        _rows(acc, np.ascontiguousarray(tmp.T), K[k].conj(), left, right)
    return np.ascontiguousarray(acc.T)
