"""NumPy implementations of the single-mode kernels.

Same contract as the compiled ``_ckernels`` module.
"""
import numpy as np


def apply_mode(x, ops, left, right):
    op = np.asarray(ops, dtype=np.complex128)
    arr = np.asarray(x, dtype=np.complex128)
    ncol = 1 if arr.ndim == 1 else arr.shape[1]
    d_out, d_in = op.shape
    out = np.matmul(op, arr.reshape(left, d_in, right * ncol))
    if arr.ndim == 1:
        return out.reshape(left * d_out * right)
    return out.reshape(left * d_out * right, ncol)


def sandwich(rho, ops, left, right):
    kraus = np.asarray(ops, dtype=np.complex128)
    r = np.asarray(rho, dtype=np.complex128)
    dim_in = left * kraus.shape[2] * right
    if r.shape != (dim_in, dim_in):
        raise ValueError("density matrix does not match mode layout")
    dim_out = left * kraus.shape[1] * right
    out = np.zeros((dim_out, dim_out), dtype=np.complex128)
    for k in kraus:
        half = apply_mode(r, k, left, right)
        out += apply_mode(half.conj().T, k, left, right).conj().T
    return out
