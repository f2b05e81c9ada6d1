# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-vector kernels; same contract as ``_pykernels``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


cdef inline void _check(Py_ssize_t size, int n_qubits, int qubit, int width) except *:
    if size != (<Py_ssize_t>1 << n_qubits):
        raise ValueError(f"state of length {size} is not a {n_qubits}-qubit vector")
    if qubit < 0 or qubit > n_qubits - width:
        raise ValueError(f"qubit {qubit} (width {width}) out of range for {n_qubits} qubits")


def apply_1q(psi, int n_qubits, int qubit, u):
    src_arr = np.ascontiguousarray(psi, dtype=np.complex128).ravel()
    _check(src_arr.shape[0], n_qubits, qubit, 1)
    # interleaved (re, im) views keep the inner loop free of libm complex calls
    cdef const double[::1] src = src_arr.view(np.float64)
    cdef const double[::1] m = np.ascontiguousarray(u, dtype=np.complex128).ravel().view(np.float64)
    if m.shape[0] != 8:
        raise ValueError("u must be 2x2")
    out_arr = np.empty(src_arr.shape[0], dtype=np.complex128)
    cdef double[::1] out = out_arr.view(np.float64)
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n_qubits - 1 - qubit)
    cdef Py_ssize_t n = src_arr.shape[0]
    cdef Py_ssize_t hi, lo, i0, i1
    cdef double ar, ai, br, bi
    cdef double u00r = m[0], u00i = m[1], u01r = m[2], u01i = m[3]
    cdef double u10r = m[4], u10i = m[5], u11r = m[6], u11i = m[7]
    with nogil:
        hi = 0
        while hi < n:
            for lo in range(stride):
                i0 = 2 * (hi + lo)
                i1 = i0 + 2 * stride
                ar = src[i0]
                ai = src[i0 + 1]
                br = src[i1]
                bi = src[i1 + 1]
                out[i0] = u00r * ar - u00i * ai + u01r * br - u01i * bi
                out[i0 + 1] = u00r * ai + u00i * ar + u01r * bi + u01i * br
                out[i1] = u10r * ar - u10i * ai + u11r * br - u11i * bi
                out[i1 + 1] = u10r * ai + u10i * ar + u11r * bi + u11i * br
            hi += 2 * stride
    return out_arr


def apply_3q(psi, int n_qubits, int first, u):
    src_arr = np.ascontiguousarray(psi, dtype=np.complex128).ravel()
    _check(src_arr.shape[0], n_qubits, first, 3)
    cdef const double[::1] src = src_arr.view(np.float64)
    cdef const double[::1] m = np.ascontiguousarray(u, dtype=np.complex128).ravel().view(np.float64)
    if m.shape[0] != 128:
        raise ValueError("u must be 8x8")
    out_arr = np.empty(src_arr.shape[0], dtype=np.complex128)
    cdef double[::1] out = out_arr.view(np.float64)
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n_qubits - 3 - first)
    cdef Py_ssize_t n = src_arr.shape[0]
    cdef Py_ssize_t hi, lo, base, k
    cdef int r, c
    cdef double re[8]
    cdef double im[8]
    cdef double accr, acci, mr, mi
    with nogil:
        hi = 0
        while hi < n:
            for lo in range(stride):
                base = hi + lo
                for c in range(8):
                    k = 2 * (base + c * stride)
                    re[c] = src[k]
                    im[c] = src[k + 1]
                for r in range(8):
                    accr = 0.0
                    acci = 0.0
                    for c in range(8):
                        mr = m[16 * r + 2 * c]
                        mi = m[16 * r + 2 * c + 1]
                        accr = accr + mr * re[c] - mi * im[c]
                        acci = acci + mr * im[c] + mi * re[c]
                    k = 2 * (base + r * stride)
                    out[k] = accr
                    out[k + 1] = acci
            hi += 8 * stride
    return out_arr


def prob_one(psi, int n_qubits, int qubit):
    cdef const cplx[::1] src = np.ascontiguousarray(psi, dtype=np.complex128).ravel()
    _check(src.shape[0], n_qubits, qubit, 1)
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n_qubits - 1 - qubit)
    cdef Py_ssize_t n = src.shape[0]
    cdef Py_ssize_t hi, lo
    cdef double total = 0.0
    cdef cplx a
    with nogil:
        hi = stride
        while hi < n:
            for lo in range(stride):
                a = src[hi + lo]
                total += a.real * a.real + a.imag * a.imag
            hi += 2 * stride
    return total


def project(psi, int n_qubits, int qubit, int bit):
    if bit != 0 and bit != 1:
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    out_arr = np.array(psi, dtype=np.complex128).ravel()
    cdef cplx[::1] out = out_arr
    _check(out.shape[0], n_qubits, qubit, 1)
    cdef Py_ssize_t stride = (<Py_ssize_t>1) << (n_qubits - 1 - qubit)
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t hi, lo
    with nogil:
        hi = stride if bit == 0 else 0
        while hi < n:
            for lo in range(stride):
                out[hi + lo] = 0
            hi += 2 * stride
    return out_arr
