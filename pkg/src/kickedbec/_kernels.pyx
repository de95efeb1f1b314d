# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled banded-convolution kernel (the hot loop of every kick).

Works on split real/imaginary planes so the inner loops are plain real
multiply-accumulates the compiler can vectorize, and specializes the taps:
the kick stencil (-i)^d J_d(K) alternates between purely real and purely
imaginary entries, which halves the arithmetic relative to a generic
complex convolution.
"""

import numpy as np


def convolve_banded(psi, kernel):
    """out[i] = sum_j kernel[half + i - j] * psi[j], truncated at the edges.

    kernel must have odd length 2*half + 1 and is indexed by offset d = i - j
    at position half + d. Contributions that would land outside the ladder
    are dropped (the caller checks norm conservation).
    """
    psi = np.asarray(psi, dtype=np.complex128)
    kernel = np.asarray(kernel, dtype=np.complex128)
    if psi.ndim != 1 or kernel.ndim != 1:
        raise ValueError("psi and kernel must be one-dimensional")
    if kernel.shape[0] % 2 != 1:
        raise ValueError("kernel length must be odd")
    cdef Py_ssize_t n = psi.shape[0]
    cdef Py_ssize_t m = kernel.shape[0]
    cdef Py_ssize_t half = (m - 1) // 2
    cdef const double[::1] pr = np.ascontiguousarray(psi.real)
    cdef const double[::1] pi = np.ascontiguousarray(psi.imag)
    cdef const double[::1] kr = np.ascontiguousarray(kernel.real)
    cdef const double[::1] ki = np.ascontiguousarray(kernel.imag)
    out_re = np.zeros(n)
    out_im = np.zeros(n)
    cdef double[::1] o_re = out_re
    cdef double[::1] o_im = out_im
    cdef Py_ssize_t k, j, d, jlo, jhi
    cdef double cr, ci
    for k in range(m):
        cr = kr[k]
        ci = ki[k]
        d = k - half
        jlo = 0 if d >= 0 else -d
        jhi = n if d <= 0 else n - d
        if ci == 0.0:
            if cr == 0.0:
                continue
            for j in range(jlo, jhi):
                o_re[j + d] += cr * pr[j]
                o_im[j + d] += cr * pi[j]
        elif cr == 0.0:
            for j in range(jlo, jhi):
                o_re[j + d] -= ci * pi[j]
                o_im[j + d] += ci * pr[j]
        else:
            for j in range(jlo, jhi):
                o_re[j + d] += cr * pr[j] - ci * pi[j]
                o_im[j + d] += cr * pi[j] + ci * pr[j]
    out = np.empty(n, dtype=np.complex128)
    out.real = out_re
    out.imag = out_im
    return out
