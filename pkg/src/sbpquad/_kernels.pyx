# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil kernels. Must match sbpquad._kernels_py operation for operation."""

cimport cython


def diff_lines(const double[:, :] u, const double[:, ::1] block,
               const double[::1] alpha, double inv_h, double[:, :] out):
    """First-derivative SBP stencil applied along axis 1 of every line of u."""
    cdef Py_ssize_t nlines = u.shape[0]
    cdef Py_ssize_t npts = u.shape[1]
    cdef Py_ssize_t r = block.shape[0]
    cdef Py_ssize_t width = block.shape[1]
    cdef Py_ssize_t s = alpha.shape[0]
    cdef Py_ssize_t m, i, c, v, last = npts - 1
    cdef double acc
    for m in range(nlines):
        for i in range(r, npts - r):
            acc = alpha[0] * (u[m, i + 1] - u[m, i - 1])
            for v in range(1, s):
                acc = acc + alpha[v] * (u[m, i + v + 1] - u[m, i - v - 1])
            out[m, i] = acc * inv_h
        for i in range(r):
            acc = block[i, 0] * u[m, 0]
            for c in range(1, width):
                acc = acc + block[i, c] * u[m, c]
            out[m, i] = acc * inv_h
            acc = block[i, 0] * u[m, last]
            for c in range(1, width):
                acc = acc + block[i, c] * u[m, last - c]
            out[m, last - i] = -(acc * inv_h)
