"""Pure NumPy fallback for the compiled stencil kernels."""

import numpy as np


def diff_lines(u, block, alpha, inv_h, out):
    """First-derivative SBP stencil applied along axis 1 of every line of u."""
    npts = u.shape[1]
    r, width = block.shape
    s = alpha.shape[0]
    lo, hi = r, npts - r
    if hi > lo:
        acc = alpha[0] * (u[:, lo + 1 : hi + 1] - u[:, lo - 1 : hi - 1])
        for v in range(1, s):
            acc = acc + alpha[v] * (u[:, lo + v + 1 : hi + v + 1] - u[:, lo - v - 1 : hi - v - 1])
        out[:, lo:hi] = acc * inv_h
    last = npts - 1
    for i in range(r):
        acc = block[i, 0] * u[:, 0]
        for c in range(1, width):
            acc = acc + block[i, c] * u[:, c]
        out[:, i] = acc * inv_h
        acc = block[i, 0] * u[:, last]
        for c in range(1, width):
            acc = acc + block[i, c] * u[:, last - c]
        out[:, last - i] = -(acc * inv_h)
