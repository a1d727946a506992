"""Exact rational primitives: Bernoulli numbers, centered-difference
coefficients, sums of powers, and a small dense rational solver.

All values are :class:`fractions.Fraction`, so arithmetic is exact and
overflow cannot occur.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

from sbpquad.errors import ShapeError, SingularSystemError

MAX_BERNOULLI = 64
MAX_HALF_WIDTH = 8


@lru_cache(maxsize=None)
def _bernoulli_table(m: int) -> tuple[Fraction, ...]:
    # sum_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1 gives the B_1 = -1/2 convention
    table = [Fraction(1)]
    for j in range(1, m + 1):
        acc = sum(comb(j + 1, k) * table[k] for k in range(j))
        table.append(-acc / (j + 1))
    return tuple(table)


def bernoulli(j: int) -> Fraction:
    """Return the j-th Bernoulli number with the convention B_1 = -1/2."""
    if j < 0:
        raise ValueError(f"Bernoulli index must be non-negative, got {j}")
    if j > MAX_BERNOULLI:
        raise ValueError(f"Bernoulli index {j} exceeds maximum {MAX_BERNOULLI}")
    return _bernoulli_table(MAX_BERNOULLI)[j]


@dataclass(frozen=True)
class CentralStencil:
    """Coefficients alpha_1..alpha_s of the 2s-order centered first derivative

        u'(x_w) ~ sum_v alpha_v (u_{w+v} - u_{w-v}) / h
    """

    s: int
    alpha: tuple[Fraction, ...]

    def lemma_residuals(self) -> list[Fraction]:
        """Residuals of sum_v alpha_v v^(2j+1) = [1/2, 0, ..., 0], j = 0..s-1."""
        out = []
        for j in range(self.s):
            target = Fraction(1, 2) if j == 0 else Fraction(0)
            total = sum(a * v ** (2 * j + 1) for v, a in enumerate(self.alpha, start=1))
            out.append(total - target)
        return out


@lru_cache(maxsize=None)
def central_coefficients(s: int) -> CentralStencil:
    if s < 1:
        raise ValueError(f"stencil half-width must be positive, got {s}")
    if s > MAX_HALF_WIDTH:
        raise ValueError(f"stencil half-width {s} exceeds maximum {MAX_HALF_WIDTH}")
    fs2 = factorial(s) ** 2
    alpha = tuple(
        Fraction((-1) ** (v + 1) * fs2, v * factorial(s + v) * factorial(s - v))
        for v in range(1, s + 1)
    )
    stencil = CentralStencil(s, alpha)
    if any(stencil.lemma_residuals()):
        raise AssertionError(f"centered coefficients for s={s} fail the moment identities")
    return stencil


def sum_of_powers(r: int, j: int) -> Fraction:
    """Return j * sum_{v=0}^{r-1} (r - v)^(j-1).

    Evaluated by direct summation and by the Bernoulli closed form
    r^j + sum_{k=1}^{j-1} (-1)^k C(j,k) B_k r^(j-k); the two must agree.
    """
    if r < 1 or j < 1:
        raise ValueError(f"sum_of_powers needs r >= 1 and j >= 1, got r={r}, j={j}")
    direct = Fraction(j * sum((r - v) ** (j - 1) for v in range(r)))
    closed = Fraction(r**j) + sum(
        (-1) ** k * comb(j, k) * bernoulli(k) * r ** (j - k) for k in range(1, j)
    )
    if direct != closed:
        raise AssertionError(f"sum of powers mismatch at r={r}, j={j}: {direct} != {closed}")
    return direct


# -- dense rational linear algebra ------------------------------------------

Matrix = list[list[Fraction]]


def rref(a: Sequence[Sequence[Fraction]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns, in exact arithmetic."""
    m = [[Fraction(x) for x in row] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    pr = 0
    for c in range(cols):
        p = next((i for i in range(pr, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[pr], m[p] = m[p], m[pr]
        piv = m[pr][c]
        m[pr] = [x / piv for x in m[pr]]
        for i in range(rows):
            if i != pr and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[pr])]
        pivots.append(c)
        pr += 1
        if pr == rows:
            break
    return m, pivots


def solve_consistent(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Return one exact solution of a x = b (free variables set to zero).

    Raises SingularSystemError when the system is inconsistent.
    """
    if len(a) != len(b):
        raise ShapeError(f"matrix has {len(a)} rows but rhs has {len(b)} entries")
    if not a:
        return []
    ncol = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    m, pivots = rref(aug)
    if ncol in pivots:
        raise SingularSystemError("linear system is inconsistent")
    x = [Fraction(0)] * ncol
    for i, c in enumerate(pivots):
        x[c] = m[i][ncol]
    return x


def solve_square(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    n = len(a)
    if any(len(row) != n for row in a):
        raise ShapeError("solve_square needs a square matrix")
    _, pivots = rref(a)
    if len(pivots) < n:
        raise SingularSystemError("square system is singular")
    return solve_consistent(a, b)


def min_norm_solution(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Exact minimum-Euclidean-norm solution of a consistent system a x = b.

    Uses x = a^T y with (a a^T) y = b, which lies in the row space of a.
    """
    if not a:
        return []
    ncol = len(a[0])
    gram = [[sum(x * y for x, y in zip(ri, rj)) for rj in a] for ri in a]
    y = solve_consistent(gram, b)
    x = [sum(a[i][c] * y[i] for i in range(len(a))) for c in range(ncol)]
    if any(sum(ai * xi for ai, xi in zip(row, x)) != bi for row, bi in zip(a, b)):
        raise SingularSystemError("linear system is inconsistent")
    return x
