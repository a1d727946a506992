"""Catalog of first-derivative SBP operators on uniform grids.

Each operator is D = H^{-1} Q with H = h diag(sigma_0..sigma_{r-1}, 1, ..., 1,
sigma_{r-1}..sigma_0) for the diagonal families. Coefficients are stored as
exact rationals and converted to doubles once, at build time.

Families are named diag-tau-2s / full-tau-2s, with tau the boundary order and
2s the interior order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from sbpquad import kernels
from sbpquad.errors import GridSizeError, ShapeError, UnsupportedOperation
from sbpquad.exact import CentralStencil, central_coefficients

F = Fraction


class OperatorFamily(enum.Enum):
    DIAG12 = ("diag-1-2", 1, 1, 1)
    DIAG24 = ("diag-2-4", 2, 2, 4)
    DIAG36 = ("diag-3-6", 3, 3, 6)
    FULL34 = ("full-3-4", 2, 3, 4)

    def __init__(self, label: str, s: int, tau: int, r: int) -> None:
        self.label = label
        self.s = s
        self.tau = tau
        self.r = r

    @property
    def is_diagonal(self) -> bool:
        return self.label.startswith("diag")

    @property
    def order(self) -> int:
        return 2 * self.s

    @classmethod
    def parse(cls, name: "str | OperatorFamily") -> "OperatorFamily":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        for fam in cls:
            if key in (fam.label, fam.name.lower(), fam.label.replace("-", "")):
                return fam
        raise ValueError(f"unknown operator family {name!r}; choose from {[f.label for f in cls]}")

    def __str__(self) -> str:
        return self.label


# Boundary quadrature weights sigma_v. Diagonal families: sigma_v = lambda_v.
# full-3-4: row sums of the dense boundary block of H.
_SIGMA = {
    OperatorFamily.DIAG12: (F(1, 2),),
    OperatorFamily.DIAG24: (F(17, 48), F(59, 48), F(43, 48), F(49, 48)),
    OperatorFamily.DIAG36: (
        F(13649, 43200),
        F(12013, 8640),
        F(2711, 4320),
        F(5359, 4320),
        F(7877, 8640),
        F(43801, 43200),
    ),
    OperatorFamily.FULL34: (F(43, 144), F(67, 48), F(35, 48), F(155, 144)),
}

# Strictly upper-triangular entries q_ij (i < j < r) of the left Q closure.
# Q_00 = -1/2, the lower triangle follows by antisymmetry, and coupling into
# interior nodes comes from the centered stencil.
_Q_UPPER = {
    OperatorFamily.DIAG12: {},
    # classical diagonal 4-2 closure
    OperatorFamily.DIAG24: {
        (0, 1): F(59, 96), (0, 2): F(-1, 12), (0, 3): F(-1, 32),
        (1, 2): F(59, 96), (1, 3): F(0),
        (2, 3): F(59, 96),
    },
    OperatorFamily.DIAG36: None,  # one-parameter family, see diag36_upper
}


# Diagonal 6-3 closure. Accuracy and Q + Q^T = B leave one free
# parameter x1 = q_45; every other entry is c0 + c1*x1.
_DIAG36_AFFINE = {
    (0, 1): (F(-953, 16200), 1),
    (0, 2): (F(715489, 259200), -4),
    (0, 3): (F(-62639, 14400), 6),
    (0, 4): (F(147127, 51840), -4),
    (0, 5): (F(-89387, 129600), 1),
    (1, 2): (F(-57139, 8640), 10),
    (1, 3): (F(745733, 51840), -20),
    (1, 4): (F(-18343, 1728), 15),
    (1, 5): (F(240569, 86400), -4),
    (2, 3): (F(-176839, 12960), 20),
    (2, 4): (F(242111, 17280), -20),
    (2, 5): (F(-182261, 43200), 6),
    (3, 4): (F(-165041, 25920), 10),
    (3, 5): (F(710473, 259200), -4),
    (4, 5): (F(0), 1),
}
# x1 of a later optimized member (the default) and of the original closure.
DEFAULT_DIAG36_X1 = F(70127127127127, 10**14)
ORIGINAL_DIAG36_X1 = F(342523, 518400)


def diag36_upper(x1: Fraction = DEFAULT_DIAG36_X1) -> dict[tuple[int, int], Fraction]:
    return {ij: c0 + c1 * x1 for ij, (c0, c1) in _DIAG36_AFFINE.items()}


def _q_closure(family: OperatorFamily, x1: Fraction = DEFAULT_DIAG36_X1) -> tuple[tuple[Fraction, ...], ...]:
    r, s = family.r, family.s
    alpha = central_coefficients(s).alpha
    upper = diag36_upper(x1) if family is OperatorFamily.DIAG36 else _Q_UPPER[family]
    q = [[F(0)] * (r + s) for _ in range(r)]
    q[0][0] = F(-1, 2)
    for (i, j), val in upper.items():
        q[i][j] = val
        q[j][i] = -val
    for i in range(r):
        for j in range(r, r + s):
            k = j - i
            if 1 <= k <= s:
                q[i][j] = alpha[k - 1]
    return tuple(tuple(row) for row in q)


@dataclass(frozen=True)
class UniformGrid1D:
    """n + 1 evenly spaced nodes x_v = a + v h on [a, b]."""

    n: int
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GridSizeError(f"grid needs at least one interval, got n={self.n}")
        if not self.b > self.a:
            raise ValueError(f"interval must satisfy a < b, got [{self.a}, {self.b}]")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def nodes(self) -> np.ndarray:
        return self.a + self.h * np.arange(self.n + 1)


@dataclass(frozen=True)
class SbpOperator1D:
    """A concrete SBP first-derivative operator bound to a grid.

    ``boundary_block`` holds h*D for the first r rows (r x (r+s)); the right
    closure is its reflection with a sign flip. It is ``None`` for families
    that only provide quadrature weights.
    """

    family: OperatorFamily
    grid: UniformGrid1D
    alpha: CentralStencil
    sigma: tuple[Fraction, ...]
    boundary_block: tuple[tuple[Fraction, ...], ...] | None
    _block_f: np.ndarray | None = field(init=False, repr=False, compare=False)
    _alpha_f: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.grid.size < 2 * self.r:
            raise GridSizeError(
                f"{self.family} needs n + 1 >= {2 * self.r} nodes, got {self.grid.size}"
            )
        block = None
        if self.boundary_block is not None:
            block = np.array([[float(c) for c in row] for row in self.boundary_block])
        object.__setattr__(self, "_block_f", block)
        object.__setattr__(self, "_alpha_f", np.array([float(a) for a in self.alpha.alpha]))

    @property
    def r(self) -> int:
        return len(self.sigma)

    @property
    def s(self) -> int:
        return self.alpha.s

    @property
    def differentiable(self) -> bool:
        return self.boundary_block is not None

    @property
    def h_diag(self) -> tuple[Fraction, ...] | None:
        return self.sigma if self.family.is_diagonal else None

    def require_derivative(self) -> None:
        if not self.differentiable:
            raise UnsupportedOperation(f"{self.family} provides quadrature weights only")

    def diff_lines(self, u: np.ndarray) -> np.ndarray:
        """Differentiate every row of a 2-D array (or a view of one)."""
        self.require_derivative()
        if u.ndim != 2 or u.shape[1] != self.grid.size:
            raise ShapeError(f"expected lines of length {self.grid.size}, got shape {u.shape}")
        u = np.asarray(u, dtype=np.float64)
        return kernels.diff_lines(u, self._block_f, self._alpha_f, 1.0 / self.grid.h)


def build_operator(
    family: "OperatorFamily | str",
    grid: UniformGrid1D | int,
    *,
    diag36_x1: Fraction = DEFAULT_DIAG36_X1,
) -> SbpOperator1D:
    """Build a catalog operator on ``grid`` (an int n means [0, 1] with n intervals).

    ``diag36_x1`` selects the member of the one-parameter diag-3-6 family.
    """
    family = OperatorFamily.parse(family)
    if isinstance(grid, int):
        grid = UniformGrid1D(grid)
    sigma = _SIGMA[family]
    block = None
    if family in _Q_UPPER:
        q = _q_closure(family, Fraction(diag36_x1))
        block = tuple(tuple(c / sigma[i] for c in row) for i, row in enumerate(q))
    return SbpOperator1D(family, grid, central_coefficients(family.s), sigma, block)


def apply_D(op: SbpOperator1D, u: np.ndarray) -> np.ndarray:
    """Return D u for a grid function given by its nodal values."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (op.grid.size,):
        raise ShapeError(f"grid function has shape {u.shape}, operator grid has {op.grid.size} nodes")
    return op.diff_lines(u[None, :])[0]


def end_corrected_weights(sigma: Sequence, grid: UniformGrid1D) -> np.ndarray:
    """Nodal weights h*(sigma, 1, ..., 1, reversed sigma) of an end-corrected trapezoid rule."""
    r = len(sigma)
    if grid.size < 2 * r:
        raise GridSizeError(f"rule of width {r} needs n + 1 >= {2 * r} nodes, got {grid.size}")
    w = np.ones(grid.size)
    sig = np.array([float(x) for x in sigma])
    w[:r] = sig
    w[grid.size - r :] = sig[::-1]
    return grid.h * w


def quadrature_weights(op: SbpOperator1D) -> np.ndarray:
    return end_corrected_weights(op.sigma, op.grid)


# -- exact assembly and structural verification ------------------------------


def dense_matrices(op: SbpOperator1D, n: int | None = None):
    """Exact dense (H/h, h*D, Q) as nested Fraction lists on n + 1 nodes.

    Independent of the stencil kernels; used for verification and as a test
    oracle. Keep n small.
    """
    op.require_derivative()
    n = op.grid.n if n is None else n
    r, s, size = op.r, op.s, n + 1
    if size < 2 * r:
        raise GridSizeError(f"{op.family} needs n + 1 >= {2 * r} nodes, got {size}")
    alpha = op.alpha.alpha
    hd = [F(1)] * size
    d = [[F(0)] * size for _ in range(size)]
    for i in range(r, size - r):
        for v, a in enumerate(alpha, start=1):
            d[i][i + v] += a
            d[i][i - v] -= a
    for i, row in enumerate(op.boundary_block):
        hd[i] = hd[size - 1 - i] = op.sigma[i]
        for c, val in enumerate(row):
            d[i][c] = val
            d[size - 1 - i][size - 1 - c] = -val
    q = [[hd[i] * x for x in d[i]] for i in range(size)]
    return hd, d, q


@dataclass(frozen=True)
class StructureReport:
    family: OperatorFamily
    n: int
    q_defect: Fraction
    boundary_degree: int
    interior_degree: int
    required: tuple[int, int]

    @property
    def passed(self) -> bool:
        return (
            self.q_defect == 0
            and self.boundary_degree >= self.required[0]
            and self.interior_degree >= self.required[1]
        )

    def __str__(self) -> str:
        return (
            f"{self.family} n={self.n}: max|Q+Q^T-B|={self.q_defect} "
            f"boundary degree {self.boundary_degree} (need {self.required[0]}), "
            f"interior degree {self.interior_degree} (need {self.required[1]}) -> "
            f"{'pass' if self.passed else 'FAIL'}"
        )


def _exact_degree(d: list[list[Fraction]], rows: Sequence[int], max_degree: int) -> int:
    # nodes x_v = v (h = 1); row i of D must map x^k to k i^(k-1)
    size = len(d)
    best = -1
    for k in range(max_degree + 1):
        xk = [F(v) ** k for v in range(size)]
        for i in rows:
            got = sum(c * x for c, x in zip(d[i], xk) if c)
            want = k * F(i) ** (k - 1) if k else F(0)
            if got != want:
                return best
        best = k
    return best


def verify_sbp_structure(op: SbpOperator1D, n: int | None = None) -> StructureReport:
    """Check Q + Q^T = diag(-1, 0, ..., 0, 1) and the accuracy degrees exactly.

    Runs on the operator's own grid size when it is at most 64 nodes, otherwise
    on a 4r-interval grid.
    """
    op.require_derivative()
    if n is None:
        n = op.grid.n if op.grid.n <= 64 else max(4 * op.r, 2 * op.r + 2 * op.s)
    _, d, q = dense_matrices(op, n)
    size = n + 1
    defect = F(0)
    for i in range(size):
        for j in range(size):
            b = F(-1) if i == j == 0 else F(1) if i == j == n else F(0)
            defect = max(defect, abs(q[i][j] + q[j][i] - b))
    max_degree = 2 * op.s + 2
    boundary_rows = list(range(op.r)) + list(range(size - op.r, size))
    interior_rows = list(range(op.r, size - op.r))
    bdeg = _exact_degree(d, boundary_rows, max_degree)
    ideg = _exact_degree(d, interior_rows, max_degree) if interior_rows else max_degree
    return StructureReport(op.family, n, defect, bdeg, ideg, (op.family.tau, 2 * op.s))
