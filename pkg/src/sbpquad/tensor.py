"""Tensor-product SBP machinery on curvilinear 2-D grids.

Nodes are ordered first by j (the xi index) and then by k (the eta index):
flat index k*(n+1) + j. As arrays, fields have shape (n+1, n+1) and are
indexed ``u[k, j]``, so xi runs along axis 1 and eta along axis 0. With this
ordering D_xi = (I kron D) and D_eta = (D kron I). Kronecker products are
never formed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sbpquad.errors import ConsistencyError, ShapeError, UnsupportedOperation
from sbpquad.operators import OperatorFamily, SbpOperator1D, quadrature_weights


@dataclass(frozen=True)
class TensorGrid2D:
    """(n+1)^2 nodes with computational coordinates (j/n, k/n) and physical (x, y)."""

    n: int
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        shape = (self.n + 1, self.n + 1)
        for name in ("x", "y"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.size != shape[0] * shape[1]:
                raise ShapeError(f"{name} has {arr.size} entries, expected {shape[0] * shape[1]}")
            object.__setattr__(self, name, arr.reshape(shape))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n + 1, self.n + 1)

    @property
    def xi(self) -> np.ndarray:
        return np.broadcast_to(np.arange(self.n + 1) / self.n, self.shape)

    @property
    def eta(self) -> np.ndarray:
        return np.broadcast_to((np.arange(self.n + 1) / self.n)[:, None], self.shape)

    @classmethod
    def from_map(cls, n: int, mapping) -> "TensorGrid2D":
        """Grid whose physical nodes are ``mapping(xi, eta) -> (x, y)``."""
        t = np.arange(n + 1) / n
        xi, eta = np.meshgrid(t, t)  # [k, j] layout
        x, y = mapping(xi, eta)
        return cls(n, np.broadcast_to(x, xi.shape).copy(), np.broadcast_to(y, xi.shape).copy())


def _field(op: SbpOperator1D, u) -> np.ndarray:
    size = op.grid.size
    arr = np.asarray(u, dtype=np.float64)
    if arr.size != size * size:
        raise ShapeError(f"field has {arr.size} entries; operator grid needs {size * size}")
    return arr.reshape(size, size)


def apply_Dxi(op: SbpOperator1D, u) -> np.ndarray:
    """(I kron D) u: differentiate along each eta = const line."""
    return op.diff_lines(_field(op, u))


def apply_Deta(op: SbpOperator1D, u) -> np.ndarray:
    """(D kron I) u: differentiate along each xi = const line."""
    return np.ascontiguousarray(op.diff_lines(_field(op, u).T).T)


@dataclass(frozen=True)
class MetricData2D:
    dx_dxi: np.ndarray
    dx_deta: np.ndarray
    dy_dxi: np.ndarray
    dy_deta: np.ndarray
    jac: np.ndarray
    source: OperatorFamily


def compute_metrics(op: SbpOperator1D, grid: TensorGrid2D) -> MetricData2D:
    """Metric derivatives and Jacobian x_xi*y_eta - y_xi*x_eta from the SBP operator."""
    if grid.n != op.grid.n:
        raise ShapeError(f"grid has n={grid.n}, operator n={op.grid.n}")
    x_xi, x_eta = apply_Dxi(op, grid.x), apply_Deta(op, grid.x)
    y_xi, y_eta = apply_Dxi(op, grid.y), apply_Deta(op, grid.y)
    jac = x_xi * y_eta - y_xi * x_eta
    return MetricData2D(x_xi, x_eta, y_xi, y_eta, jac, op.family)


def _weighted_sum(w: np.ndarray, values: np.ndarray, compensated: bool) -> float:
    # per-line partial sums first, then the reduction across lines
    if compensated:
        lines = [math.fsum(row * w) for row in values]
        return math.fsum(np.asarray(lines) * w)
    lines = (values * w[None, :]).sum(axis=1)
    return float((lines * w).sum())


def integrate2d(
    op: SbpOperator1D,
    metrics: MetricData2D,
    f,
    *,
    allow_mixed: bool = False,
    compensated: bool = False,
) -> float:
    """J^T (H kron H) f.

    The metrics must come from the same operator family as the quadrature;
    ``allow_mixed=True`` lifts this for deliberate mixed-operator studies.
    """
    if metrics.source != op.family and not allow_mixed:
        raise ConsistencyError(
            f"metrics computed with {metrics.source} but quadrature uses {op.family}; "
            "pass allow_mixed=True to combine them deliberately"
        )
    f = _field(op, f)
    if metrics.jac.shape != f.shape:
        raise ShapeError(f"metric shape {metrics.jac.shape} does not match field {f.shape}")
    return _weighted_sum(quadrature_weights(op), metrics.jac * f, compensated)


def contravariant_flux(
    op: SbpOperator1D,
    grid: TensorGrid2D,
    f,
    g,
    metrics: MetricData2D | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """fhat = y_eta f - x_eta g,  ghat = -y_xi f + x_xi g, metrics from ``op``."""
    if metrics is None:
        metrics = compute_metrics(op, grid)
    elif metrics.source != op.family:
        raise ConsistencyError(f"metrics from {metrics.source}, operator is {op.family}")
    f, g = _field(op, f), _field(op, g)
    fhat = metrics.dy_deta * f - metrics.dx_deta * g
    ghat = -metrics.dy_dxi * f + metrics.dx_dxi * g
    return fhat, ghat


def divergence_integral(op: SbpOperator1D, fhat, ghat) -> tuple[float, float]:
    """Quadrature of the discrete divergence, and its boundary-only form.

    volume   = c^T (H kron H) [(I kron D) fhat + (D kron I) ghat]
    boundary = sum_k w_k (fhat[k, n] - fhat[k, 0]) + sum_j w_j (ghat[n, j] - ghat[0, j])
    """
    if not op.family.is_diagonal:
        raise UnsupportedOperation(f"boundary form needs a diagonal norm, {op.family} is not")
    fhat, ghat = _field(op, fhat), _field(op, ghat)
    w = quadrature_weights(op)
    div = apply_Dxi(op, fhat) + apply_Deta(op, ghat)
    volume = _weighted_sum(w, div, compensated=False)
    boundary = float(np.dot(w, fhat[:, -1] - fhat[:, 0]) + np.dot(w, ghat[-1, :] - ghat[0, :]))
    return volume, boundary


# -- the hyperbolic test domain 1 <= xy <= 3, 1 <= x^2 - y^2 <= 4 ------------


def hyperbolic_inverse_map(xi, eta):
    """(x, y) with x^2 - y^2 = 3 xi + 1 and xy = 2 eta + 1, x, y > 0.

    (x + iy)^2 = a + ib with a = 3 xi + 1, b = 2(2 eta + 1); the principal
    square root picks the x > 0 branch.
    """
    a = 3.0 * np.asarray(xi, dtype=np.float64) + 1.0
    b = 2.0 * (2.0 * np.asarray(eta, dtype=np.float64) + 1.0)
    rho = np.hypot(a, b)
    return np.sqrt(0.5 * (rho + a)), np.sqrt(0.5 * (rho - a))


def hyperbolic_forward_map(x, y):
    return (x * x - y * y - 1.0) / 3.0, (x * y - 1.0) / 2.0


def build_paper_grid(n: int) -> TensorGrid2D:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return TensorGrid2D.from_map(n, hyperbolic_inverse_map)


def export_field_csv(grid: TensorGrid2D, values, path: str | Path) -> None:
    """Write a grid snapshot with columns j, k, xi, eta, x, y, value."""
    vals = np.asarray(values, dtype=np.float64).reshape(grid.shape)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["j", "k", "xi", "eta", "x", "y", "value"])
        for k in range(grid.n + 1):
            for j in range(grid.n + 1):
                writer.writerow(
                    [j, k]
                    + [f"{v:.17g}" for v in (j / grid.n, k / grid.n, grid.x[k, j], grid.y[k, j], vals[k, j])]
                )
