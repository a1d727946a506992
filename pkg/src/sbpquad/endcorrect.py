"""Trapezoid rules with end corrections.

A rule with boundary weights sigma_0..sigma_{r-1},

    I(u) = h (sum_{v<r} sigma_v u_v + sum_{v=r}^{n-r} u_v + sum_{v<r} sigma_v u_{n-v}),

is q-order accurate iff for j = 1..q-1

    j sum_v sigma_v (r - v)^(j-1) = r^j - (-1)^j B_j.

Everything here is exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sbpquad.errors import InfeasibleError, ShapeError, SingularSystemError
from sbpquad.exact import CentralStencil, bernoulli, min_norm_solution, solve_square


@dataclass(frozen=True)
class EndCorrectionConditions:
    r: int
    q: int
    matrix: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]


def conditions(r: int, q: int) -> EndCorrectionConditions:
    if r < 1:
        raise ValueError(f"rule width must be positive, got r={r}")
    if not 2 <= q <= r + 1:
        raise ValueError(f"order must satisfy 2 <= q <= r + 1, got q={q}, r={r}")
    matrix = tuple(
        tuple(Fraction(j * (r - v) ** (j - 1)) for v in range(r)) for j in range(1, q)
    )
    rhs = tuple(Fraction(r**j) - (-1) ** j * bernoulli(j) for j in range(1, q))
    return EndCorrectionConditions(r, q, matrix, rhs)


@dataclass(frozen=True)
class ConditionReport:
    residuals: tuple[Fraction, ...]  # row j is residuals[j - 1]
    label: str = "end-correction"

    @property
    def passed(self) -> bool:
        return not any(self.residuals)

    @property
    def first_failure(self) -> int | None:
        """1-based row index j of the first nonzero residual."""
        return next((j for j, res in enumerate(self.residuals, start=1) if res), None)

    def __str__(self) -> str:
        rows = ", ".join(f"j={j}: {res}" for j, res in enumerate(self.residuals, start=1))
        verdict = "pass" if self.passed else f"FAIL at j={self.first_failure}"
        return f"{self.label} conditions [{rows}] -> {verdict}"


def _as_fractions(values: Iterable) -> list[Fraction]:
    out = []
    for x in values:
        # floats convert exactly, so perturbations such as 1e-3 survive
        out.append(x if isinstance(x, Fraction) else Fraction(x))
    return out


def verify_conditions(sigma: Sequence, r: int, q: int) -> ConditionReport:
    sigma = _as_fractions(sigma)
    if len(sigma) != r:
        raise ShapeError(f"expected {r} weights, got {len(sigma)}")
    cond = conditions(r, q)
    res = tuple(
        sum(a * x for a, x in zip(row, sigma)) - b for row, b in zip(cond.matrix, cond.rhs)
    )
    return ConditionReport(res)


def verify_conditions_float(sigma: Sequence[float], r: int, q: int) -> bool:
    """Floating-point variant, tolerance 1e-13 * max(1, r^q)."""
    cond = conditions(r, q)
    tol = 1e-13 * max(1, r**q)
    return all(
        abs(sum(float(a) * float(x) for a, x in zip(row, sigma)) - float(b)) <= tol
        for row, b in zip(cond.matrix, cond.rhs)
    )


def verify_prop2(lam: Sequence, s: int, alpha: CentralStencil) -> ConditionReport:
    """Check the diagonal-norm weight relations, rows j = 1..2s.

    Rows j < 2s are the end-correction conditions; row 2s reads

        2s sum_v lam_v (r - v)^(2s-1) = r^(2s) - 2 sum_v alpha_v sum_{w<v} w^s (w - v)^s.

    The closure width is r = len(lam); it is nominally 2s, while the
    second-order operator uses r = 1.
    """
    lam = _as_fractions(lam)
    if alpha.s != s:
        raise ShapeError(f"stencil half-width {alpha.s} does not match s={s}")
    r = len(lam)
    if r < 1:
        raise ShapeError("weight vector is empty")
    res = []
    for j in range(1, 2 * s + 1):
        lhs = j * sum(x * (r - v) ** (j - 1) for v, x in enumerate(lam))
        if j < 2 * s:
            rhs = r**j - (-1) ** j * bernoulli(j)
        else:
            tail = sum(
                a * sum(Fraction(w**s * (w - v) ** s) for w in range(v))
                for v, a in enumerate(alpha.alpha, start=1)
            )
            rhs = r ** (2 * s) - 2 * tail
        res.append(lhs - rhs)
    return ConditionReport(tuple(res), label="diagonal-norm")


@dataclass(frozen=True)
class EndCorrectedRule:
    sigma: tuple[Fraction, ...]
    q: int

    @property
    def r(self) -> int:
        return len(self.sigma)


def solve_rule(r: int, q: int, pinned: dict[int, Fraction] | Sequence[tuple[int, Fraction]] | None = None) -> EndCorrectedRule:
    """Synthesize boundary weights for a q-order end-corrected trapezoid rule.

    With r = q - 1 the system is square. With r > q - 1, pinned weights are
    fixed first and the remaining freedom goes to the exact solution closest
    to the plain trapezoid interior weight, i.e. minimal ||sigma - 1||_2.
    """
    cond = conditions(r, q)
    pins = dict(pinned.items() if isinstance(pinned, dict) else (pinned or ()))
    pins = {int(k): Fraction(v) for k, v in pins.items()}
    if any(not 0 <= k < r for k in pins):
        raise ValueError(f"pinned indices must lie in 0..{r - 1}, got {sorted(pins)}")
    if len(pins) > r - (q - 1):
        raise ValueError(f"at most {r - (q - 1)} weights may be pinned for r={r}, q={q}")

    free = [v for v in range(r) if v not in pins]
    # shift to deviations delta = sigma - 1 on the free weights
    a = [[row[v] for v in free] for row in cond.matrix]
    b = [
        rhs - sum(row[v] * pins[v] for v in pins) - sum(row[v] for v in free)
        for row, rhs in zip(cond.matrix, cond.rhs)
    ]
    try:
        if len(free) == len(a):
            delta = solve_square(a, b)
        else:
            delta = min_norm_solution(a, b)
    except SingularSystemError as exc:
        if pins:
            raise InfeasibleError(f"pins {pins} are incompatible with order {q}") from exc
        raise
    sigma = [Fraction(0)] * r
    for v, val in pins.items():
        sigma[v] = val
    for v, d in zip(free, delta):
        sigma[v] = 1 + d
    report = verify_conditions(sigma, r, q)
    if not report.passed:
        raise AssertionError(f"synthesized rule fails its own conditions: {report}")
    return EndCorrectedRule(tuple(sigma), q)
