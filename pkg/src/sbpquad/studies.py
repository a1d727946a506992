"""Grid-refinement studies for SBP quadrature and the discrete divergence theorem."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from sbpquad.errors import UnsupportedOperation
from sbpquad.operators import (
    OperatorFamily,
    UniformGrid1D,
    build_operator,
    end_corrected_weights,
    quadrature_weights,
)
from sbpquad.tensor import (
    build_paper_grid,
    compute_metrics,
    contravariant_flux,
    divergence_integral,
    integrate2d,
)

DEFAULT_N = (16, 32, 64, 128, 256, 512)

PI = math.pi
QUAD1D_EXACT = -4.0 * PI * math.cos(4.0 * PI)
QUAD2D_EXACT = 3.0 * (1.0 - math.exp(-1.0)) * (1.0 - math.cos(1.0))
DIV2D_EXACT = 2.0 / PI


def quad1d_integrand(x):
    # (4 pi)^2 x sin(4 pi x) integrates to -4 pi cos(4 pi) on [0, 1]
    return (4.0 * PI) ** 2 * x * np.sin(4.0 * PI * x)


def quad2d_integrand(x, y):
    return (x * x + y * y) * np.exp((1.0 - x * x + y * y) / 3.0) * np.sin((x * y - 1.0) / 2.0)


def div2d_field(x, y):
    """Vector field (F, G) whose divergence integrates to 2/pi over the test domain."""
    xi = (x * x - y * y - 1.0) / 3.0
    eta = (x * y - 1.0) / 2.0
    decay = np.exp((1.0 - x * y) / 2.0) * np.cos(2.0 * PI * xi)
    swirl = (2.0 / 3.0) * eta**7 * np.sin(PI * xi)
    return 0.5 * x * decay + y * swirl, -0.5 * y * decay + x * swirl


@dataclass
class ConvergenceRecord:
    study: str
    family: str
    n: int
    error: float
    rate: float | None = None


@dataclass
class StudyResult:
    records: list[ConvergenceRecord]
    residuals: list[float] = field(default_factory=list)  # |volume - boundary| per n, div study only


def observed_rate(e_coarse: float, e_fine: float) -> float:
    """Rate from successive halvings: log2(|E_{n/2}| / |E_n|)."""
    return math.log(abs(e_coarse) / abs(e_fine)) / math.log(2.0)


def _check_n_list(n_list: Sequence[int]) -> list[int]:
    ns = [int(n) for n in n_list]
    if not ns:
        raise ValueError("n_list is empty")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"n_list must be strictly increasing, got {ns}")
    return ns


def _records(study: str, label: str, ns: list[int], errors: list[float]) -> list[ConvergenceRecord]:
    out = []
    by_n = dict(zip(ns, errors))
    for n, e in zip(ns, errors):
        prev = by_n.get(n // 2) if n % 2 == 0 else None
        rate = observed_rate(prev, e) if prev is not None and e != 0 and prev != 0 else None
        out.append(ConvergenceRecord(study, label, n, e, rate))
    return out


def study_quad1d(family, n_list: Sequence[int] = DEFAULT_N) -> list[ConvergenceRecord]:
    family = OperatorFamily.parse(family)
    ns = _check_n_list(n_list)
    errors = []
    for n in ns:
        op = build_operator(family, UniformGrid1D(n))
        u = quad1d_integrand(op.grid.nodes)
        errors.append(QUAD1D_EXACT - float(quadrature_weights(op) @ u))
    return _records("quad1d", family.label, ns, errors)


def study_rule1d(sigma: Sequence, label: str, n_list: Sequence[int] = DEFAULT_N,
                 integrand: Callable = quad1d_integrand, exact: float = QUAD1D_EXACT) -> list[ConvergenceRecord]:
    """Refinement study for an arbitrary end-corrected trapezoid rule."""
    ns = _check_n_list(n_list)
    errors = []
    for n in ns:
        grid = UniformGrid1D(n)
        errors.append(exact - float(end_corrected_weights(sigma, grid) @ integrand(grid.nodes)))
    return _records("rule1d", label, ns, errors)


def _require_diagonal(family: OperatorFamily) -> None:
    if not family.is_diagonal:
        raise UnsupportedOperation(f"2-D studies need a diagonal-norm family, got {family}")


def study_quad2d(family, metric_family=None, n_list: Sequence[int] = DEFAULT_N) -> list[ConvergenceRecord]:
    """Mapped quadrature on the hyperbolic domain.

    ``family`` supplies the quadrature weights and ``metric_family`` (default:
    the same) the derivatives in the Jacobian. Mixed runs are labelled
    ``"<family>+<metric_family>"``.
    """
    family = OperatorFamily.parse(family)
    metric_family = family if metric_family is None else OperatorFamily.parse(metric_family)
    _require_diagonal(family)
    _require_diagonal(metric_family)
    mixed = metric_family != family
    ns = _check_n_list(n_list)
    errors = []
    for n in ns:
        grid = build_paper_grid(n)
        metrics = compute_metrics(build_operator(metric_family, n), grid)
        f = quad2d_integrand(grid.x, grid.y)
        approx = integrate2d(build_operator(family, n), metrics, f, allow_mixed=mixed)
        errors.append(QUAD2D_EXACT - approx)
    label = f"{family.label}+{metric_family.label}" if mixed else family.label
    return _records("mixed2d" if mixed else "quad2d", label, ns, errors)


def study_div2d(family, n_list: Sequence[int] = DEFAULT_N) -> StudyResult:
    family = OperatorFamily.parse(family)
    _require_diagonal(family)
    ns = _check_n_list(n_list)
    errors, residuals = [], []
    for n in ns:
        op = build_operator(family, n)
        grid = build_paper_grid(n)
        f, g = div2d_field(grid.x, grid.y)
        fhat, ghat = contravariant_flux(op, grid, f, g)
        volume, boundary = divergence_integral(op, fhat, ghat)
        errors.append(DIV2D_EXACT - volume)
        scale = float(np.abs(fhat).max() + np.abs(ghat).max())
        residuals.append(abs(volume - boundary) / scale)
    return StudyResult(_records("div2d", family.label, ns, errors), residuals)


# -- reference rates and pass/fail --------------------------------------------

# Reference rates for n = 32..512.
REFERENCE_RATES = {
    "quad1d": {
        "diag-1-2": (2.0113, 2.0028, 2.0007, 2.0002, 2.0000),
        "diag-2-4": (4.4978, 4.4148, 4.2182, 4.1019, 4.0473),
        "full-3-4": (4.1973, 2.9369, 3.7072, 3.8876, 3.9510),
        "diag-3-6": (5.7050, 6.8942, 6.9378, 6.7651, 6.5472),
    },
    "quad2d": {
        "diag-1-2": (2.0911, 2.0453, 2.0226, 2.0113, 2.0056),
        "diag-2-4": (4.3283, 4.1583, 4.0768, 4.0374, 4.0093),
        "diag-3-6": (7.0799, 6.7941, 6.2253, 2.1274, -0.7390),
    },
    # quadrature diag-3-6, metric terms diag-2-4
    "mixed2d": {
        "diag-3-6+diag-2-4": (3.3170, 2.0521, 2.7215, 2.8863, 2.9484),
    },
    "div2d": {
        "diag-1-2": (2.0909, 2.0453, 2.0226, 2.0113, 2.0056),
        "diag-2-4": (3.7201, 3.7862, 3.9000, 3.9532, 3.9758),
        "diag-3-6": (7.5935, 7.2371, 7.8361, 5.0507, -2.1760),
    },
}
REFERENCE_N = (32, 64, 128, 256, 512)

REFERENCE_BAND = 0.05
ASYMPTOTIC_BAND = 0.15
# diag-3-6 on 2-D grids reaches the round-off floor from n = 256; coarser rates
# are compared with wider bands
ROUNDOFF_N = 256
ROUNDOFF_BANDS = {"quad2d": 0.3, "div2d": 0.5}


def reference_rate(study: str, label: str, n: int) -> float | None:
    row = REFERENCE_RATES.get(study, {}).get(label)
    if row is None or n not in REFERENCE_N:
        return None
    return row[REFERENCE_N.index(n)]


def expected_order(study: str, label: str) -> int:
    """Asymptotic order: 2s, or for mixed runs min(2s of the quadrature, tau + 1 of the metrics)."""
    parts = [OperatorFamily.parse(p) for p in label.split("+")]
    if study == "mixed2d" and len(parts) == 2:
        return min(parts[0].order, parts[1].tau + 1)
    return parts[0].order


def _roundoff_limited(rec: ConvergenceRecord) -> bool:
    return rec.study in ROUNDOFF_BANDS and rec.family == "diag-3-6"


@dataclass
class Verdict:
    passed: bool
    messages: list[str]


def evaluate(records: Sequence[ConvergenceRecord]) -> Verdict:
    """Pass/fail on the finest gradeable rate of one study.

    diag-3-6 rates at n >= 256 in 2-D studies are reported but not graded.
    A reference rate at the graded n must be matched within 0.05 (0.3 / 0.5
    for the round-off-limited 2-D diag-3-6 rows); from n = 256 on, the rate
    must also lie within 0.15 of the expected asymptotic order.
    """
    graded = [
        rec for rec in records
        if rec.rate is not None and not (_roundoff_limited(rec) and rec.n >= ROUNDOFF_N)
    ]
    if not graded:
        return Verdict(True, ["no gradeable rates"])
    rec = graded[-1]
    ok, msgs = True, []
    reference = reference_rate(rec.study, rec.family, rec.n)
    if reference is not None:
        band = ROUNDOFF_BANDS[rec.study] if _roundoff_limited(rec) else REFERENCE_BAND
        good = abs(rec.rate - reference) <= band
        ok &= good
        msgs.append(f"{rec.study} {rec.family}: rate {rec.rate:.4f} at n={rec.n} vs reference "
                    f"{reference:.4f} (band {band}): {'ok' if good else 'FAIL'}")
    if rec.n >= ROUNDOFF_N:
        order = expected_order(rec.study, rec.family)
        good = abs(rec.rate - order) <= ASYMPTOTIC_BAND
        ok &= good
        msgs.append(f"{rec.study} {rec.family}: rate {rec.rate:.4f} at n={rec.n} vs order "
                    f"{order} (band {ASYMPTOTIC_BAND}): {'ok' if good else 'FAIL'}")
    return Verdict(ok, msgs or [f"{rec.study} {rec.family}: rate {rec.rate:.4f} at n={rec.n} not graded"])


# -- reports --------------------------------------------------------------------

CSV_COLUMNS = ("study", "family", "n", "error", "rate")


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.17g}"


def format_csv(records: Sequence[ConvergenceRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in sorted(records, key=lambda r: (r.study, r.family, r.n)):
        writer.writerow([rec.study, rec.family, rec.n, _fmt(rec.error), _fmt(rec.rate)])
    return buf.getvalue()


def format_json(records: Sequence[ConvergenceRecord]) -> str:
    rows = [asdict(rec) for rec in sorted(records, key=lambda r: (r.study, r.family, r.n))]
    return json.dumps(rows, indent=2) + "\n"


def emit_report(records: Sequence[ConvergenceRecord], fmt: str = "csv", path: str | Path | None = None) -> str:
    """Serialize records as CSV or JSON; write to ``path`` when given."""
    if not records:
        raise ValueError("no records to report")
    if fmt == "csv":
        text = format_csv(records)
    elif fmt == "json":
        text = format_json(records)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def parse_report(text: str, fmt: str = "csv") -> list[ConvergenceRecord]:
    if fmt == "json":
        return [ConvergenceRecord(**row) for row in json.loads(text)]
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(ConvergenceRecord(
            row["study"], row["family"], int(row["n"]), float(row["error"]),
            float(row["rate"]) if row["rate"] else None,
        ))
    return out


def plot_data(records: Iterable[ConvergenceRecord]) -> str:
    """CSV of log10(h) against log10|E_n| for error plots."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["study", "family", "n", "log10_h", "log10_abs_error"])
    for rec in sorted(records, key=lambda r: (r.study, r.family, r.n)):
        err = abs(rec.error)
        writer.writerow([
            rec.study, rec.family, rec.n, f"{math.log10(1.0 / rec.n):.17g}",
            f"{math.log10(err):.17g}" if err > 0 else "",
        ])
    return buf.getvalue()
