import json
import math

import pytest

from sbpquad.studies import (
    QUAD1D_EXACT,
    QUAD2D_EXACT,
    ConvergenceRecord,
    emit_report,
    evaluate,
    expected_order,
    observed_rate,
    parse_report,
    plot_data,
    quad1d_integrand,
    study_div2d,
    study_quad1d,
    study_quad2d,
    study_rule1d,
)
from sbpquad.errors import UnsupportedOperation


def test_observed_rate():
    assert observed_rate(4e-3, 1e-3) == pytest.approx(2.0)
    assert observed_rate(-1.6e-2, 1e-3) == pytest.approx(4.0)


def test_reference_values():
    # closed forms checked against a fine composite Simpson sum
    n = 20000
    h = 1.0 / n
    simpson = h / 3 * sum((1 if i in (0, n) else 4 if i % 2 else 2) * quad1d_integrand(i * h)
                          for i in range(n + 1))
    assert simpson == pytest.approx(QUAD1D_EXACT, abs=1e-9)
    assert QUAD2D_EXACT == pytest.approx(3 * (1 - math.exp(-1)) * (1 - math.cos(1)))


def test_quad1d_records():
    recs = study_quad1d("diag-2-4", [16, 32, 64])
    assert [r.n for r in recs] == [16, 32, 64]
    assert recs[0].rate is None
    assert recs[2].rate == pytest.approx(observed_rate(recs[1].error, recs[2].error))


def test_rate_needs_the_halved_grid():
    recs = study_quad1d("diag-1-2", [16, 24, 48])
    assert recs[1].rate is None and recs[2].rate is not None


def test_studies_are_deterministic():
    a = emit_report(study_quad2d("diag-2-4", n_list=[16, 32]))
    b = emit_report(study_quad2d("diag-2-4", n_list=[16, 32]))
    assert a == b


def test_n_list_validation():
    with pytest.raises(ValueError):
        study_quad1d("diag-1-2", [32, 16])
    with pytest.raises(ValueError):
        study_quad1d("diag-1-2", [])


def test_two_dimensional_studies_need_diagonal_norms():
    with pytest.raises(UnsupportedOperation):
        study_quad2d("full-3-4", n_list=[16])
    with pytest.raises(UnsupportedOperation):
        study_div2d("full-3-4", n_list=[16])


def test_mixed_labels():
    recs = study_quad2d("diag-3-6", "diag-2-4", n_list=[16, 32])
    assert {r.study for r in recs} == {"mixed2d"}
    assert recs[0].family == "diag-3-6+diag-2-4"
    assert expected_order("mixed2d", "diag-3-6+diag-2-4") == 3
    assert expected_order("mixed2d", "diag-2-4+diag-3-6") == 4
    assert expected_order("quad2d", "diag-3-6") == 6


def test_div_study_residuals():
    res = study_div2d("diag-2-4", [16, 32, 64])
    assert len(res.residuals) == 3
    assert max(res.residuals) < 1e-12


def test_rule_study_matches_catalog_study():
    from sbpquad.operators import build_operator

    sigma = build_operator("diag-2-4", 16).sigma
    a = study_rule1d(sigma, "diag-2-4", [16, 32])
    b = study_quad1d("diag-2-4", [16, 32])
    assert [r.error for r in a] == [r.error for r in b]


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_report_round_trip(fmt, tmp_path):
    recs = study_quad1d("diag-3-6", [16, 32, 64])
    path = tmp_path / f"rep.{fmt}"
    text = emit_report(recs, fmt, path)
    assert path.read_text() == text
    back = parse_report(text, fmt)
    assert back == recs


def test_csv_layout():
    recs = study_quad1d("diag-1-2", [16, 32])
    lines = emit_report(recs).splitlines()
    assert lines[0] == "study,family,n,error,rate"
    assert lines[1].endswith(",")  # coarsest grid has no rate
    assert float(lines[2].split(",")[3]) == recs[1].error


def test_json_layout():
    rows = json.loads(emit_report(study_quad1d("diag-1-2", [16, 32]), "json"))
    assert rows[0]["rate"] is None and set(rows[0]) == {"study", "family", "n", "error", "rate"}


def test_emit_errors():
    with pytest.raises(ValueError):
        emit_report([])
    with pytest.raises(ValueError):
        emit_report([ConvergenceRecord("quad1d", "diag-1-2", 16, 1.0)], "xml")


def test_plot_data():
    recs = [ConvergenceRecord("quad1d", "diag-1-2", 100, 1e-4), ConvergenceRecord("quad1d", "diag-1-2", 200, 0.0)]
    lines = plot_data(recs).splitlines()
    assert lines[0] == "study,family,n,log10_h,log10_abs_error"
    _, _, _, lh, le = lines[1].split(",")
    assert float(lh) == pytest.approx(-2) and float(le) == pytest.approx(-4)
    assert lines[2].endswith(",")


def test_evaluate_grades_reference_and_asymptotic_rates():
    ok = [ConvergenceRecord("quad1d", "diag-2-4", 512, 1e-9, 4.05)]
    assert evaluate(ok).passed
    off_reference = [ConvergenceRecord("quad1d", "diag-2-4", 512, 1e-9, 4.12)]
    assert not evaluate(off_reference).passed
    # unreference n: only the asymptotic band applies
    assert evaluate([ConvergenceRecord("quad1d", "diag-2-4", 1024, 1e-9, 4.1)]).passed
    assert not evaluate([ConvergenceRecord("quad1d", "diag-2-4", 1024, 1e-9, 3.5)]).passed


def test_evaluate_skips_roundoff_limited_rows():
    recs = [
        ConvergenceRecord("quad2d", "diag-3-6", 128, 1e-13, 6.30),
        ConvergenceRecord("quad2d", "diag-3-6", 256, 1e-14, 1.0),
    ]
    verdict = evaluate(recs)
    assert verdict.passed
    assert "n=128" in verdict.messages[0]
    assert evaluate([ConvergenceRecord("quad1d", "diag-1-2", 16, 1.0)]).messages == ["no gradeable rates"]
