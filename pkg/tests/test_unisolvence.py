"""Bordered determinants, Monte Carlo harness and growth induction."""

import json
import math

import numpy as np
import pytest

from oracles import cofactor_det, pair_determinant, triple_determinant
from polyharm import (
    CSV_HEADER,
    BorderedSystem,
    PointSet,
    RadialPower,
    SingularSystemError,
    ThinPlateSpline,
    TruncatedGaussian,
    Uniform,
    assemble,
    det3_null_diag,
    incremental_growth,
    lu_sign_logabs,
    monte_carlo,
    sample,
    unit_box,
)


def random_points(n, d, seed):
    return sample(unit_box(d), Uniform(), n, seed)


def test_det3_null_diag_closed_form():
    a, b, c = 1.7, -0.4, 2.9
    matrix = np.array([[0.0, a, b], [a, 0.0, c], [b, c, 0.0]])
    value = det3_null_diag(matrix)
    assert value == pytest.approx(triple_determinant(a, b, c), rel=1e-15)
    assert value == pytest.approx(cofactor_det(matrix), rel=1e-13)
    positive = np.array([[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]])
    assert det3_null_diag(positive) > 0.0


def test_det3_null_diag_validation():
    with pytest.raises(ValueError):
        det3_null_diag(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        det3_null_diag(np.eye(3))


def test_lu_determinant_matches_cofactor_oracle():
    rng = np.random.default_rng(71)
    for n in range(1, 7):
        for _ in range(20):
            matrix = rng.standard_normal((n, n))
            sign, log_abs = lu_sign_logabs(matrix)
            expected = cofactor_det(matrix)
            got = sign * math.exp(log_abs)
            assert got == pytest.approx(expected, rel=1e-10)


def test_lu_determinant_exact_zero_pivot():
    sign, log_abs = lu_sign_logabs(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert sign == 0 and log_abs == -math.inf


def test_border_is_matrix_row_at_nodes():
    pts = random_points(7, 2, 72)
    base = assemble(pts, ThinPlateSpline(1))
    system = BorderedSystem(base)
    for j in range(pts.n):
        assert np.array_equal(system.border(pts.points[j]), base.entries[j])
    with pytest.raises(ValueError):
        system.border(np.zeros(3))


def test_bordered_determinant_routes_agree():
    pts = random_points(9, 2, 73)
    system = BorderedSystem(assemble(pts, RadialPower(1.5)))
    fresh = np.array([0.21, 0.83])
    schur = system.determinant(fresh, method="schur")
    direct = system.determinant(fresh, method="direct")
    auto = system.determinant(fresh, method="auto")
    assert schur == pytest.approx(direct, rel=1e-8)
    assert auto == schur
    with pytest.raises(ValueError):
        system.determinant(fresh, method="qr")


def test_bordered_determinant_equals_grown_matrix_determinant():
    pts = random_points(8, 2, 74)
    fresh = np.array([0.4, 0.9])
    system = BorderedSystem(assemble(pts, ThinPlateSpline(1)))
    f_value = system.determinant(fresh)
    grown = np.vstack([pts.points, fresh[None, :]])
    sign, log_abs = lu_sign_logabs(
        assemble(PointSet.from_array(grown), ThinPlateSpline(1)).entries
    )
    assert f_value == pytest.approx(sign * math.exp(log_abs), rel=1e-8)


def test_bordered_determinant_vanishes_at_nodes():
    pts = random_points(10, 2, 75)
    system = BorderedSystem(assemble(pts, ThinPlateSpline(1)))
    base_det = abs(
        system.base_diagnostics.det_sign * math.exp(system.base_diagnostics.log_abs_det)
    )
    for j in range(pts.n):
        border = system.border(pts.points[j])
        scale = base_det * max(1.0, float(border @ border))
        assert abs(system.determinant(pts.points[j])) <= 1e-8 * scale


def test_schur_route_requires_nonsingular_base():
    single = random_points(1, 2, 76)
    system = BorderedSystem(assemble(single, ThinPlateSpline(1)))
    assert system.base_diagnostics.singular_verdict
    with pytest.raises(SingularSystemError):
        system.determinant(np.array([0.5, 0.5]), method="schur")
    # auto falls back to the direct route: det [[0, v], [v, 0]] = -v**2
    fresh = np.array([0.5, 0.5])
    value = system.determinant(fresh, method="auto")
    phi_r = ThinPlateSpline(1).value(float(np.linalg.norm(fresh - single.points[0])))
    assert value == pytest.approx(pair_determinant(phi_r), rel=1e-12)


def test_grid_matches_pointwise_calls():
    pts = random_points(5, 2, 77)
    system = BorderedSystem(assemble(pts, ThinPlateSpline(1)))
    xs = np.linspace(-0.2, 1.2, 4)
    ys = np.linspace(-0.1, 1.1, 3)
    field = system.grid(xs, ys)
    assert field.shape == (4, 3)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            assert field[i, j] == system.determinant(np.array([x, y]))
    three_d = BorderedSystem(assemble(random_points(4, 3, 78), ThinPlateSpline(1)))
    with pytest.raises(ValueError):
        three_d.grid(xs, ys)


def test_monte_carlo_full_report():
    report = monte_carlo(
        ThinPlateSpline(1), unit_box(2), Uniform(), [4, 9], trials=6, seed=5
    )
    assert len(report.records) == 12
    assert [a.n for a in report.aggregates] == [4, 9]
    assert report.total_failures == 0
    for agg in report.aggregates:
        assert agg.failures == 0 and agg.failure_rate == 0.0
        assert 0.0 < agg.min_sigma_ratio < 1.0
        assert agg.max_condition > 1.0
    doc = json.loads(report.to_json())
    assert doc["config"]["kernel"] == "tps:k=1"
    assert doc["config"]["seed"] == 5
    assert len(doc["records"]) == 12


def test_monte_carlo_counts_singular_trials():
    # size 1 gives the 1x1 zero matrix, which is exactly singular
    report = monte_carlo(
        ThinPlateSpline(1), unit_box(2), Uniform(), [1], trials=4, seed=5
    )
    assert report.total_failures == 4
    assert report.aggregates[0].failure_rate == 1.0
    assert report.aggregates[0].min_sigma_ratio == 0.0
    for record in report.records:
        assert record.det_sign == 0
        assert record.sigma_max == 0.0


def test_monte_carlo_thread_count_does_not_change_output():
    kwargs = dict(n_list=[3, 7], trials=5, seed=9)
    serial = monte_carlo(RadialPower(1.5), unit_box(2), Uniform(), **kwargs)
    threaded = monte_carlo(RadialPower(1.5), unit_box(2), Uniform(), threads=4, **kwargs)
    assert serial.to_json() == threaded.to_json()
    assert serial.records_csv() == threaded.records_csv()


def test_monte_carlo_density_and_domain_in_config():
    density = TruncatedGaussian(mean=(0.5, 0.5), sd=(0.2, 0.2))
    report = monte_carlo(ThinPlateSpline(1), unit_box(2), density, [5], 3, 1)
    assert report.config["density"]["kind"] == "truncated-gaussian"
    assert report.config["domain"]["shape"] == "box"
    assert "threads" not in report.config


def test_monte_carlo_validation():
    with pytest.raises(ValueError):
        monte_carlo(ThinPlateSpline(1), unit_box(2), Uniform(), [], 5, 1)
    with pytest.raises(ValueError):
        monte_carlo(ThinPlateSpline(1), unit_box(2), Uniform(), [3], 0, 1)
    with pytest.raises(ValueError):
        monte_carlo(ThinPlateSpline(1), unit_box(2), Uniform(), [3], 5, 1, threads=0)


def test_records_csv_header_and_shape():
    report = monte_carlo(ThinPlateSpline(1), unit_box(2), Uniform(), [4], 3, 2)
    lines = report.records_csv().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[0] == "n,trial,det_sign,log_abs_det,sigma_min,sigma_max,condition,min_dist"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[0] == "4" and first[1] == "0"
    # full-precision floats round-trip through the text form
    assert float(first[3]) == report.records[0].log_abs_det


def test_incremental_growth_steps_and_signs():
    report = incremental_growth(ThinPlateSpline(1), unit_box(2), Uniform(), 12, 31)
    assert len(report.steps) == 11
    assert len(report.det_signs) == 11
    assert report.steps[0].n == 1 and report.steps[-1].n == 11
    for step in report.steps:
        if step.cond_base <= 1e10:
            assert step.rel_disagreement <= 1e-8
            assert not step.flagged
    assert report.det_signs[0] == -1
    doc = report.to_dict()
    assert doc["config"]["n_max"] == 12
    assert len(doc["steps"]) == 11


def test_incremental_growth_first_step_uses_direct_route():
    # the 1x1 base [0] is singular, so step one must fall back to the
    # direct factorization and produce -phi(r)**2
    report = incremental_growth(ThinPlateSpline(1), unit_box(2), Uniform(), 3, 3)
    pts = sample(unit_box(2), Uniform(), 3, 3).points
    r = float(np.linalg.norm(pts[1] - pts[0]))
    expected = pair_determinant(ThinPlateSpline(1).value(r))
    assert report.steps[0].f_value == pytest.approx(expected, rel=1e-12)


def test_incremental_growth_validation():
    with pytest.raises(ValueError):
        incremental_growth(ThinPlateSpline(1), unit_box(2), Uniform(), 1, 3)
