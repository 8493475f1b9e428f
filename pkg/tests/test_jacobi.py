import math

import numpy as np
import pytest

from runtime.errors import DomainError
from verifiers.jacobi import (
    PHI1,
    PHI2,
    JacobiSolution,
    curves,
    lambda_grid,
    legendre_profile,
    phi1_zero,
    phi2_zero,
    stability_residual,
    verify_no_positive_radial,
    verify_phi1_shape,
    verify_phi2_shape,
    verify_residuals,
    verify_sphere_comparison,
    verify_wronskian,
    verify_zeros,
    wronskian,
)


def test_phi1_is_regular_at_origin():
    assert PHI1(0.0) == 1.0
    assert PHI1.derivative(1e-8) == pytest.approx(0.0, abs=1e-8)


def test_phi2_is_singular_at_origin():
    with pytest.raises(DomainError):
        PHI2(0.0)
    assert PHI2(1e-3) < 0


@pytest.mark.parametrize("sol", [PHI1, PHI2, JacobiSolution.combination(-2.5)])
@pytest.mark.parametrize("r", [0.3, 1.0, 2.5, 5.0])
def test_solutions_satisfy_the_radial_equation(sol, r):
    scale = max(1.0, abs(sol(r)), abs(sol.derivative(r, 1)), abs(sol.derivative(r, 2)))
    assert stability_residual(sol, r) / scale < 1e-10


def test_invalid_arguments():
    with pytest.raises(DomainError):
        JacobiSolution("psi")
    with pytest.raises(DomainError):
        JacobiSolution.combination(math.inf)
    with pytest.raises(DomainError):
        stability_residual(PHI1, 0.0)
    with pytest.raises(DomainError):
        stability_residual(PHI1, 9.0)
    with pytest.raises(DomainError):
        PHI1.derivative(1.0, 3)


def test_first_zeros():
    r1 = phi1_zero()
    r2 = phi2_zero(r1.root)
    assert 1.5 < r1.root ** 2 / 4.0 < 1.7
    assert r2.root == pytest.approx(0.89, abs=0.02)
    assert r2.root < r1.root
    assert r1.lo <= r1.root <= r1.hi
    assert verify_zeros().passed


def test_wronskian_closed_form():
    for xi in (0.5, 2.0, 10.0):
        value, expected = wronskian(xi)
        assert value == pytest.approx(expected, rel=1e-9)
    report = verify_wronskian([0.5, 1.0, 4.0, 12.0])
    assert report.passed
    assert report.values["max_relative_error"] < 1e-8


def test_residual_report():
    report = verify_residuals([0.5, 1.0, 2.0, 4.0])
    assert report.passed
    assert not report.values["form_mismatch"]
    assert all(v < 1e-4 for v in report.values["fd_relative"].values())


def test_shape_reports():
    phi1 = verify_phi1_shape(points=200)
    assert phi1.passed
    assert phi1.values["ratio_series_at_8"] == pytest.approx(1.0, abs=0.05)
    phi2 = verify_phi2_shape(points=400)
    assert phi2.passed
    assert phi2.values["sign_changes"] == 1


def test_lambda_grid_is_symmetric():
    grid = lambda_grid(11)
    assert len(grid) == 11
    assert 0.0 in grid
    np.testing.assert_allclose(grid, [-x for x in reversed(grid)], rtol=0, atol=0)
    assert max(grid) == pytest.approx(1e6)


def test_no_positive_radial_solution():
    report = verify_no_positive_radial([-1e3, -5.0, 0.0, 1e-6, 5.0, 1e3])
    assert report.passed, report.violations
    rows = report.values["rows"]
    assert all(row["certified"] for row in rows)
    assert all(row["positive_value"] > 0 > row["negative_value"] for row in rows)
    assert report.values["pure_multiples"] == {"phi1": True, "phi2": True}
    assert report.note


def test_no_positive_radial_rejects_bad_grid():
    with pytest.raises(DomainError):
        verify_no_positive_radial([])
    with pytest.raises(DomainError):
        verify_no_positive_radial([math.nan])


def test_sphere_comparison():
    report = verify_sphere_comparison()
    assert report.passed
    assert 1.0 < report.values["phi0"] < math.pi / 2.0
    assert legendre_profile(0.0) == pytest.approx(1.0)
    assert report.values["legendre_degree"] * (report.values["legendre_degree"] + 1) == pytest.approx(4.0)


def test_curves_rows():
    rows = curves([0.5, 1.0])
    assert [row["r"] for row in rows] == [0.5, 1.0]
    assert set(rows[0]) == {"r", "phi1", "phi2", "residual1", "residual2"}
