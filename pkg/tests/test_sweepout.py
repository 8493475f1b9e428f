import math

import pytest

from geometry.gaussian_measure import AreaResult
from geometry.surfaces import HALF_PI, Cylinder, DoubledCone, Sphere, SweptEnds
from runtime.errors import DomainError
from verifiers.sweepout import (
    DELTA1,
    H_INEQUALITIES,
    OMEGA_INEQUALITIES,
    StepProfile,
    SweepoutParams,
    _right_edge_ellipsoids,
    check_inequalities,
    edge_variant_profiles,
    ellipsoid_height,
    inversion_max_area,
    measure_small_body_constant,
    measure_tube_constant,
    opening_stage,
    parameter_monotonicity,
    r_max,
    r_necks,
    riemann_hurwitz_genus,
    riemann_hurwitz_table,
    select_parameters,
    small_body_area,
    squeeze_translation_gap,
    step_area_profile,
    step_bound,
    step_surface,
    step_terms,
)


def _params(h: float = 5e-4, omega: float = 12.0, R: float = 1.0) -> SweepoutParams:
    thresholds = {"h0": 0.1, "h1": 1.0, "h2": 1.0, "h3": 1.0, "h4": 1.0, "h_c": math.inf,
                  "omega1": 2.0, "omega2": 2.0, "omega3": 2.0}
    return SweepoutParams(g=1, R=R, h=h, omega=omega, eps=h ** 3, delta_tubes=h ** 3,
                          A=math.sqrt(math.pi), B=1.5, E=1.0, F=1.0, catenoid_c=0.125,
                          thresholds=thresholds, eta1=1e-3, eta2=0.05, iota=0.05, delta2=0.02)


def test_neck_radii():
    assert r_max(1.0) == 0.5
    assert r_max(4.0) == 3.0
    assert r_necks(4.0) == 3.5
    assert r_necks(0.2) == pytest.approx(0.15)


def test_small_body_is_quadratic():
    for h in (1e-4, 1e-3, 1e-2):
        assert small_body_area(h) / (h * h) == pytest.approx(1.5, rel=1e-3)
    assert measure_small_body_constant() == pytest.approx(1.5, rel=1e-3)


@pytest.mark.parametrize("count", [2, 6, 21])
def test_tube_constant(count):
    assert measure_tube_constant(count) == pytest.approx(count * math.sqrt(math.pi) / 2.0, rel=1e-6)


def test_inequalities_hold_for_feasible_parameters():
    rows = check_inequalities(_params())
    assert {row["name"] for row in rows} >= {"step1_small_body", "step3_inner", "step5_ends"}
    assert all(row["ok"] for row in rows), [r for r in rows if not r["ok"]]


def test_inequalities_report_failures():
    by_name = {row["name"]: row for row in check_inequalities(_params(), h=1e-3)}
    # 5h alone reaches delta2 / 4
    assert not by_name["step3_inner"]["ok"]
    by_name = {row["name"]: row for row in check_inequalities(_params(), omega=3.0)}
    assert not by_name["step3_ends"]["ok"]
    assert by_name["omega_above_thresholds"]["ok"]


def test_inequalities_split_into_h_and_omega_groups():
    names = {row["name"] for row in check_inequalities(_params())}
    assert set(H_INEQUALITIES) | set(OMEGA_INEQUALITIES) == names
    assert not set(H_INEQUALITIES) & set(OMEGA_INEQUALITIES)


def test_shrinking_h_and_growing_omega_keep_the_inequalities():
    report = parameter_monotonicity(_params())
    assert report["passed"]
    assert report["breaks"] == []
    # Omega = 3 fails step3_ends; larger Omega only repairs it
    assert parameter_monotonicity(_params(omega=3.0))["passed"]


def test_monotonicity_reports_a_break():
    # a factor above one grows h past the h0 threshold
    report = parameter_monotonicity(_params(h=0.08), h_factors=(1.0, 2.0))
    assert not report["passed"]
    assert {"name": "h_below_thresholds", "h": 0.16} in report["breaks"]


def test_step_terms_validate_arguments():
    p = _params()
    with pytest.raises(DomainError):
        step_terms(1, 1.0, 0.0, p)
    with pytest.raises(DomainError):
        step_terms(5, 1.0, 0.5, p)
    with pytest.raises(DomainError):
        step_terms(6, 1.0, 0.5, p)
    with pytest.raises(DomainError):
        step_terms(2, 1.0, 1.5, p)


def test_step_one_starts_from_the_sphere():
    p = _params()
    terms, removed = step_terms(1, 1.0, 1.0, p)
    assert terms[0] == ("sphere", Sphere(1.0))
    assert [name for name, _ in terms].count("tubes") == 1
    assert removed > 0


def test_step_surface_collects_the_terms():
    p = _params()
    terms, _ = step_terms(2, 1.0, 0.5, p)
    surface = step_surface(2, 1.0, 0.5, p)
    assert surface.label == "step2 R=1 t=0.5"
    assert [piece for piece, _ in surface.pieces] == [piece for _, piece in terms]


def test_step_five_starts_where_step_four_ends():
    p = _params()
    assert step_terms(5, 1.0, 0.0, p) == step_terms(4, 1.0, 1.0, p)


def test_opening_stage_fold_and_literal():
    h = 5e-4
    stage = opening_stage(1.0, 12.0, h, 0.0)
    assert stage[0] == ("cylinder", Cylinder(1.0, 12.0))
    assert isinstance(stage[1][1], SweptEnds)
    _, flat = opening_stage(1.0, 12.0, h, 1.0)[0]
    assert isinstance(flat, DoubledCone)
    assert flat.inclination == 0.0 and flat.offset == h
    assert flat.r_outer == pytest.approx(13.0 - h)
    _, vertical = opening_stage(1.0, 12.0, h, 1.0, "literal")[0]
    assert vertical == DoubledCone(1.0, math.inf, h, HALF_PI)
    with pytest.raises(DomainError):
        opening_stage(1.0, 12.0, h, 0.5, "sideways")


def test_step_bounds():
    p = _params()
    assert step_bound(1, p) == 2.0
    assert step_bound(2, p) == 2.0 - DELTA1 / 2.0
    assert step_bound(3, p) == pytest.approx(1.99)
    assert step_bound(4, p) == pytest.approx(2.0 - 0.0125)


def test_step_five_interior_is_charged_to_catenoid_budget(spec):
    p = _params()
    profile = step_area_profile(5, 1.0, p, [0.0, 0.5, 1.0], spec)
    assert profile.areas[1].method == "budget"
    assert profile.areas[1].value == pytest.approx(2.0 - 0.125 * p.h ** 2)
    assert profile.extra["endpoint_bound"] == pytest.approx(2.0 - p.h ** 2 / 4.0)
    assert profile.extra["endpoint_area"] == profile.areas[-1].value


def test_step_profile_bookkeeping():
    areas = tuple(AreaResult(v, 0.0, "closed_form") for v in (1.9, 2.1, 1.0))
    profile = StepProfile("x", 1, 1.0, (0.0, 0.5, 1.0), areas, ({}, {"a": 1.0}, {}), 2.0)
    assert profile.max_area == 2.1
    assert profile.argmax_t == 0.5
    assert profile.offending_t == [0.5]
    assert not profile.passed
    assert profile.budget_breakdown == {"a": 1.0}
    record = profile.to_record()
    assert record["margin"] == pytest.approx(-0.1)
    assert record["gating"] is True


def test_ellipsoid_height_endpoints():
    assert ellipsoid_height(0.1, 2.0, 0.0) == 0.1
    assert ellipsoid_height(0.1, 2.0, 1.0) == pytest.approx(2.0)


@pytest.mark.parametrize("lam, lam_prime, expected", [
    (2.0, 3.0, 1.273522),
    (1.9, 2.94, 1.32145),
])
def test_squeeze_translation_gap(lam, lam_prime, expected):
    rho = squeeze_translation_gap(lam, lam_prime)
    assert rho == pytest.approx(expected, abs=2e-5)
    assert rho >= 2.0 * math.sqrt(math.log(lam_prime / lam))
    assert lam_prime * math.exp(-rho * rho / 4.0) < lam


def test_squeeze_translation_gap_domain():
    with pytest.raises(DomainError):
        squeeze_translation_gap(3.0, 2.0)
    with pytest.raises(DomainError):
        squeeze_translation_gap(0.0, 2.0)


def test_riemann_hurwitz():
    assert riemann_hurwitz_genus(2, 0, 2, 3) == 3
    assert riemann_hurwitz_genus(1, 1, 1, 7) == 0
    assert riemann_hurwitz_genus(4, 0, 1, 5) == 6
    with pytest.raises(DomainError):
        riemann_hurwitz_genus(2, 0, 0, 2)
    with pytest.raises(DomainError):
        riemann_hurwitz_genus(1, 0, 1, 1)
    with pytest.raises(DomainError):
        riemann_hurwitz_genus(-1, 1, 1, 1)


def test_riemann_hurwitz_table():
    rows = riemann_hurwitz_table(range(1, 4))
    assert len(rows) == 12
    assert all(row["ok"] for row in rows)
    assert [row["rejected"] for row in rows if row["data"] == [2, 0, 0]] == [True] * 3


def test_edge_variants_need_the_rectangle_edges():
    with pytest.raises(DomainError):
        edge_variant_profiles(_params(R=1.0), _params(R=5.0))


def test_select_parameters_rejects_bad_input():
    with pytest.raises(DomainError):
        select_parameters(0, 1.0)
    with pytest.raises(DomainError):
        select_parameters(1, 6.0)


@pytest.mark.slow
def test_inversion_stays_below_two(spec):
    params = select_parameters(1, 1.0, spec=spec)
    assert params.h == pytest.approx(9.997e-4, rel=1e-3)
    assert params.B == pytest.approx(1.5, rel=1e-3)
    assert params.omega >= params.R
    assert all(row["ok"] for row in params.inequalities)
    result = inversion_max_area(1.0, params, resolution=21, spec=spec)
    assert result.max_area < 2.0
    assert result.passed
    assert len(result.continuity_gaps) == 4


def test_right_edge_ellipsoids_compare_against_their_budget(spec):
    profile = _right_edge_ellipsoids(_params(R=5.0), [0.0, 0.5, 1.0], spec)
    budget = profile.extra["budget_rhs"]
    assert budget == pytest.approx(2.0 - 0.0365 + 2.0 * math.exp(-6.25), abs=5e-3)
    assert profile.extra["budget_ok"] == (profile.max_area <= budget)
    assert profile.passed == (profile.max_area < 2.0 and profile.extra["budget_ok"])
