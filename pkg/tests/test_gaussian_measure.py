import math

import numpy as np
import pytest
from scipy import integrate

from geometry.gaussian_measure import (
    CLOSED_FORM_KINDS,
    EntropySearch,
    FunctionalCenter,
    annulus_area,
    area,
    caps_area,
    closed_form_agreement,
    cone_area,
    cylinder_area,
    ellipsoid_area,
    entropy,
    f_functional,
    gaussian_volume_ball,
    half_volume_radius,
    profile_functional,
    quadrature_area,
    random_closed_form_piece,
    ray_tubes_area,
    scaling_identity_check,
    shrinker_monotonicity_check,
    sphere_area,
    surface_area,
    translate_area_bound_check,
    vertical_tubes_area,
)
from geometry.surfaces import (
    HALF_PI,
    INF,
    CappedGraph,
    CompositeSurface,
    Cylinder,
    DoubledAnnulus,
    DoubledCone,
    Ellipsoid,
    RayTubes,
    Sphere,
    SphericalCaps,
    SweptEnds,
    VerticalTubes,
    lower_to_profile,
)
from runtime.errors import DomainError, PreconditionError

FOUR_OVER_E = 4.0 / math.e
CYLINDER_ENTROPY = math.sqrt(2.0 * math.pi / math.e)


def _quadrature(piece, spec):
    return profile_functional(lower_to_profile(piece, spec), FunctionalCenter(), spec).value


def test_normalization_pins(spec):
    assert area(DoubledAnnulus(0.0, INF, 0.0, sheets=1), spec).value == pytest.approx(1.0, abs=1e-15)
    assert area(Sphere(2.0), spec).value == pytest.approx(FOUR_OVER_E, abs=1e-12)
    assert area(Cylinder(math.sqrt(2.0), INF), spec).value == pytest.approx(CYLINDER_ENTROPY, abs=1e-12)


@pytest.mark.parametrize("piece", [
    Sphere(2.0),
    Sphere(0.7),
    Cylinder(1.3, 2.0),
    DoubledAnnulus(0.5, 3.0, 0.4),
    SphericalCaps(1.5, 0.8),
    DoubledCone(0.3, INF, 1.0, math.pi / 6),
    DoubledCone(0.1, INF, 0.5, math.pi / 3),
    DoubledCone(1.0, 4.0, 0.25, math.pi / 4),
    DoubledCone(0.5, INF, 0.0, HALF_PI),
])
def test_closed_forms_agree_with_profile_quadrature(piece, spec):
    assert area(piece, spec).value == pytest.approx(_quadrature(piece, spec), rel=1e-8, abs=1e-12)


def test_closed_forms_agree_on_random_draws(spec):
    report = closed_form_agreement(draws=10 * len(CLOSED_FORM_KINDS), seed=3, spec=spec)
    assert report.passed, report.failures[:3]
    assert report.worst_relative < 1e-8
    assert report.to_record()["failure_count"] == 0


@pytest.mark.slow
def test_closed_forms_agree_on_a_thousand_draws(spec):
    report = closed_form_agreement(draws=1000, spec=spec)
    assert report.passed, report.failures[:3]


@pytest.mark.parametrize("piece", [
    RayTubes(3, 0.2, 0.5, INF),
    RayTubes(1, 0.05, 0.0, 2.0),
    VerticalTubes(4, 0.3, 1.5, 2.0),
])
def test_tube_quadrature_matches_closed_form(piece, spec):
    assert quadrature_area(piece, spec).value == pytest.approx(area(piece, spec).value, rel=1e-9)


def test_random_piece_kinds():
    rng = np.random.default_rng(0)
    assert [random_closed_form_piece(rng, kind).tag for kind in CLOSED_FORM_KINDS] == list(CLOSED_FORM_KINDS)
    with pytest.raises(DomainError):
        random_closed_form_piece(rng, "ellipsoid")


def test_scaling_identity(spec):
    profile = lower_to_profile(Sphere(2.0), spec)
    center = FunctionalCenter((0.0, 0.0, 0.7), 1.8)
    direct = profile_functional(profile, center, spec).value
    moved = profile_functional(profile.transformed(0.7, math.sqrt(1.8)), FunctionalCenter(), spec).value
    assert moved == pytest.approx(direct, rel=1e-9)
    report = scaling_identity_check(draws=21, spec=spec)
    assert report.passed, report.failures[:3]
    assert report.draws == 21


def test_cone_limits():
    # phi = 0 is the flat doubled annulus; phi = pi/2 the half-cylinder above h
    assert cone_area(0.4, 3.0, 0.0, 0.0) == pytest.approx(annulus_area(0.4, 3.0, 0.0), rel=1e-13)
    assert cone_area(0.2, INF, 0.0, 0.0) == pytest.approx(2.0 * math.exp(-0.01), rel=1e-13)
    assert cone_area(1.0, INF, 0.0, HALF_PI) == pytest.approx(cylinder_area(1.0, INF), rel=1e-13)
    with pytest.raises(DomainError):
        cone_area(1.0, 2.0, 0.0, HALF_PI)


def test_caps_area_at_zero_offset_is_sphere():
    assert caps_area(1.7, 0.0) == pytest.approx(sphere_area(1.7), rel=1e-15)
    assert caps_area(1.7, 0.3, upper_only=True) == pytest.approx(0.5 * caps_area(1.7, 0.3))


def test_ellipsoid_limits(spec):
    assert ellipsoid_area(2.0, 2.0, spec).value == pytest.approx(FOUR_OVER_E)
    assert ellipsoid_area(3.0, 0.0, spec).value == pytest.approx(2.0 * (1.0 - math.exp(-9.0 / 4.0)))
    thin = ellipsoid_area(3.0, 1e-6, spec).value
    assert thin == pytest.approx(2.0 * (1.0 - math.exp(-9.0 / 4.0)), rel=1e-5)
    assert ellipsoid_area(2.0, 1.0, spec).value == pytest.approx(_quadrature(Ellipsoid(2.0, 1.0), spec),
                                                                  rel=1e-8)


def test_capped_graph_at_b_equal_h_is_a_plane(spec):
    res = area(CappedGraph(0.4, 3.0, 0.4), spec)
    assert res.value == pytest.approx(math.exp(-0.04), rel=1e-12)


def test_tube_areas_against_direct_integration():
    # a thin tube around a ray: radius eps, circumference 2 pi eps, weight e^{-s^2/4}
    eps = 1e-3
    direct, _ = integrate.quad(lambda s: 2 * math.pi * eps * math.exp(-s * s / 4.0) / (4 * math.pi),
                               0.0, math.inf)
    assert ray_tubes_area(1, eps, 0.0, INF) == pytest.approx(direct, rel=1e-6)
    # vertical tubes vanish with their radius
    assert vertical_tubes_area(3, 1e-9, 2.0, 0.1) < 1e-8


def test_swept_ends_reports_budget_constant(spec):
    res = area(SweptEnds(2.0, 10.0, 0.1, 0.5), spec)
    assert res.method == "budget"
    assert res.detail["E"] == pytest.approx(res.value / (100.0 * math.exp(-25.0)))
    assert res.value >= caps_area(2.0, 10.0)


def test_off_center_functional_closed_vs_quadrature(spec):
    center = FunctionalCenter((0.0, 0.0, 0.7), 1.8)
    sphere = CompositeSurface.of("S", Sphere(2.0))
    closed = f_functional(sphere, center, spec).value
    cone = CompositeSurface.of("C", DoubledCone(0.5, 3.0, 0.2, 0.4))
    assert f_functional(cone, center, spec).method == "quadrature"
    profile = lower_to_profile(Sphere(2.0), spec)
    assert closed == pytest.approx(profile_functional(profile, center, spec).value, rel=1e-9)


def test_off_axis_cylinder_uses_bessel_kernel(spec):
    center = FunctionalCenter((0.6, 0.0, 0.0), 1.0)
    cylinder = CompositeSurface.of("Cyl", Cylinder(1.2, 1.5))
    closed = f_functional(cylinder, center, spec).value
    profile = lower_to_profile(Cylinder(1.2, 1.5), spec)
    assert closed == pytest.approx(profile_functional(profile, center, spec).value, rel=1e-9)


def test_functional_center_validation():
    with pytest.raises(DomainError):
        FunctionalCenter(tau=0.0)
    with pytest.raises(DomainError):
        FunctionalCenter((0.0, 0.0))


def test_entropy_of_sphere_and_plane(spec):
    search = EntropySearch(tau_points=41, y_points=5, rounds=1)
    sphere = entropy(CompositeSurface.of("S(2)", Sphere(2.0)), search, spec)
    assert sphere.value == pytest.approx(FOUR_OVER_E, abs=1e-9)
    assert sphere.center.tau == pytest.approx(1.0, rel=1e-6)
    plane = entropy(CompositeSurface.of("plane", DoubledAnnulus(0.0, INF, 0.0, sheets=1)), search, spec)
    assert plane.value == pytest.approx(1.0, abs=1e-12)


def test_surface_area_sums_pieces(spec):
    surface = CompositeSurface.of("two", Sphere(2.0), DoubledAnnulus(3.0, INF, 0.0))
    expected = FOUR_OVER_E + annulus_area(3.0, INF, 0.0)
    assert surface_area(surface, spec).value == pytest.approx(expected, rel=1e-13)


def test_gaussian_volume():
    total = gaussian_volume_ball(INF).value
    assert total == pytest.approx(0.54433, abs=1e-5)
    assert gaussian_volume_ball(0.0).value == 0.0
    radius = half_volume_radius()
    assert gaussian_volume_ball(radius).value == pytest.approx(0.5 * total, abs=1e-10)
    with pytest.raises(DomainError):
        gaussian_volume_ball(-1.0)


def test_translation_inequality_holds_on_upper_pieces(spec):
    for piece in (SphericalCaps(2.0, 0.5, upper_only=True),
                  DoubledAnnulus(1.0, 4.0, 0.3, sheets=1),
                  CappedGraph(0.2, 3.5, 1.0)):
        for h in (0.0, 0.5, 2.0):
            report = translate_area_bound_check(piece, h, spec)
            assert report.passed, (piece, h, report)


def test_translation_inequality_requires_upper_half_space(spec):
    with pytest.raises(PreconditionError):
        translate_area_bound_check(SphericalCaps(2.0, 0.5), 1.0, spec)
    with pytest.raises(DomainError):
        translate_area_bound_check(SphericalCaps(2.0, 0.5, upper_only=True), -1.0, spec)


def test_shrinker_monotonicity(spec):
    sphere = CompositeSurface.of("S(2)", Sphere(2.0))
    report = shrinker_monotonicity_check(sphere, (0.3, -0.2, 0.5), 0.25, np.linspace(0.0, 3.0, 16), spec)
    assert report.passed
    assert report.values[0] == pytest.approx(FOUR_OVER_E)
    with pytest.raises(PreconditionError):
        shrinker_monotonicity_check(sphere, (0.0, 0.0, 1.0), -1.0, [0.0, 2.0], spec)
