import math

import pytest

from geometry.surfaces import (
    HALF_PI,
    INF,
    CappedGraph,
    CompositeSurface,
    Cylinder,
    DoubledAnnulus,
    DoubledCone,
    Ellipsoid,
    MeridianSegment,
    RayTubes,
    RayTubeSegment,
    Sphere,
    SphericalCaps,
    SweptEnds,
    VerticalTubes,
    _decode,
    _encode,
    lower_to_profile,
    piece_from_dict,
    piece_to_dict,
    surface_from_dict,
    surface_to_dict,
)
from runtime.errors import DomainError


@pytest.mark.parametrize("build", [
    lambda: DoubledAnnulus(2.0, 1.0, 0.0),
    lambda: DoubledAnnulus(0.0, 1.0, -0.1),
    lambda: DoubledAnnulus(0.0, 1.0, 0.0, sheets=3),
    lambda: Cylinder(0.0, 1.0),
    lambda: Sphere(INF),
    lambda: SphericalCaps(1.0, -1.0),
    lambda: DoubledCone(1.0, 2.0, 0.0, 2.0),
    lambda: DoubledCone(1.0, 2.0, 0.0, HALF_PI),
    lambda: Ellipsoid(1.0, 2.0),
    lambda: CappedGraph(0.5, 3.0, 0.2),
    lambda: CappedGraph(0.0, 3.0, 1.0, r_max=2.0),
    lambda: RayTubes(0, 0.1),
    lambda: VerticalTubes(2, 0.1, 1.0, INF),
    lambda: SweptEnds(1.0, 0.5, 1.0, 0.0),
    lambda: SweptEnds(1.0, 5.0, 0.1, 0.5, convention="sideways"),
])
def test_invalid_pieces_raise_domain_error(build):
    with pytest.raises(DomainError):
        build()


def test_capped_graph_joint_radius():
    assert CappedGraph(0.0, 3.0, 1.0).joint_radius == pytest.approx(3.0)
    assert CappedGraph(1.0, 3.0, 1.0).joint_radius == 0.0
    assert CappedGraph(0.0, 3.0, 0.0).joint_radius == 0.0
    assert CappedGraph(0.5, 4.0, 1.0).joint_radius == pytest.approx(4.0 * math.sqrt(0.75))


def test_infinite_pieces_carry_tail_bounds(spec):
    plane = lower_to_profile(DoubledAnnulus(0.0, INF, 0.0, sheets=1), spec)
    assert 0 < plane.tail_bound <= 1e-17
    (seg,) = plane.segments
    assert seg.u1 == pytest.approx(spec.truncation_radius())
    cylinder = lower_to_profile(Cylinder(1.0, INF), spec)
    assert cylinder.tail_bound > 0
    assert lower_to_profile(Sphere(2.0), spec).tail_bound == 0.0


def test_doubled_annulus_at_zero_height_counts_twice(spec):
    (seg,) = lower_to_profile(DoubledAnnulus(0.0, 1.0, 0.0), spec).segments
    assert seg.multiplicity == 2 and not seg.mirror
    (seg,) = lower_to_profile(DoubledAnnulus(0.0, 1.0, 0.5), spec).segments
    assert seg.multiplicity == 1 and seg.mirror


def test_cone_meridian_starts_at_inner_rim(spec):
    (seg,) = lower_to_profile(DoubledCone(1.0, 3.0, 0.5, math.pi / 4), spec).segments
    r0, z0, speed = seg.curve(seg.u0)
    r1, z1, _ = seg.curve(seg.u1)
    assert (r0, z0) == pytest.approx((1.0, 0.5))
    assert r1 == pytest.approx(3.0)
    assert z1 == pytest.approx(2.5)
    assert speed == pytest.approx(1.0)


def test_capped_graph_lowers_to_cap_and_sheet(spec):
    profile = lower_to_profile(CappedGraph(0.5, 3.0, 1.0, sheets=2, r_max=6.0), spec)
    cap, sheet = profile.segments
    assert cap.mirror and sheet.mirror
    r, z, _ = cap.curve(cap.u1)
    assert z == pytest.approx(0.5)
    assert r == pytest.approx(CappedGraph(0.5, 3.0, 1.0).joint_radius)
    assert sheet.u1 == 6.0


def test_swept_ends_fold_rim_is_quarter_circle_at_t_one(spec):
    profile = lower_to_profile(SweptEnds(2.0, 10.0, 0.1, 1.0), spec)
    caps, rim = profile.segments
    assert rim.u1 == pytest.approx(HALF_PI)
    r, z, speed = rim.curve(0.0)
    assert (r, z) == pytest.approx((2.0, 10.0))
    assert speed == pytest.approx(9.9)
    assert lower_to_profile(SweptEnds(2.0, 10.0, 0.1, 0.0), spec).segments[1:] == ()


def test_tubes_lower_to_closed_form_segments(spec):
    (seg,) = lower_to_profile(RayTubes(3, 0.01, 0.5, 4.0), spec).segments
    assert isinstance(seg, RayTubeSegment) and seg.count == 3
    assert not isinstance(seg, MeridianSegment)


def test_translated_profile_moves_z_range(spec):
    profile = lower_to_profile(SphericalCaps(2.0, 0.0, upper_only=True), spec)
    lo, hi = profile.z_range()
    lo2, hi2 = profile.translated(1.5).z_range()
    assert lo2 == pytest.approx(lo + 1.5)
    assert hi2 == pytest.approx(hi + 1.5)


def test_surface_json_round_trip():
    surface = CompositeSurface.of("mixed", Cylinder(1.0, INF), DoubledCone(0.2, INF, 0.0, 0.3),
                                  RayTubes(2, 1e-3))
    data = surface_to_dict(surface)
    assert data["pieces"][0]["half_height"] == "inf"
    assert surface_from_dict(data) == surface


def test_infinite_values_decode_with_their_sign():
    assert _decode(_encode(-INF)) == -INF
    assert _decode("-Infinity") == -INF
    assert _decode(_encode(INF)) == INF
    assert _decode("infinite") == "infinite"


def test_piece_from_dict_rejects_unknown_input():
    with pytest.raises(DomainError):
        piece_from_dict({"piece": "torus", "radius": 1.0})
    with pytest.raises(DomainError):
        piece_from_dict({"piece": "sphere", "radius": 1.0, "colour": "red"})
    with pytest.raises(DomainError):
        surface_from_dict({"label": "no pieces"})
    assert piece_from_dict(piece_to_dict(Sphere(2.0))) == Sphere(2.0)
