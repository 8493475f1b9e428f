"""Catalogue of rotationally symmetric surface pieces and their radial profiles.

Every piece lowers to a :class:`RadialProfile`: meridian curves u -> (r, z) revolved
about the z-axis, plus the two tube families, which are not surfaces of revolution
about the axis and get their own segment kinds. Infinite extents are cut where the
Gaussian weight drops below the quadrature truncation threshold; the discarded tail
is bounded analytically and carried in ``RadialProfile.tail_bound``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Any, Callable, ClassVar, Union

from numerics.quadrature import QuadratureSpec
from runtime.errors import DomainError

INF = math.inf
HALF_PI = 0.5 * math.pi

Curve = Callable[[float], tuple[float, float, float]]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


# ── pieces ──────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class DoubledAnnulus:
    """D(R1, R2, h): the annulus R1 <= r <= R2 at heights +h and -h.

    ``sheets=1`` keeps only the sheet at +h (a single plane or annulus). At h = 0 the
    two sheets coincide and the area counts twice.
    """

    tag: ClassVar[str] = "annulus"
    r_inner: float
    r_outer: float
    h: float
    sheets: int = 2

    def __post_init__(self) -> None:
        _require(self.r_inner >= 0, "annulus: r_inner must be >= 0")
        _require(self.r_outer > self.r_inner, "annulus: r_outer must exceed r_inner")
        _require(self.h >= 0 and math.isfinite(self.h), "annulus: h must be finite and >= 0")
        _require(self.sheets in (1, 2), "annulus: sheets must be 1 or 2")


@dataclass(frozen=True)
class Cylinder:
    """Cyl(R, h): radius R, |z| <= h."""

    tag: ClassVar[str] = "cylinder"
    radius: float
    half_height: float

    def __post_init__(self) -> None:
        _require(0 < self.radius < INF, "cylinder: radius must be positive and finite")
        _require(self.half_height > 0, "cylinder: half_height must be positive")


@dataclass(frozen=True)
class Sphere:
    tag: ClassVar[str] = "sphere"
    radius: float

    def __post_init__(self) -> None:
        _require(0 < self.radius < INF, "sphere: radius must be positive and finite")


@dataclass(frozen=True)
class SphericalCaps:
    """S(R, h): the upper hemisphere lifted by h and the lower one lowered by h."""

    tag: ClassVar[str] = "caps"
    radius: float
    offset: float
    upper_only: bool = False

    def __post_init__(self) -> None:
        _require(0 < self.radius < INF, "caps: radius must be positive and finite")
        _require(0 <= self.offset < INF, "caps: offset must be finite and >= 0")


@dataclass(frozen=True)
class DoubledCone:
    """C(R1, R2, h, phi): segment leaving (R1, h) at inclination phi, and its mirror."""

    tag: ClassVar[str] = "cone"
    r_inner: float
    r_outer: float
    offset: float
    inclination: float

    def __post_init__(self) -> None:
        _require(0 <= self.r_inner < INF, "cone: r_inner must be finite and >= 0")
        _require(self.r_outer > self.r_inner, "cone: r_outer must exceed r_inner")
        _require(0 <= self.offset < INF, "cone: offset must be finite and >= 0")
        _require(0 <= self.inclination <= HALF_PI, "cone: inclination must lie in [0, pi/2]")
        if self.inclination == HALF_PI and math.isfinite(self.r_outer):
            raise DomainError("cone: vertical cone with finite r_outer; use a Cylinder")


@dataclass(frozen=True)
class Ellipsoid:
    """E(a, b): r^2/a^2 + z^2/b^2 = 1 with b <= a; b = 0 is the doubled disk."""

    tag: ClassVar[str] = "ellipsoid"
    a: float
    b: float

    def __post_init__(self) -> None:
        _require(0 < self.a < INF, "ellipsoid: a must be positive and finite")
        _require(0 <= self.b <= self.a, "ellipsoid: b must lie in [0, a]")


@dataclass(frozen=True)
class CappedGraph:
    """z_{h,a,b}: the ellipse cap above height h joined to the plane z = h.

    ``sheets=2`` adds the mirror image below; ``r_max`` truncates the plane part.
    """

    tag: ClassVar[str] = "graph"
    h: float
    a: float
    b: float
    sheets: int = 1
    r_max: float = INF

    def __post_init__(self) -> None:
        _require(self.h >= 0, "graph: h must be >= 0")
        _require(0 < self.a < INF, "graph: a must be positive and finite")
        _require(self.h <= self.b <= self.a, "graph: need h <= b <= a")
        _require(self.sheets in (1, 2), "graph: sheets must be 1 or 2")
        _require(self.r_max >= self.a, "graph: r_max must be >= a")

    @property
    def joint_radius(self) -> float:
        if self.b == 0:
            return 0.0
        return self.a * math.sqrt(max(0.0, 1.0 - (self.h / self.b) ** 2))


@dataclass(frozen=True)
class RayTubes:
    """Boundaries of radius-eps tubes around ``count`` rays of the plane z = 0."""

    tag: ClassVar[str] = "ray_tubes"
    count: int
    radius: float
    r_min: float = 0.0
    r_max: float = INF

    def __post_init__(self) -> None:
        _require(self.count >= 1, "ray_tubes: count must be positive")
        _require(0 < self.radius < INF, "ray_tubes: radius must be positive")
        _require(0 <= self.r_min < self.r_max, "ray_tubes: need 0 <= r_min < r_max")


@dataclass(frozen=True)
class VerticalTubes:
    """V(R, h, delta): ``count`` vertical tubes of radius delta on a ring, |z| <= half_height."""

    tag: ClassVar[str] = "vertical_tubes"
    count: int
    radius: float
    ring_radius: float
    half_height: float

    def __post_init__(self) -> None:
        _require(self.count >= 1, "vertical_tubes: count must be positive")
        _require(0 < self.radius < INF, "vertical_tubes: radius must be positive")
        _require(0 < self.ring_radius < INF, "vertical_tubes: ring_radius must be positive")
        _require(0 < self.half_height < INF, "vertical_tubes: half_height must be positive")


@dataclass(frozen=True)
class SweptEnds:
    """Ends(R, Omega, h, t) = S(R, Omega) plus the set B swept by the cone's outer rim.

    ``fold``: the cone inclination is (1 - t) pi/2, so the rim travels on the circle of
    radius Omega - h about (R, h). ``literal``: inclination t pi/2 with radial extent
    sin(t pi/2)(Omega - h), which sends the rim to infinity as t -> 1.
    """

    tag: ClassVar[str] = "ends"
    R: float
    omega: float
    h: float
    t: float
    convention: str = "fold"

    def __post_init__(self) -> None:
        _require(0 < self.R < INF, "ends: R must be positive")
        _require(0 <= self.h < self.omega < INF, "ends: need 0 <= h < Omega")
        _require(0 <= self.t <= 1, "ends: t must lie in [0, 1]")
        _require(self.convention in ("fold", "literal"), "ends: convention must be fold or literal")


Piece = Union[DoubledAnnulus, Cylinder, Sphere, SphericalCaps, DoubledCone, Ellipsoid,
              CappedGraph, RayTubes, VerticalTubes, SweptEnds]

PIECE_TYPES: dict[str, type] = {
    cls.tag: cls
    for cls in (DoubledAnnulus, Cylinder, Sphere, SphericalCaps, DoubledCone, Ellipsoid,
                CappedGraph, RayTubes, VerticalTubes, SweptEnds)
}


@dataclass(frozen=True)
class CompositeSurface:
    pieces: tuple[tuple[Piece, int], ...]
    label: str = ""

    def __post_init__(self) -> None:
        _require(len(self.pieces) > 0, "composite surface must have at least one piece")
        for piece, multiplicity in self.pieces:
            _require(multiplicity in (1, 2), f"multiplicity must be 1 or 2, got {multiplicity}")
            _require(isinstance(piece, tuple(PIECE_TYPES.values())), f"not a surface piece: {piece!r}")

    @classmethod
    def of(cls, label: str, *pieces: Piece) -> "CompositeSurface":
        return cls(tuple((p, 1) for p in pieces), label)


# ── profiles ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MeridianSegment:
    """u -> (r, z, |d(r,z)/du|) on [u0, u1], revolved about the z-axis."""

    curve: Curve
    u0: float
    u1: float
    multiplicity: int = 1
    mirror: bool = False
    kind: ClassVar[str] = "meridian"

    def points(self, n: int = 65) -> list[tuple[float, float]]:
        if self.u1 <= self.u0:
            return []
        step = (self.u1 - self.u0) / (n - 1)
        out = []
        for i in range(n):
            r, z, _ = self.curve(self.u0 + i * step)
            out.append((r, z))
            if self.mirror:
                out.append((r, -z))
        return out


@dataclass(frozen=True)
class RayTubeSegment:
    """``count`` horizontal tubes of radius ``radius`` around rays at height z, s in [s0, s1]."""

    count: int
    radius: float
    s0: float
    s1: float
    z: float = 0.0
    multiplicity: int = 1
    kind: ClassVar[str] = "ray_tube"

    def points(self, n: int = 2) -> list[tuple[float, float]]:
        return [(self.s0, self.z - self.radius), (self.s1, self.z + self.radius)]


@dataclass(frozen=True)
class VerticalTubeSegment:
    count: int
    radius: float
    ring_radius: float
    z_lo: float
    z_hi: float
    multiplicity: int = 1
    kind: ClassVar[str] = "vertical_tube"

    def points(self, n: int = 2) -> list[tuple[float, float]]:
        return [(self.ring_radius, self.z_lo), (self.ring_radius, self.z_hi)]


Segment = Union[MeridianSegment, RayTubeSegment, VerticalTubeSegment]


@dataclass(frozen=True)
class RadialProfile:
    segments: tuple[Segment, ...]
    tail_bound: float = 0.0
    label: str = ""

    def z_range(self) -> tuple[float, float]:
        zs = [z for seg in self.segments for _, z in seg.points()]
        if not zs:
            return 0.0, 0.0
        return min(zs), max(zs)

    def transformed(self, shift_z: float = 0.0, scale: float = 1.0) -> "RadialProfile":
        """Profile of (Sigma - shift_z k) / scale; mirrored segments become explicit."""
        _require(scale > 0, "scale must be positive")
        out: list[Segment] = []
        for seg in self.segments:
            if isinstance(seg, MeridianSegment):
                for sign in ((1.0, -1.0) if seg.mirror else (1.0,)):
                    out.append(MeridianSegment(_moved(seg.curve, sign, shift_z, scale),
                                               seg.u0, seg.u1, seg.multiplicity, False))
            elif isinstance(seg, RayTubeSegment):
                out.append(replace(seg, radius=seg.radius / scale, s0=seg.s0 / scale,
                                   s1=seg.s1 / scale, z=(seg.z - shift_z) / scale))
            else:
                out.append(replace(seg, radius=seg.radius / scale,
                                   ring_radius=seg.ring_radius / scale,
                                   z_lo=(seg.z_lo - shift_z) / scale,
                                   z_hi=(seg.z_hi - shift_z) / scale))
        return RadialProfile(tuple(out), self.tail_bound, self.label)

    def translated(self, dz: float) -> "RadialProfile":
        return self.transformed(shift_z=-dz, scale=1.0)


def _moved(curve: Curve, sign: float, shift_z: float, scale: float) -> Curve:
    def moved(u: float) -> tuple[float, float, float]:
        r, z, speed = curve(u)
        return r / scale, (sign * z - shift_z) / scale, speed / scale

    return moved


# ── lowering ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Window:
    """Where the functional is centred: distance of y from the origin and the scale tau."""

    distance: float = 0.0
    tau: float = 1.0


def _line(r0: float, z0: float, dr: float, dz: float) -> Curve:
    speed = math.hypot(dr, dz)

    def curve(u: float) -> tuple[float, float, float]:
        return r0 + u * dr, z0 + u * dz, speed

    return curve


def _circle(center_r: float, center_z: float, radius: float) -> Curve:
    # angle measured from the vertical: (r, z) = c + radius (sin u, cos u)
    def curve(u: float) -> tuple[float, float, float]:
        return center_r + radius * math.sin(u), center_z + radius * math.cos(u), radius

    return curve


def _ellipse(a: float, b: float) -> Curve:
    def curve(u: float) -> tuple[float, float, float]:
        s, c = math.sin(u), math.cos(u)
        return a * s, b * c, math.sqrt((a * c) ** 2 + (b * s) ** 2)

    return curve


def _planar_tail(spec: QuadratureSpec, window: Window) -> float:
    # one sheet beyond the cut radius: e^{-d^2/4tau}(1 + c sqrt(pi/tau)/2) with e^{-d^2/4tau} = threshold
    return spec.truncation_threshold * (1.0 + 0.5 * window.distance * math.sqrt(math.pi / window.tau))


def _axial_tail(radius: float, spec: QuadratureSpec, window: Window) -> float:
    return 0.5 * radius * math.sqrt(math.pi / window.tau) * spec.truncation_threshold


def lower_to_profile(piece: Piece, spec: QuadratureSpec | None = None,
                     window: Window | None = None) -> RadialProfile:
    spec = spec or QuadratureSpec()
    window = window or Window()
    cut = window.distance + spec.truncation_radius(window.tau)
    label = piece.tag

    if isinstance(piece, DoubledAnnulus):
        tail = 0.0
        r_end = piece.r_outer
        if math.isinf(r_end):
            r_end = max(piece.r_inner, math.sqrt(max(cut * cut - piece.h * piece.h, 0.0)))
            tail = piece.sheets * _planar_tail(spec, window)
        if piece.sheets == 2 and piece.h == 0:
            seg = MeridianSegment(_line(0.0, 0.0, 1.0, 0.0), piece.r_inner, r_end, multiplicity=2)
        else:
            seg = MeridianSegment(_line(0.0, piece.h, 1.0, 0.0), piece.r_inner, r_end,
                                  mirror=piece.sheets == 2)
        return RadialProfile((seg,), tail, label)

    if isinstance(piece, Cylinder):
        tail = 0.0
        z_end = piece.half_height
        if math.isinf(z_end):
            z_end = cut
            tail = 2 * _axial_tail(piece.radius, spec, window)
        seg = MeridianSegment(_line(piece.radius, 0.0, 0.0, 1.0), 0.0, z_end, mirror=True)
        return RadialProfile((seg,), tail, label)

    if isinstance(piece, Sphere):
        seg = MeridianSegment(_circle(0.0, 0.0, piece.radius), 0.0, HALF_PI, mirror=True)
        return RadialProfile((seg,), 0.0, label)

    if isinstance(piece, SphericalCaps):
        seg = MeridianSegment(_circle(0.0, piece.offset, piece.radius), 0.0, HALF_PI,
                              mirror=not piece.upper_only)
        return RadialProfile((seg,), 0.0, label)

    if isinstance(piece, DoubledCone):
        phi = piece.inclination
        dr, dz = math.cos(phi), math.sin(phi)
        tail = 0.0
        if phi == HALF_PI:
            dr = 0.0
            length = max(cut - piece.offset, 0.0)
            tail = 2 * _axial_tail(piece.r_inner, spec, window)
        elif math.isinf(piece.r_outer):
            length = cut + math.hypot(piece.r_inner, piece.offset)
            tail = 2 * 2 * _planar_tail(spec, window)
        else:
            length = (piece.r_outer - piece.r_inner) / dr
        seg = MeridianSegment(_line(piece.r_inner, piece.offset, dr, dz), 0.0, length, mirror=True)
        return RadialProfile((seg,), tail, label)

    if isinstance(piece, Ellipsoid):
        if piece.b == 0:
            seg = MeridianSegment(_line(0.0, 0.0, 1.0, 0.0), 0.0, piece.a, multiplicity=2)
        else:
            seg = MeridianSegment(_ellipse(piece.a, piece.b), 0.0, HALF_PI, mirror=True)
        return RadialProfile((seg,), 0.0, label)

    if isinstance(piece, CappedGraph):
        mirror = piece.sheets == 2
        r0 = piece.joint_radius
        r_end = piece.r_max
        tail = 0.0
        if math.isinf(r_end):
            r_end = max(r0, math.sqrt(max(cut * cut - piece.h * piece.h, 0.0)))
            tail = piece.sheets * _planar_tail(spec, window)
        segments: list[Segment] = []
        if piece.b > piece.h:
            theta0 = math.acos(piece.h / piece.b)
            segments.append(MeridianSegment(_ellipse(piece.a, piece.b), 0.0, theta0, mirror=mirror))
        segments.append(MeridianSegment(_line(0.0, piece.h, 1.0, 0.0), r0, r_end, mirror=mirror))
        return RadialProfile(tuple(segments), tail, label)

    if isinstance(piece, RayTubes):
        s1 = piece.r_max
        tail = 0.0
        if math.isinf(s1):
            s1 = max(piece.r_min, cut)
            tail = piece.count * piece.radius * 0.5 * math.sqrt(math.pi / window.tau) \
                * spec.truncation_threshold
        seg = RayTubeSegment(piece.count, piece.radius, piece.r_min, s1)
        return RadialProfile((seg,), tail, label)

    if isinstance(piece, VerticalTubes):
        seg = VerticalTubeSegment(piece.count, piece.radius, piece.ring_radius,
                                  -piece.half_height, piece.half_height)
        return RadialProfile((seg,), 0.0, label)

    if isinstance(piece, SweptEnds):
        caps = lower_to_profile(SphericalCaps(piece.R, piece.omega), spec, window)
        arc = _swept_rim(piece, cut)
        return RadialProfile(caps.segments + arc, caps.tail_bound, label)

    raise DomainError(f"cannot lower {piece!r}")


def _swept_rim(piece: SweptEnds, cut: float) -> tuple[Segment, ...]:
    length = piece.omega - piece.h
    if piece.t == 0:
        return ()
    if piece.convention == "fold":
        # rim at (R + L cos a, h + L sin a), a from (1 - t) pi/2 up to pi/2; angle from
        # the vertical is pi/2 - a
        upper = HALF_PI - (1.0 - piece.t) * HALF_PI
        seg = MeridianSegment(_circle(piece.R, piece.h, length), 0.0, upper, mirror=True)
        return (seg,)
    # literal: rim at (R + L sin v, h + L sin^2 v / cos v), v = s pi/2, cut where z passes the window
    q = cut / length
    v_cap = math.acos((-q + math.sqrt(q * q + 4.0)) / 2.0)
    s_max = min(piece.t, 2.0 * v_cap / math.pi)

    def curve(s: float) -> tuple[float, float, float]:
        v = s * HALF_PI
        sv, cv = math.sin(v), math.cos(v)
        r = piece.R + length * sv
        z = piece.h + length * sv * sv / cv
        dr = HALF_PI * length * cv
        dz = HALF_PI * length * sv * (1.0 + cv * cv) / (cv * cv)
        return r, z, math.hypot(dr, dz)

    return (MeridianSegment(curve, 0.0, s_max, mirror=True),)


# ── JSON ────────────────────────────────────────────────────────────────────

def _encode(value: Any) -> Any:
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _decode(value: Any) -> Any:
    if value in ("inf", "Infinity", "+inf"):
        return INF
    if value in ("-inf", "-Infinity"):
        return -INF
    return value


def piece_to_dict(piece: Piece) -> dict[str, Any]:
    out: dict[str, Any] = {"piece": piece.tag}
    for f in fields(piece):
        out[f.name] = _encode(getattr(piece, f.name))
    return out


def piece_from_dict(data: dict[str, Any]) -> Piece:
    tag = data.get("piece")
    if tag not in PIECE_TYPES:
        raise DomainError(f"unknown piece tag: {tag!r}")
    cls = PIECE_TYPES[tag]
    names = {f.name for f in fields(cls)}
    extra = set(data) - names - {"piece", "multiplicity"}
    if extra:
        raise DomainError(f"unknown fields for {tag}: {sorted(extra)}")
    kwargs = {k: _decode(v) for k, v in data.items() if k in names}
    for f in fields(cls):
        if f.name in kwargs and f.type in ("float",) and not isinstance(kwargs[f.name], str):
            kwargs[f.name] = float(kwargs[f.name])
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise DomainError(f"bad fields for {tag}: {exc}") from exc


def surface_to_dict(surface: CompositeSurface) -> dict[str, Any]:
    return {
        "label": surface.label,
        "pieces": [dict(piece_to_dict(p), multiplicity=m) for p, m in surface.pieces],
    }


def surface_from_dict(data: dict[str, Any]) -> CompositeSurface:
    pieces = data.get("pieces")
    if not isinstance(pieces, list):
        raise DomainError("surface JSON needs a 'pieces' list")
    return CompositeSurface(
        tuple((piece_from_dict(p), int(p.get("multiplicity", 1))) for p in pieces),
        str(data.get("label", "")),
    )
