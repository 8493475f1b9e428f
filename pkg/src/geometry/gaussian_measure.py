"""The Gaussian area functional F_{y,tau}, entropy search and Gaussian volume.

Normalization: F_{y,tau}(S) = (1/(4 pi tau)) int_S exp(-|x - y|^2 / (4 tau)), so the
plane has F = 1, the sphere of radius 2 has 4/e and the cylinder of radius sqrt(2)
has sqrt(2 pi / e).

Closed forms are used wherever one exists (annuli, cylinders, spheres, caps, every
doubled cone, both tube families); other pieces go through adaptive quadrature of
their lowered radial profile.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import optimize

from geometry.surfaces import (
    HALF_PI,
    CappedGraph,
    CompositeSurface,
    Cylinder,
    DoubledAnnulus,
    DoubledCone,
    Ellipsoid,
    MeridianSegment,
    Piece,
    RadialProfile,
    RayTubes,
    RayTubeSegment,
    Sphere,
    SphericalCaps,
    SweptEnds,
    VerticalTubes,
    VerticalTubeSegment,
    Window,
    lower_to_profile,
)
from numerics.quadrature import QuadratureSpec, integrate_1d
from numerics.search import bisect_bracket
from numerics.special_functions import EPS, SQRT_PI, bessel_i0e, erf, erfc
from runtime.errors import DomainError, PreconditionError
from runtime.logs import get_logger

log = get_logger("gaussian_measure")

VOLUME_EXPONENT = 3.0 / 8.0


@dataclass(frozen=True)
class FunctionalCenter:
    y: tuple[float, float, float] = (0.0, 0.0, 0.0)
    tau: float = 1.0

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise DomainError("tau must be positive")
        if len(self.y) != 3:
            raise DomainError("y must be a point in R^3")

    @property
    def radial(self) -> float:
        return math.hypot(self.y[0], self.y[1])

    @property
    def axial(self) -> float:
        return self.y[2]

    @property
    def is_canonical(self) -> bool:
        return self.tau == 1.0 and self.y == (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class AreaResult:
    value: float
    error_bound: float
    method: str
    inequality: str | None = None
    detail: dict[str, Any] = field(default_factory=dict, compare=False)

    def to_record(self) -> dict[str, Any]:
        out = {"value": self.value, "error_bound": self.error_bound, "method": self.method}
        if self.inequality:
            out["inequality"] = self.inequality
        if self.detail:
            out["detail"] = self.detail
        return out


def _closed(value: float, err: float = 0.0, **detail: Any) -> AreaResult:
    return AreaResult(value, err + 16 * EPS * abs(value), "closed_form", detail=detail)


# ── closed forms at the canonical center ───────────────────────────────────

def annulus_area(r_inner: float, r_outer: float, h: float, sheets: int = 2) -> float:
    outer = 0.0 if math.isinf(r_outer) else math.exp(-r_outer * r_outer / 4.0)
    return sheets * math.exp(-h * h / 4.0) * (math.exp(-r_inner * r_inner / 4.0) - outer)


def cylinder_area(radius: float, half_height: float) -> float:
    return radius * math.exp(-radius * radius / 4.0) * SQRT_PI * erf(half_height / 2.0).value


def sphere_area(radius: float) -> float:
    return radius * radius * math.exp(-radius * radius / 4.0)


def caps_area(radius: float, offset: float, upper_only: bool = False) -> float:
    c = radius * offset / 2.0
    shape = 1.0 if c == 0 else -math.expm1(-c) / c
    both = radius * radius * math.exp(-(radius * radius + offset * offset) / 4.0) * shape
    return 0.5 * both if upper_only else both


def cone_area(r_inner: float, r_outer: float, offset: float, inclination: float) -> float:
    """Doubled cone area by completing the square along the generating segment.

    With R = r_inner, w0 = R cos(phi) + h sin(phi), w1 = w0 + (R2 - R) sec(phi):
    |C| = e^{-(R sin phi - h cos phi)^2/4} [2 cos phi (e^{-w0^2/4} - e^{-w1^2/4})
          + sqrt(pi) sin phi (R sin phi - h cos phi)(erfc(w0/2) - erfc(w1/2))].
    """
    R, h, phi = r_inner, offset, inclination
    if phi >= HALF_PI:
        if math.isfinite(r_outer):
            raise DomainError("vertical cone with finite r_outer")
        return R * math.exp(-R * R / 4.0) * SQRT_PI * erfc(h / 2.0).value
    s, c = math.sin(phi), math.cos(phi)
    k = R * s - h * c
    w0 = R * c + h * s
    if math.isinf(r_outer):
        g1, e1 = 0.0, 0.0
    else:
        w1 = w0 + (r_outer - R) / c
        g1, e1 = math.exp(-w1 * w1 / 4.0), erfc(w1 / 2.0).value
    g0, e0 = math.exp(-w0 * w0 / 4.0), erfc(w0 / 2.0).value
    return math.exp(-k * k / 4.0) * (2.0 * c * (g0 - g1) + SQRT_PI * s * k * (e0 - e1))


def ray_tubes_area(count: int, radius: float, s0: float, s1: float) -> float:
    span = erfc(s0 / 2.0).value - (0.0 if math.isinf(s1) else erfc(s1 / 2.0).value)
    return count * 0.5 * radius * math.exp(-radius * radius / 4.0) * SQRT_PI * span


def vertical_tubes_area(count: int, radius: float, ring_radius: float, half_height: float) -> float:
    x = ring_radius * radius / 2.0
    kernel = bessel_i0e(x).value * math.exp(-(ring_radius - radius) ** 2 / 4.0)
    return count * radius * SQRT_PI * kernel * erf(half_height / 2.0).value


def _ellipse_integrand(a: float, b: float) -> Callable[[float], float]:
    # e^{-a^2/4} e^{(a^2-b^2) tau^2/4} a sqrt(a^2 tau^2 + b^2 (1 - tau^2))
    def f(tau: float) -> float:
        return math.exp((-a * a + (a * a - b * b) * tau * tau) / 4.0) \
            * a * math.sqrt(a * a * tau * tau + b * b * (1.0 - tau * tau))

    return f


def ellipsoid_area(a: float, b: float, spec: QuadratureSpec | None = None) -> AreaResult:
    """|E(a, b)| from the one-dimensional integral in tau = z/b."""
    spec = spec or QuadratureSpec()
    Ellipsoid(a, b)
    if b == 0:
        return _closed(2.0 * (1.0 - math.exp(-a * a / 4.0)))
    if b == a:
        return _closed(sphere_area(a))
    res = integrate_1d(_ellipse_integrand(a, b), 0.0, 1.0, spec)
    return AreaResult(res.value, res.error, "quadrature")


def capped_graph_area(h: float, a: float, b: float, spec: QuadratureSpec | None = None,
                      sheets: int = 1, r_max: float = math.inf) -> AreaResult:
    """|z^+_{h,a,b}|: half the ellipsoid integral over tau in [h/b, 1] plus the plane part."""
    spec = spec or QuadratureSpec()
    graph = CappedGraph(h, a, b, sheets, r_max)
    r0 = graph.joint_radius
    outer = 0.0 if math.isinf(r_max) else math.exp(-r_max * r_max / 4.0)
    plane = math.exp(-h * h / 4.0) * (math.exp(-r0 * r0 / 4.0) - outer)
    cap, err = 0.0, 0.0
    if b > h:
        res = integrate_1d(_ellipse_integrand(a, b), h / b, 1.0, spec)
        cap, err = 0.5 * res.value, 0.5 * res.error
    return AreaResult(sheets * (cap + plane), sheets * err + 16 * EPS,
                      "quadrature" if b > h else "closed_form")


# ── area ────────────────────────────────────────────────────────────────────

def _ends_area(piece: SweptEnds, spec: QuadratureSpec) -> AreaResult:
    caps = caps_area(piece.R, piece.omega)
    fine = dataclasses.replace(spec, abs_tol=1e-300)
    profile = lower_to_profile(piece, fine)
    rim = RadialProfile(profile.segments[1:], profile.tail_bound)
    swept = profile_functional(rim, FunctionalCenter(), fine) if rim.segments else None
    value = caps + (swept.value if swept else 0.0)
    err = (swept.error_bound if swept else 0.0) + 16 * EPS * value
    scale = piece.omega ** 2 * math.exp(-piece.omega ** 2 / 4.0)
    constant = value / scale
    return AreaResult(value, err, "budget",
                      inequality=f"|Ends| <= E Omega^2 exp(-Omega^2/4), E = {constant!r}",
                      detail={"E": constant, "caps": caps,
                              "swept": swept.value if swept else 0.0})


def area(piece: Piece, spec: QuadratureSpec | None = None) -> AreaResult:
    spec = spec or QuadratureSpec()
    if isinstance(piece, DoubledAnnulus):
        return _closed(annulus_area(piece.r_inner, piece.r_outer, piece.h, piece.sheets))
    if isinstance(piece, Cylinder):
        return _closed(cylinder_area(piece.radius, piece.half_height))
    if isinstance(piece, Sphere):
        return _closed(sphere_area(piece.radius))
    if isinstance(piece, SphericalCaps):
        return _closed(caps_area(piece.radius, piece.offset, piece.upper_only))
    if isinstance(piece, DoubledCone):
        return _closed(cone_area(piece.r_inner, piece.r_outer, piece.offset, piece.inclination))
    if isinstance(piece, Ellipsoid):
        return ellipsoid_area(piece.a, piece.b, spec)
    if isinstance(piece, CappedGraph):
        return capped_graph_area(piece.h, piece.a, piece.b, spec, piece.sheets, piece.r_max)
    if isinstance(piece, RayTubes):
        return _closed(ray_tubes_area(piece.count, piece.radius, piece.r_min, piece.r_max))
    if isinstance(piece, VerticalTubes):
        return _closed(vertical_tubes_area(piece.count, piece.radius, piece.ring_radius,
                                           piece.half_height))
    if isinstance(piece, SweptEnds):
        return _ends_area(piece, spec)
    return profile_functional(lower_to_profile(piece, spec), FunctionalCenter(), spec)


def surface_area(surface: CompositeSurface, spec: QuadratureSpec | None = None) -> AreaResult:
    return f_functional(surface, FunctionalCenter(), spec)


# ── profile quadrature ─────────────────────────────────────────────────────

def _meridian_integrand(seg: MeridianSegment, center: FunctionalCenter) -> Callable[[float], float]:
    tau = center.tau
    yr, yz = center.radial, center.axial
    four_tau = 4.0 * tau
    signs = (1.0, -1.0) if seg.mirror else (1.0,)

    def weight(r: float, z: float) -> float:
        if yr == 0.0:
            return r / (2.0 * tau) * math.exp(-(r * r + (z - yz) ** 2) / four_tau)
        kernel = bessel_i0e(r * yr / (2.0 * tau)).value
        return r / (2.0 * tau) * math.exp(-((r - yr) ** 2 + (z - yz) ** 2) / four_tau) * kernel

    def f(u: float) -> float:
        r, z, speed = seg.curve(u)
        return seg.multiplicity * speed * sum(weight(r, s * z) for s in signs)

    return f


def _peak_points(seg: MeridianSegment, center: FunctionalCenter) -> list[float]:
    """Parameters near the closest approach to y, so quad sees narrow peaks."""
    us = np.linspace(seg.u0, seg.u1, 257)
    best_u, best_d = seg.u0, math.inf
    for u in us:
        r, z, _ = seg.curve(float(u))
        for s in ((1.0, -1.0) if seg.mirror else (1.0,)):
            d = math.hypot(r - center.radial, s * z - center.axial)
            if d < best_d:
                best_u, best_d = float(u), d
    _, _, speed = seg.curve(best_u)
    width = 2.0 * math.sqrt(center.tau) / max(speed, 1e-300)
    return [best_u + k * width for k in (-8, -4, -2, -1, 0, 1, 2, 4, 8)]


def _ray_tube_value(seg: RayTubeSegment, center: FunctionalCenter) -> float:
    if center.radial != 0.0:
        raise DomainError("tube segments are evaluated for centers on the z-axis only")
    tau, root = center.tau, math.sqrt(center.tau)
    d = abs(seg.z - center.axial)
    kernel = bessel_i0e(seg.radius * d / (2.0 * tau)).value \
        * math.exp(-(seg.radius - d) ** 2 / (4.0 * tau))
    span = erfc(seg.s0 / (2.0 * root)).value - erfc(seg.s1 / (2.0 * root)).value
    return seg.multiplicity * seg.count * seg.radius / (2.0 * tau) * SQRT_PI * root * kernel * span


def _vertical_tube_value(seg: VerticalTubeSegment, center: FunctionalCenter) -> float:
    if center.radial != 0.0:
        raise DomainError("tube segments are evaluated for centers on the z-axis only")
    tau, root = center.tau, math.sqrt(center.tau)
    x = seg.ring_radius * seg.radius / (2.0 * tau)
    kernel = bessel_i0e(x).value * math.exp(-(seg.ring_radius - seg.radius) ** 2 / (4.0 * tau))
    span = erf((seg.z_hi - center.axial) / (2.0 * root)).value \
        - erf((seg.z_lo - center.axial) / (2.0 * root)).value
    return seg.multiplicity * seg.count * seg.radius / (2.0 * tau) * SQRT_PI * root * kernel * span


def profile_functional(profile: RadialProfile, center: FunctionalCenter,
                       spec: QuadratureSpec | None = None) -> AreaResult:
    spec = spec or QuadratureSpec()
    value, err = 0.0, profile.tail_bound
    for seg in profile.segments:
        if isinstance(seg, MeridianSegment):
            if seg.u1 <= seg.u0:
                continue
            res = integrate_1d(_meridian_integrand(seg, center), seg.u0, seg.u1, spec,
                               points=_peak_points(seg, center))
            value += res.value
            err += res.error
        elif isinstance(seg, RayTubeSegment):
            part = _ray_tube_value(seg, center)
            value += part
            err += 16 * EPS * part
        else:
            part = _vertical_tube_value(seg, center)
            value += part
            err += 16 * EPS * part
    return AreaResult(value, err, "quadrature", detail={"tail_bound": profile.tail_bound})


# ── F_{y,tau} ───────────────────────────────────────────────────────────────

def _closed_functional(piece: Piece, center: FunctionalCenter) -> float | None:
    tau, root = center.tau, math.sqrt(center.tau)
    yr, c = center.radial, center.axial
    if isinstance(piece, Sphere) and yr == 0.0:
        R = piece.radius
        if c == 0.0:
            return R * R / tau * math.exp(-R * R / (4.0 * tau))
        d = abs(c)
        return -(R / d) * math.exp(-(R - d) ** 2 / (4.0 * tau)) * math.expm1(-R * d / tau)
    if isinstance(piece, DoubledAnnulus) and yr == 0.0:
        outer = 0.0 if math.isinf(piece.r_outer) else math.exp(-piece.r_outer ** 2 / (4.0 * tau))
        radial = math.exp(-piece.r_inner ** 2 / (4.0 * tau)) - outer
        heights = (piece.h,) if piece.sheets == 1 else (piece.h, -piece.h)
        return radial * sum(math.exp(-(z - c) ** 2 / (4.0 * tau)) for z in heights)
    if isinstance(piece, Cylinder):
        R, H = piece.radius, piece.half_height
        kernel = bessel_i0e(R * yr / (2.0 * tau)).value * math.exp(-(R - yr) ** 2 / (4.0 * tau))
        if math.isinf(H):
            span = 2.0
        else:
            span = erf((H - c) / (2.0 * root)).value + erf((H + c) / (2.0 * root)).value
        return R / (2.0 * tau) * SQRT_PI * root * kernel * span
    return None


def f_functional(surface: CompositeSurface, center: FunctionalCenter,
                 spec: QuadratureSpec | None = None) -> AreaResult:
    spec = spec or QuadratureSpec()
    value, err = 0.0, 0.0
    methods = set()
    for piece, multiplicity in surface.pieces:
        if center.is_canonical:
            part = area(piece, spec)
        else:
            closed = _closed_functional(piece, center)
            if closed is not None:
                part = _closed(closed)
            else:
                window = Window(math.sqrt(center.radial ** 2 + center.axial ** 2), center.tau)
                part = profile_functional(lower_to_profile(piece, spec, window), center, spec)
        value += multiplicity * part.value
        err += multiplicity * part.error_bound
        methods.add(part.method)
    method = methods.pop() if len(methods) == 1 else "mixed"
    return AreaResult(value, err, method)


# ── entropy ────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class EntropySearch:
    tau_min: float = 1e-3
    tau_max: float = 1e3
    tau_points: int = 121
    y_extent: float | None = None
    y_points: int = 41
    rounds: int = 3
    off_axis: tuple[float, ...] = ()


@dataclass(frozen=True)
class EntropyResult:
    value: float
    center: FunctionalCenter
    boundary_warning: bool
    flat: bool
    evaluations: int
    off_axis_max: float | None = None

    def to_record(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "y": list(self.center.y),
            "tau": self.center.tau,
            "boundary_warning": self.boundary_warning,
            "flat": self.flat,
            "evaluations": self.evaluations,
            "off_axis_max": self.off_axis_max,
        }


def _y_extent(surface: CompositeSurface, spec: QuadratureSpec) -> float:
    extent = 0.0
    for piece, _ in surface.pieces:
        lo, hi = lower_to_profile(piece, spec).z_range()
        extent = max(extent, abs(lo), abs(hi))
    return min(extent + 1.0, 20.0)


def entropy(surface: CompositeSurface, search: EntropySearch | None = None,
            spec: QuadratureSpec | None = None) -> EntropyResult:
    """Lower bound on sup F_{y,tau} with y on the symmetry axis.

    Coarse (y, log tau) grid, then Nelder-Mead polishing from the grid argmax.
    """
    search = search or EntropySearch()
    spec = spec or QuadratureSpec()
    extent = search.y_extent if search.y_extent is not None else _y_extent(surface, spec)
    ys = np.linspace(-extent, extent, search.y_points)
    log_taus = np.linspace(math.log10(search.tau_min), math.log10(search.tau_max), search.tau_points)

    def value_at(y: float, log_tau: float) -> float:
        center = FunctionalCenter((0.0, 0.0, float(y)), 10.0 ** float(log_tau))
        return f_functional(surface, center, spec).value

    grid = np.array([[value_at(y, lt) for lt in log_taus] for y in ys])
    evaluations = grid.size
    top = float(grid.max())
    flat = float(grid.max() - grid.min()) <= 1e-9 * max(abs(top), 1.0)
    # among near-ties prefer the center closest to (0, tau = 1)
    ties = np.argwhere(grid >= top - 1e-12 * max(abs(top), 1.0))
    i, j = min((tuple(idx) for idx in ties), key=lambda ij: (abs(ys[ij[0]]), abs(log_taus[ij[1]])))
    best_y, best_lt, best = float(ys[i]), float(log_taus[j]), float(grid[i, j])
    boundary = not flat and (j in (0, len(log_taus) - 1) or i in (0, len(ys) - 1))

    if not flat:
        lo = np.array([ys[0], log_taus[0]])
        hi = np.array([ys[-1], log_taus[-1]])

        def objective(p: np.ndarray) -> float:
            q = np.clip(p, lo, hi)
            return -value_at(q[0], q[1])

        start = np.array([best_y, best_lt])
        for _ in range(search.rounds):
            res = optimize.minimize(objective, start, method="Nelder-Mead",
                                    options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 400})
            evaluations += int(res.nfev)
            q = np.clip(res.x, lo, hi)
            if -res.fun > best:
                best, best_y, best_lt = float(-res.fun), float(q[0]), float(q[1])
            start = q

    off_axis_max = None
    if search.off_axis:
        tau = 10.0 ** best_lt
        off = [f_functional(surface, FunctionalCenter((r, 0.0, best_y), tau), spec).value
               for r in search.off_axis]
        evaluations += len(off)
        off_axis_max = max(off)
        if off_axis_max > best:
            log.warning("off-axis value %.17g exceeds the on-axis sup %.17g", off_axis_max, best)
    if boundary:
        log.warning("entropy argmax (y=%g, tau=%g) lies on the search-grid boundary",
                    best_y, 10.0 ** best_lt)
    return EntropyResult(best, FunctionalCenter((0.0, 0.0, best_y), 10.0 ** best_lt),
                         boundary, flat, evaluations, off_axis_max)


# ── Gaussian volume ─────────────────────────────────────────────────────────

def gaussian_volume_ball(R: float) -> AreaResult:
    """Volume of the Euclidean ball of radius R in the metric e^{-|x|^2/4} delta / (4 pi).

    (4 pi)^{-1/2} int_0^R r^2 e^{-3 r^2 / 8} dr, in closed form.
    """
    if not R >= 0:
        raise DomainError("radius must be >= 0")
    a = VOLUME_EXPONENT
    full = SQRT_PI / (4.0 * a ** 1.5)
    if math.isinf(R):
        inner = full
    else:
        inner = full * erf(math.sqrt(a) * R).value - R * math.exp(-a * R * R) / (2.0 * a)
    value = inner / math.sqrt(4.0 * math.pi)
    return _closed(max(value, 0.0))


def half_volume_radius(tol: float = 1e-12) -> float:
    target = 0.5 * gaussian_volume_ball(math.inf).value
    bracket = bisect_bracket(lambda r: gaussian_volume_ball(r).value - target, 0.0, 20.0, tol)
    return bracket.root


# ── property checks ─────────────────────────────────────────────────────────

@dataclass(frozen=True)
class TranslationReport:
    h: float
    shifted: float
    bound: float
    slack: float
    passed: bool
    z_min: float

    def to_record(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def translate_area_bound_check(piece: Piece, h: float,
                               spec: QuadratureSpec | None = None) -> TranslationReport:
    """F(S + h k) <= e^{-h^2/4} F(S) for S in the closed upper half-space."""
    spec = spec or QuadratureSpec()
    if h < 0:
        raise DomainError("shift must be >= 0")
    profile = lower_to_profile(piece, spec, Window(distance=h))
    z_min, _ = profile.z_range()
    if z_min < -1e-12:
        raise PreconditionError(f"piece dips below z = 0 (z_min = {z_min})")
    base = profile_functional(profile, FunctionalCenter(), spec)
    moved = profile_functional(profile.translated(h), FunctionalCenter(), spec)
    factor = math.exp(-h * h / 4.0)
    slack = moved.error_bound + factor * base.error_bound + 1e-12
    return TranslationReport(h, moved.value, factor * base.value, slack,
                             moved.value <= factor * base.value + slack, z_min)


@dataclass(frozen=True)
class MonotonicityReport:
    s_grid: tuple[float, ...]
    values: tuple[float, ...]
    passed: bool
    first_violation: tuple[float, float] | None
    tolerance: float

    def to_record(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def shrinker_monotonicity_check(surface: CompositeSurface, y: Sequence[float], a: float,
                                s_grid: Sequence[float], spec: QuadratureSpec | None = None,
                                tolerance: float = 1e-8) -> MonotonicityReport:
    """s -> F_{s y, 1 + a s^2}(surface) must be non-increasing for a self-shrinker."""
    spec = spec or QuadratureSpec()
    s_values = tuple(float(s) for s in s_grid)
    if any(1.0 + a * s * s <= 0 for s in s_values):
        raise PreconditionError("1 + a s^2 must stay positive on the grid")
    values = []
    for s in s_values:
        center = FunctionalCenter(tuple(float(s * c) for c in y), 1.0 + a * s * s)
        values.append(f_functional(surface, center, spec).value)
    violation = None
    for k in range(len(values) - 1):
        if values[k + 1] - values[k] > tolerance:
            violation = (s_values[k], s_values[k + 1])
            break
    return MonotonicityReport(s_values, tuple(values), violation is None, violation, tolerance)


CLOSED_FORM_KINDS = ("sphere", "cylinder", "annulus", "caps", "cone", "ray_tubes", "vertical_tubes")


def random_closed_form_piece(rng: np.random.Generator, kind: str) -> Piece:
    """A piece of the given closed-form kind with parameters where its area is O(1e-2) or more."""
    u = rng.uniform
    if kind == "sphere":
        return Sphere(float(u(0.2, 4.0)))
    if kind == "cylinder":
        half = math.inf if u() < 0.25 else float(u(0.1, 6.0))
        return Cylinder(float(u(0.2, 4.0)), half)
    if kind == "annulus":
        r_in = float(u(0.0, 3.0))
        r_out = math.inf if u() < 0.25 else r_in + float(u(0.1, 4.0))
        return DoubledAnnulus(r_in, r_out, float(u(0.0, 2.0)), sheets=int(rng.integers(1, 3)))
    if kind == "caps":
        return SphericalCaps(float(u(0.2, 4.0)), float(u(0.0, 2.0)), upper_only=bool(u() < 0.5))
    if kind == "cone":
        r_in, offset = float(u(0.0, 3.0)), float(u(0.0, 2.0))
        if u() < 0.1:
            return DoubledCone(r_in, math.inf, offset, HALF_PI)
        r_out = math.inf if u() < 0.25 else r_in + float(u(0.1, 4.0))
        return DoubledCone(r_in, r_out, offset, float(u(0.0, 1.3)))
    if kind == "ray_tubes":
        r_min = float(u(0.0, 2.0))
        r_max = math.inf if u() < 0.5 else r_min + float(u(0.5, 4.0))
        return RayTubes(int(rng.integers(1, 8)), float(u(0.01, 0.5)), r_min, r_max)
    if kind == "vertical_tubes":
        return VerticalTubes(int(rng.integers(1, 8)), float(u(0.01, 0.5)), float(u(0.2, 3.0)),
                             float(u(0.1, 4.0)))
    raise DomainError(f"no closed form for {kind!r}; choose from {CLOSED_FORM_KINDS}")


def _tube_quadrature(piece: RayTubes | VerticalTubes, spec: QuadratureSpec) -> AreaResult:
    eps = piece.radius
    if isinstance(piece, RayTubes):
        # points (s, eps cos t, eps sin t): weight e^{-(s^2 + eps^2)/4}, element eps ds dt
        s1 = piece.r_max if math.isfinite(piece.r_max) else piece.r_min + spec.truncation_radius()
        res = integrate_1d(lambda s: math.exp(-(s * s + eps * eps) / 4.0), piece.r_min, s1, spec)
        scale = piece.count * eps / 2.0
        return AreaResult(scale * res.value, scale * res.error, "quadrature")
    rho = piece.ring_radius
    res = integrate_1d(lambda t: math.exp(-(rho * rho + eps * eps + 2.0 * rho * eps * math.cos(t)) / 4.0),
                       0.0, math.pi, spec)
    scale = piece.count * eps * erf(piece.half_height / 2.0).value / SQRT_PI
    return AreaResult(scale * res.value, scale * res.error, "quadrature")


def quadrature_area(piece: Piece, spec: QuadratureSpec | None = None) -> AreaResult:
    """F_{0,1} by quadrature only, bypassing every closed form."""
    spec = spec or QuadratureSpec()
    if isinstance(piece, (RayTubes, VerticalTubes)):
        return _tube_quadrature(piece, spec)
    return profile_functional(lower_to_profile(piece, spec), FunctionalCenter(), spec)


@dataclass(frozen=True)
class AgreementReport:
    name: str
    draws: int
    worst_relative: float
    worst_piece: str
    tolerance: float
    failures: tuple[dict[str, Any], ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_record(self) -> dict[str, Any]:
        return {"name": self.name, "draws": self.draws, "worst_relative": self.worst_relative,
                "worst_piece": self.worst_piece, "tolerance": self.tolerance,
                "failures": list(self.failures[:20]), "failure_count": len(self.failures),
                "passed": self.passed}


def _agreement(name: str, pairs: Sequence[tuple[Piece, float, float]],
               tolerance: float) -> AgreementReport:
    worst, worst_piece, failures = 0.0, "", []
    for piece, expected, measured in pairs:
        rel = abs(measured - expected) / abs(expected)
        if rel > worst:
            worst, worst_piece = rel, repr(piece)
        if not rel < tolerance:
            failures.append({"piece": repr(piece), "expected": expected, "measured": measured,
                             "relative": rel})
    if failures:
        log.warning("%s: %d of %d draws exceed %g", name, len(failures), len(pairs), tolerance)
    return AgreementReport(name, len(pairs), worst, worst_piece, tolerance, tuple(failures))


def closed_form_agreement(draws: int = 1000, seed: int = 11, spec: QuadratureSpec | None = None,
                          tolerance: float = 1e-8) -> AgreementReport:
    """Closed form against quadrature on random pieces, cycling through every closed-form kind."""
    spec = spec or QuadratureSpec()
    rng = np.random.default_rng(seed)
    pairs = []
    for k in range(draws):
        piece = random_closed_form_piece(rng, CLOSED_FORM_KINDS[k % len(CLOSED_FORM_KINDS)])
        pairs.append((piece, area(piece, spec).value, quadrature_area(piece, spec).value))
    return _agreement("closed form vs quadrature", pairs, tolerance)


def scaling_identity_check(draws: int = 100, seed: int = 13, spec: QuadratureSpec | None = None,
                           tolerance: float = 1e-8) -> AgreementReport:
    """F_{y,tau}(S) = F_{0,1}((S - y)/sqrt(tau)) for centers y on the z-axis."""
    spec = spec or QuadratureSpec()
    rng = np.random.default_rng(seed)
    pairs = []
    for k in range(draws):
        piece = random_closed_form_piece(rng, CLOSED_FORM_KINDS[k % len(CLOSED_FORM_KINDS)])
        yz = float(rng.uniform(-1.5, 1.5))
        tau = float(math.exp(rng.uniform(math.log(0.5), math.log(2.0))))
        profile = lower_to_profile(piece, spec, Window(abs(yz), tau))
        direct = profile_functional(profile, FunctionalCenter((0.0, 0.0, yz), tau), spec).value
        moved = profile_functional(profile.transformed(yz, math.sqrt(tau)), FunctionalCenter(), spec).value
        pairs.append((piece, direct, moved))
    return _agreement("scaling identity", pairs, tolerance)
