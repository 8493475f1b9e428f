import math

import numpy as np
import pytest

from numerics.quadrature import QuadratureSpec, integrate_1d
from numerics.search import (
    bisect_bracket,
    grid_maximum,
    grid_slack,
    lipschitz_estimate,
    map_ordered,
    pattern_search,
)
from runtime.errors import BracketError, DomainError, QuadratureError


def test_gaussian_integral(spec):
    res = integrate_1d(lambda x: math.exp(-x * x), -math.inf, math.inf, spec)
    assert res.value == pytest.approx(math.sqrt(math.pi), rel=1e-12)
    assert res.error <= spec.tolerance_for(res.value)


def test_empty_interval_is_zero(spec):
    res = integrate_1d(math.exp, 1.0, 1.0, spec)
    assert res.value == 0.0 and res.error == 0.0


def test_breakpoints_are_used(spec):
    narrow = lambda x: math.exp(-((x - 3.7) / 1e-3) ** 2)  # noqa: E731
    res = integrate_1d(narrow, 0.0, 10.0, spec, points=[3.7])
    assert res.value == pytest.approx(1e-3 * math.sqrt(math.pi), rel=1e-9)


def test_nonconvergence_keeps_partial_value():
    spec = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=3)
    with pytest.raises(QuadratureError) as info:
        integrate_1d(lambda x: math.sin(1.0 / x) if x else 0.0, 0.0, 1.0, spec)
    record = info.value.to_record()
    assert record["reason"] == "quadrature_nonconvergence"
    assert math.isfinite(record["partial_value"])


def test_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=0)
    with pytest.raises(DomainError):
        QuadratureSpec(truncation_threshold=1.0)


def test_truncation_radius(spec):
    radius = spec.truncation_radius()
    assert math.exp(-radius * radius / 4.0) == pytest.approx(spec.truncation_threshold, rel=1e-9)
    assert spec.truncation_radius(4.0) == pytest.approx(2.0 * radius)


def test_bisect_bracket_sqrt2():
    bracket = bisect_bracket(lambda x: x * x - 2.0, 0.0, 2.0, width=1e-12)
    assert bracket.lo <= math.sqrt(2.0) <= bracket.hi
    assert bracket.width <= 1e-12
    assert bracket.root == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_bisect_bracket_endpoint_root():
    bracket = bisect_bracket(lambda x: x - 1.0, 1.0, 3.0)
    assert bracket.root == 1.0 and bracket.width == 0.0


def test_bisect_bracket_needs_sign_change():
    with pytest.raises(BracketError) as info:
        bisect_bracket(lambda x: x * x + 1.0, -1.0, 1.0)
    assert info.value.reason == "no_sign_change"


def test_map_ordered_keeps_order():
    items = list(range(50))
    assert map_ordered(lambda x: x * x, items, threads=4) == [x * x for x in items]


def test_grid_maximum_first_tie_in_c_order():
    axes = [np.linspace(0.0, 1.0, 11), np.linspace(0.0, 1.0, 11)]
    best, value, values = grid_maximum(lambda p: -((p[0] - 0.3) ** 2) - (p[1] - 0.6) ** 2, axes)
    assert best == pytest.approx((0.3, 0.6))
    assert value == pytest.approx(0.0, abs=1e-15)
    assert values.shape == (11, 11)
    best, _, _ = grid_maximum(lambda p: 1.0, axes)
    assert best == (0.0, 0.0)


def test_pattern_search_polishes_off_grid_maximum():
    func = lambda p: -((p[0] - 0.3141) ** 2) - (p[1] + 0.2718) ** 2  # noqa: E731
    res = pattern_search(func, (0.0, 0.0), [(-1.0, 1.0), (-1.0, 1.0)], (0.25, 0.25), rounds=20)
    assert res.x[0] == pytest.approx(0.3141, abs=1e-5)
    assert res.x[1] == pytest.approx(-0.2718, abs=1e-5)
    assert list(res.history) == sorted(res.history)


def test_lipschitz_and_slack():
    slope = lipschitz_estimate(lambda p: 3.0 * p[0] - 2.0 * p[1], (0.5, 0.5), (1e-3, 1e-3),
                               [(0.0, 1.0), (0.0, 1.0)])
    assert slope == pytest.approx(3.0)
    assert grid_slack((3.0, 4.0), 2.0) == pytest.approx(5.0)
