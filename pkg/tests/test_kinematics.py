import math

import numpy as np
import pytest

from fitguide import (
    CartesianState,
    PolarState,
    cartesian_to_polar,
    step_cartesian,
    step_polar,
    wrap_angle,
)


def test_wrap_angle_range():
    for a in np.linspace(-20, 20, 1001):
        w = wrap_angle(float(a))
        assert -math.pi < w <= math.pi
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)


def test_straight_line_unit_speed():
    out = step_cartesian(CartesianState(0.0, 0.0, 0.0), u=0.0, dt=1.0, speed=1.0)
    assert out.x == pytest.approx(1.0, abs=1e-12)
    assert out.y == pytest.approx(0.0, abs=1e-12)
    assert out.theta == 0.0


def test_straight_line_north_fast():
    out = step_cartesian(CartesianState(0.0, 0.0, math.pi / 2), u=0.0, dt=2.0, speed=3.0)
    assert out.x == pytest.approx(0.0, abs=1e-12)
    assert out.y == pytest.approx(6.0, abs=1e-12)
    assert out.theta == pytest.approx(math.pi / 2)


def test_arc_matches_adaptive_integrator():
    # constant turn rate: closed form x = sin(dt), y = 1 - cos(dt), theta = dt
    out = step_cartesian(CartesianState(0.0, 0.0, 0.0), u=1.0, dt=0.1, speed=1.0)
    assert out.x == pytest.approx(0.09983341664682815, abs=1e-10)
    assert out.y == pytest.approx(0.0049958347219741794, abs=1e-10)
    assert out.theta == pytest.approx(0.1, abs=1e-12)


def test_step_cartesian_rejects_bad_input():
    with pytest.raises(ValueError):
        step_cartesian(CartesianState(0, 0, 0), u=0.0, dt=-1.0, speed=1.0)
    with pytest.raises(ValueError):
        step_cartesian(CartesianState(0, 0, 0), u=0.0, dt=1.0, speed=0.0)
    with pytest.raises(ValueError):
        step_cartesian(CartesianState(0, 0, 0), u=math.nan, dt=1.0, speed=1.0)
    with pytest.raises(ValueError):
        CartesianState(math.inf, 0.0, 0.0)


def test_polar_conversion_case_a_start():
    # look angle magnitude 60 deg; the adopted convention makes it negative
    # for this geometry (velocity counterclockwise of the line of sight)
    p = cartesian_to_polar(CartesianState(-10000.0, 0.0, math.pi / 3))
    assert p.r == pytest.approx(10000.0)
    assert abs(p.sigma) == pytest.approx(math.pi / 3)
    assert p.sigma == pytest.approx(-math.pi / 3)


def test_polar_conversion_rate_consistency():
    # finite-difference oracle: dr/dt = -V cos sigma, dsigma/dt = V sin sigma / r - u
    state = CartesianState(-10000.0, 0.0, math.pi / 3)
    u, speed = 0.3, 2.0
    eps = 1e-6
    p0 = cartesian_to_polar(state)
    p1 = cartesian_to_polar(step_cartesian(state, u, eps, speed))
    rdot = (p1.r - p0.r) / eps
    sdot = (p1.sigma - p0.sigma) / eps
    assert rdot == pytest.approx(-speed * math.cos(p0.sigma), abs=1e-4)
    assert sdot == pytest.approx(speed * math.sin(p0.sigma) / p0.r - u, abs=1e-4)


def test_polar_conversion_degenerate_directions():
    head_on = cartesian_to_polar(CartesianState(-1.0, 0.0, 0.0))
    assert head_on.r == pytest.approx(1.0)
    assert head_on.sigma == pytest.approx(0.0, abs=1e-15)
    away = cartesian_to_polar(CartesianState(-1.0, 0.0, math.pi))
    assert away.r == pytest.approx(1.0)
    assert abs(away.sigma) == pytest.approx(math.pi)


def test_polar_conversion_at_target_rejected():
    with pytest.raises(ValueError, match="look angle undefined"):
        cartesian_to_polar(CartesianState(0.0, 0.0, 1.0))


def test_step_polar_head_on_and_opening():
    closing = step_polar(PolarState(10.0, 0.0), u=0.0, dt=1.0, speed=1.0)
    assert closing.r == pytest.approx(9.0, abs=1e-12)
    assert closing.sigma == pytest.approx(0.0, abs=1e-12)
    opening = step_polar(PolarState(10.0, math.pi), u=0.0, dt=1.0, speed=1.0)
    assert opening.r == pytest.approx(11.0, abs=1e-12)
    assert abs(opening.sigma) == pytest.approx(math.pi)


def test_step_polar_rejects_target_crossing():
    with pytest.raises(ValueError, match="crosses target"):
        step_polar(PolarState(0.5, 0.2), u=0.0, dt=1.0, speed=1.0)


def test_step_polar_matches_cartesian_path():
    # oracle: propagate in Cartesian coordinates and convert
    c = CartesianState(-5.0, 0.0, -math.pi / 4)           # (r, sigma) = (5, pi/4)
    p = cartesian_to_polar(c)
    assert p.sigma == pytest.approx(math.pi / 4)
    c1 = cartesian_to_polar(step_cartesian(c, 0.1, 0.01, 1.0))
    p1 = step_polar(p, 0.1, 0.01, 1.0)
    assert p1.r == pytest.approx(c1.r, abs=1e-8)
    assert p1.sigma == pytest.approx(c1.sigma, abs=1e-8)


def test_long_horizon_consistency():
    # 100 steps, both representations, <=1e-6 relative agreement
    rng = np.random.default_rng(1)
    c = CartesianState(-8.0, 2.0, 0.4)
    p = cartesian_to_polar(c)
    for _ in range(100):
        u = float(rng.uniform(-0.5, 0.5))
        c = step_cartesian(c, u, 0.01, 1.0)
        p = step_polar(p, u, 0.01, 1.0)
    ref = cartesian_to_polar(c)
    assert p.r == pytest.approx(ref.r, rel=1e-6)
    assert p.sigma == pytest.approx(ref.sigma, rel=1e-6, abs=1e-9)


def test_range_rate_sign_property():
    rng = np.random.default_rng(2)
    for _ in range(50):
        state = CartesianState(rng.uniform(-10, -1), rng.uniform(-5, 5), rng.uniform(-3, 3))
        speed = rng.uniform(0.5, 3.0)
        p0 = cartesian_to_polar(state)
        dt = 1e-4
        p1 = cartesian_to_polar(step_cartesian(state, 0.0, dt, speed))
        # forward difference carries an O(dt) bias bounded by the curvature term
        tol = 2.0 * speed**2 / p0.r * dt
        assert (p1.r - p0.r) / dt == pytest.approx(-speed * math.cos(p0.sigma), abs=tol)


def test_headings_stay_wrapped():
    state = CartesianState(-3.0, 1.0, 3.0)
    p = cartesian_to_polar(state)
    for _ in range(500):
        state = step_cartesian(state, 1.7, 0.05, 1.0)
        assert -math.pi < state.theta <= math.pi
    for _ in range(200):
        p = step_polar(p, -0.9, 0.001, 1.0)
        assert -math.pi < p.sigma <= math.pi
