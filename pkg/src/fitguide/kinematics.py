"""Planar interceptor kinematics against a stationary target at the origin.

Two equivalent state descriptions are used throughout the toolkit:

* Cartesian ``(x, y, theta)`` — position in a target-centered East/North
  frame plus heading angle (counterclockwise from +x).
* Polar ``(r, sigma)`` — range to the target and look angle between the
  line of sight and the velocity vector.

Look-angle sign convention: ``sigma = wrap(pi + atan2(y, x) - theta)``,
i.e. sigma is positive when the velocity points clockwise of the line of
sight to the target.  Under this convention the polar rates are

    dr/dt     = -V cos(sigma)
    dsigma/dt =  V sin(sigma)/r - u

where ``u`` is the commanded turn rate (rad per unit time) and ``V`` the
(constant) speed.  The mirror image trajectory is obtained by negating
both sigma and u.

Integration is classical fixed-step RK4.  Steps larger than
``MAX_SUBSTEP`` are internally subdivided so that a single call remains
accurate to well below 1e-10 regardless of the requested dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "CartesianState",
    "PolarState",
    "wrap_angle",
    "step_cartesian",
    "cartesian_to_polar",
    "step_polar",
]

# Largest RK4 substep taken by step_cartesian / step_polar.
MAX_SUBSTEP = 0.005


def wrap_angle(angle: float) -> float:
    """Reduce an angle into (-pi, pi]."""
    w = math.fmod(angle + math.pi, 2.0 * math.pi)
    if w <= 0.0:
        w += 2.0 * math.pi
    return w - math.pi


@dataclass(frozen=True)
class CartesianState:
    """Interceptor pose in the target-centered frame."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.theta)):
            raise ValueError("invalid state: non-finite Cartesian component")


@dataclass(frozen=True)
class PolarState:
    """Range and look angle relative to the target."""

    r: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and math.isfinite(self.sigma)):
            raise ValueError("invalid state: non-finite polar component")
        if self.r < 0.0:
            raise ValueError("invalid state: negative range")


def _substeps(dt: float, max_substep: float) -> tuple[int, float]:
    n = max(1, int(math.ceil(dt / max_substep - 1e-12)))
    return n, dt / n


def step_cartesian(
    state: CartesianState,
    u: float,
    dt: float,
    speed: float,
    max_substep: float = MAX_SUBSTEP,
) -> CartesianState:
    """Advance the Cartesian kinematics by dt under a constant turn rate.

    dx/dt = speed*cos(theta), dy/dt = speed*sin(theta), dtheta/dt = u.
    """
    if dt <= 0.0:
        raise ValueError("invalid state: dt must be positive")
    if speed <= 0.0:
        raise ValueError("invalid state: speed must be positive")
    if not (math.isfinite(u) and math.isfinite(dt) and math.isfinite(speed)):
        raise ValueError("invalid state: non-finite step input")
    x, y, th = state.x, state.y, state.theta
    n, h = _substeps(dt, max_substep)
    for _ in range(n):
        # RK4 on (x, y, theta); u is held constant over the step.
        k1x = speed * math.cos(th)
        k1y = speed * math.sin(th)
        th2 = th + 0.5 * h * u
        k2x = speed * math.cos(th2)
        k2y = speed * math.sin(th2)
        th4 = th + h * u
        k4x = speed * math.cos(th4)
        k4y = speed * math.sin(th4)
        x += h / 6.0 * (k1x + 4.0 * k2x + k4x)
        y += h / 6.0 * (k1y + 4.0 * k2y + k4y)
        th = th4
    return CartesianState(x, y, wrap_angle(th))


def cartesian_to_polar(state: CartesianState) -> PolarState:
    """Convert a Cartesian state to range / look angle.

    Raises ValueError at r = 0 where the look angle is undefined.
    """
    r = math.hypot(state.x, state.y)
    if r == 0.0:
        raise ValueError("look angle undefined at target")
    sigma = wrap_angle(math.pi + math.atan2(state.y, state.x) - state.theta)
    return PolarState(r, sigma)


def step_polar(
    state: PolarState,
    u: float,
    dt: float,
    speed: float,
    max_substep: float = MAX_SUBSTEP,
) -> PolarState:
    """Advance the polar kinematics by dt under a constant turn rate."""
    if dt <= 0.0:
        raise ValueError("invalid state: dt must be positive")
    if speed <= 0.0:
        raise ValueError("invalid state: speed must be positive")
    if state.r <= speed * dt:
        raise ValueError("step crosses target")
    r, s = state.r, state.sigma
    n, h = _substeps(dt, max_substep)
    for _ in range(n):
        k1r = -speed * math.cos(s)
        k1s = speed * math.sin(s) / r - u
        r2 = r + 0.5 * h * k1r
        s2 = s + 0.5 * h * k1s
        k2r = -speed * math.cos(s2)
        k2s = speed * math.sin(s2) / r2 - u
        r3 = r + 0.5 * h * k2r
        s3 = s + 0.5 * h * k2s
        k3r = -speed * math.cos(s3)
        k3s = speed * math.sin(s3) / r3 - u
        r4 = r + h * k3r
        s4 = s + h * k3s
        k4r = -speed * math.cos(s4)
        k4s = speed * math.sin(s4) / r4 - u
        r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        s += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
    return PolarState(r, wrap_angle(s))
