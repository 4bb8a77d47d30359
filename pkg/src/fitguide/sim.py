"""Closed-loop engagement simulation and effort/miss metrics.

The simulator integrates the Cartesian kinematics at a fixed step with
the command recomputed from the measured state every step.  For the
boundary-value oracle the costate solve is refreshed at a configurable
period (default 1 s) and the command between refreshes is read off the
latest solved extremal at the current time-to-go; the network and the
proportional-navigation baseline are cheap enough to evaluate directly
every step.

Termination: network/oracle runs stop at the prescribed impact time
(or on an early target crossing); proportional navigation ignores the
impact time and flies until intercept or ``max_time``.  Miss distance
and impact time are refined by fitting a parabola to the squared range
over the final integration nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .guidance import (
    DEFAULT_KAPPA,
    GuidanceError,
    GuidanceQuery,
    command_nn,
    command_oracle,
    pn_command,
)
from .kinematics import CartesianState, cartesian_to_polar, step_cartesian, wrap_angle

__all__ = [
    "Scenario",
    "SimResult",
    "simulate",
    "control_effort",
    "salvo",
    "salvo_summary",
    "export_trajectory",
]

TRAJECTORY_HEADER = "t,x,y,theta,r,sigma,u,a"

GUIDANCE_LAWS = ("nn", "oracle", "pn")


@dataclass(frozen=True)
class Scenario:
    """One engagement: interceptor initial state in the target frame."""

    initial: CartesianState
    speed: float
    t_f: float
    guidance: str = "oracle"
    dt: float = 0.01
    update_period: float | None = None  # oracle re-solve period; None -> 1.0
    pn_gain: float = 3.0
    max_time: float | None = None       # PN time-out; None -> max(4*t_f, 60)
    kappa: float = DEFAULT_KAPPA

    def __post_init__(self):
        if self.guidance not in GUIDANCE_LAWS:
            raise ValueError(f"unknown guidance law {self.guidance!r}")
        if self.speed <= 0.0 or self.t_f <= 0.0 or self.dt <= 0.0:
            raise ValueError("speed, t_f and dt must be positive")


@dataclass
class SimResult:
    """Sampled closed-loop trajectory plus engagement metrics."""

    scenario: Scenario
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    r: np.ndarray
    sigma: np.ndarray
    t_control: np.ndarray   # one entry per integration step (len(t) - 1)
    u: np.ndarray           # turn-rate history
    accel: np.ndarray       # lateral acceleration history (speed * u)
    effort: float           # J, m^2/s^3
    miss: float
    impact_time: float
    delta_j: float | None = None


def control_effort(times, turn_rates, speed: float) -> float:
    """Trapezoidal integral of (speed * u)^2 / 2 over the sample times."""
    t = np.asarray(times, dtype=float)
    u = np.asarray(turn_rates, dtype=float)
    if len(t) == 0 or len(t) != len(u):
        raise ValueError("times and turn_rates must be non-empty and equal length")
    return float(np.trapezoid(0.5 * (speed * u) ** 2, t))


def _refine_miss(t_nodes, r_nodes, dt):
    """Parabola fit on r^2 over the last nodes; returns (impact_time, miss)."""
    if len(t_nodes) < 3:
        return float(t_nodes[-1]), float(r_nodes[-1])
    t3 = np.asarray(t_nodes[-3:])
    q3 = np.asarray(r_nodes[-3:]) ** 2
    # quadratic through three points; fall back to the end node if degenerate
    denom = (t3[0] - t3[1]) * (t3[0] - t3[2]) * (t3[1] - t3[2])
    if denom == 0.0:
        return float(t3[-1]), float(math.sqrt(max(q3[-1], 0.0)))
    a = (t3[2] * (q3[1] - q3[0]) + t3[1] * (q3[0] - q3[2]) + t3[0] * (q3[2] - q3[1])) / denom
    b = (t3[2] ** 2 * (q3[0] - q3[1]) + t3[1] ** 2 * (q3[2] - q3[0]) + t3[0] ** 2 * (q3[1] - q3[2])) / denom
    if a <= 0.0:
        k = int(np.argmin(q3))
        return float(t3[k]), float(math.sqrt(max(q3[k], 0.0)))
    t_v = -b / (2.0 * a)
    lo, hi = float(t3[-1]) - 2.0 * dt, float(t3[-1]) + dt
    t_v = min(max(t_v, lo), hi)
    c = q3[0] - a * t3[0] ** 2 - b * t3[0]
    q_min = a * t_v**2 + b * t_v + c
    return float(t_v), float(math.sqrt(max(q_min, 0.0)))


def simulate(scenario: Scenario, model=None) -> SimResult:
    """Run one closed-loop engagement."""
    law = scenario.guidance
    if law == "nn" and model is None:
        raise ValueError("network guidance requires a model")
    speed, dt, t_f = scenario.speed, scenario.dt, scenario.t_f
    r0 = math.hypot(scenario.initial.x, scenario.initial.y)
    if law in ("nn", "oracle") and r0 > speed * t_f * (1.0 + 1e-12):
        raise GuidanceError("infeasible scenario: target unreachable by t_f")

    update_period = scenario.update_period if scenario.update_period is not None else 1.0
    max_time = scenario.max_time if scenario.max_time is not None else max(4.0 * t_f, 60.0)

    state = scenario.initial
    t = 0.0
    ts = [0.0]
    xs = [state.x]
    ys = [state.y]
    ths = [state.theta]
    u_hist: list[float] = []
    last_u = 0.0
    oracle_sol = None
    oracle_sign = 1.0
    next_solve = 0.0

    while True:
        r = math.hypot(state.x, state.y)
        if law == "pn":
            if r < speed * dt / 2.0 or t >= max_time:
                break
        else:
            if t >= t_f - 1e-12 or r < speed * dt / 2.0:
                break
        t_go = t_f - t
        if r < 2.0 * speed * dt:
            u = last_u  # range too short to measure the look angle reliably
        else:
            polar = cartesian_to_polar(state)
            if law == "pn":
                u = pn_command(polar, speed, scenario.pn_gain)
            elif law == "nn":
                # clamp marginal terminal-phase infeasibility from command noise
                t_query = max(t_go, r / speed)
                u = command_nn(model, GuidanceQuery(r, polar.sigma, t_query, speed), scenario.kappa)
            else:
                # no re-solve in the terminal phase: the query degenerates
                # toward a collision course where the solve is ill
                # conditioned, while the replayed extremal is already exact
                t_lock = max(update_period, 0.1 * t_f)
                if oracle_sol is None or (t >= next_solve and t_go > t_lock):
                    t_query = max(t_go, r / speed)
                    try:
                        oracle_sol = command_oracle(
                            GuidanceQuery(r, polar.sigma, t_query, speed),
                            assume_admissible=oracle_sol is not None,
                            warm_solution=oracle_sol,
                        )
                        oracle_sign = -1.0 if oracle_sol.mirrored else 1.0
                    except GuidanceError as err:
                        if oracle_sol is None:
                            raise GuidanceError(f"t={t:.3f} s: {err}") from err
                        # keep replaying the last verified plan; late-flight
                        # re-solves are ill-conditioned near collision course
                    next_solve = t + update_period
                traj = oracle_sol.trajectory
                # midpoint sampling of the held command halves the hold bias
                t_eval = max(t_go - 0.5 * min(dt, t_go), 0.0)
                u = oracle_sign * float(np.interp(t_eval, traj.t, traj.U))
        last_u = u
        u_hist.append(u)
        hstep = dt if law == "pn" else min(dt, t_f - t)
        state = step_cartesian(state, u, hstep, speed)
        t += hstep
        ts.append(t)
        xs.append(state.x)
        ys.append(state.y)
        ths.append(state.theta)

    t_arr = np.array(ts)
    x_arr = np.array(xs)
    y_arr = np.array(ys)
    th_arr = np.array(ths)
    r_arr = np.hypot(x_arr, y_arr)
    sigma_arr = np.array(
        [wrap_angle(math.pi + math.atan2(yv, xv) - th) if rv > 0.0 else 0.0
         for xv, yv, th, rv in zip(x_arr, y_arr, th_arr, r_arr)]
    )
    u_arr = np.array(u_hist)
    a_arr = speed * u_arr
    effort = control_effort(t_arr[:-1], u_arr, speed) if len(u_arr) else 0.0
    impact_time, miss = _refine_miss(t_arr, r_arr, dt)
    return SimResult(
        scenario=scenario,
        t=t_arr,
        x=x_arr,
        y=y_arr,
        theta=th_arr,
        r=r_arr,
        sigma=sigma_arr,
        t_control=t_arr[:-1],
        u=u_arr,
        accel=a_arr,
        effort=effort,
        miss=miss,
        impact_time=impact_time,
    )


def salvo(scenarios, model=None) -> list:
    """Simulate several interceptors against the common target.

    All scenarios must share the same prescribed impact time.  Failures
    are collected per scenario (the returned slot holds the exception)
    without aborting the remaining runs.
    """
    scenarios = list(scenarios)
    if not scenarios:
        return []
    t_fs = {s.t_f for s in scenarios}
    if len(t_fs) != 1:
        raise ValueError("salvo scenarios must share a common impact time")
    results = []
    for sc in scenarios:
        try:
            results.append(simulate(sc, model=model))
        except Exception as err:  # noqa: BLE001 - per-scenario isolation
            results.append(err)
    return results


def salvo_summary(results) -> dict:
    """Per-interceptor efforts and impact times plus the time spread."""
    efforts = [r.effort if isinstance(r, SimResult) else math.nan for r in results]
    impacts = [r.impact_time if isinstance(r, SimResult) else math.nan for r in results]
    ok = [x for x in impacts if not math.isnan(x)]
    return {
        "efforts": efforts,
        "impact_times": impacts,
        "impact_spread": (max(ok) - min(ok)) if ok else math.nan,
        "failures": [i for i, r in enumerate(results) if not isinstance(r, SimResult)],
    }


def export_trajectory(result: SimResult, path) -> None:
    """Write the sampled trajectory as CSV (SI units, 17 digits).

    The command columns hold the value in effect on the step starting at
    each node; the final node repeats the last held command.
    """
    n = len(result.t)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(TRAJECTORY_HEADER + "\n")
        for k in range(n):
            j = min(k, n - 2)
            u = result.u[j] if len(result.u) else 0.0
            a = result.accel[j] if len(result.accel) else 0.0
            f.write(
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n"
                % (
                    result.t[k],
                    result.x[k],
                    result.y[k],
                    result.theta[k],
                    result.r[k],
                    result.sigma[k],
                    u,
                    a,
                )
            )
