"""Four interceptors, one target, one arrival instant.

Each interceptor starts from a different position, heading and speed;
all are required to arrive at t = 100 s.  The minimum-effort guidance
shapes each path so the arrivals coincide, while the proportional-
navigation baseline arrives whenever its geometry dictates (spread of
more than 100 s across the group).
"""

import math

from fitguide import CartesianState, Scenario, salvo, salvo_summary

STARTS = [
    (-15000.0, 15000.0, -math.pi / 2, 300.0),
    (-22000.0, -10000.0, -11 * math.pi / 18, 350.0),
    (9000.0, -12000.0, math.pi / 2, 400.0),
    (10000.0, 28000.0, -4 * math.pi / 5, 450.0),
]
T_F = 100.0


def show(tag, results):
    print(f"{tag}:")
    print(f"  {'#':>2} {'J (m^2/s^3)':>13} {'impact (s)':>11} {'miss (m)':>9}")
    for i, res in enumerate(results, 1):
        print(f"  {i:2d} {res.effort:13.1f} {res.impact_time:11.3f} {res.miss:9.4f}")
    print(f"  impact-time spread: {salvo_summary(results)['impact_spread']:.3f} s\n")


oracle_runs = [Scenario(CartesianState(x, y, th), v, T_F, guidance="oracle") for x, y, th, v in STARTS]
show("minimum-effort guidance, common impact time", salvo(oracle_runs))

pn_runs = [Scenario(CartesianState(x, y, th), v, T_F, guidance="pn") for x, y, th, v in STARTS]
show("proportional navigation (uncontrolled arrival)", salvo(pn_runs))
