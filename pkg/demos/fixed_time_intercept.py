"""Hit a target at exactly the prescribed time, with minimum effort.

Interceptor 10 km from the target, initial heading 60 deg off the line
of sight, speed 500 m/s.  The boundary-value oracle produces the optimal
trajectory for each prescribed impact time; the closed-loop simulation
then flies it and reports effort, miss distance and the realized impact
time.  If a trained model is present (command_model.txt, produced by
dataset_and_training.py), the network guidance flies the same cases.
"""

import math
import os

from fitguide import CartesianState, Scenario, export_trajectory, load_model, simulate

START = CartesianState(-10000.0, 0.0, math.radians(60.0))
SPEED = 500.0

model = None
if os.path.exists("command_model.txt"):
    model = load_model("command_model.txt")
    print("using command_model.txt for the network runs\n")

print(f"{'t_f':>5} {'law':>7} {'J (m^2/s^3)':>14} {'miss (m)':>10} {'impact (s)':>11}")
for t_f in (25.0, 30.0, 40.0, 50.0):
    res = simulate(Scenario(START, SPEED, t_f, guidance="oracle"))
    print(f"{t_f:5.0f} {'oracle':>7} {res.effort:14.1f} {res.miss:10.4f} {res.impact_time:11.3f}")
    if model is not None:
        res = simulate(Scenario(START, SPEED, t_f, guidance="nn"), model=model)
        print(f"{t_f:5.0f} {'nn':>7} {res.effort:14.1f} {res.miss:10.4f} {res.impact_time:11.3f}")

res = simulate(Scenario(START, SPEED, 40.0, guidance="oracle"))
export_trajectory(res, "intercept_40s.csv")
print("\nwrote intercept_40s.csv (t,x,y,theta,r,sigma,u,a)")

print("\nfor contrast, proportional navigation cannot shape the arrival time:")
res = simulate(Scenario(START, SPEED, 40.0, guidance="pn"))
print(f"  PN arrives at {res.impact_time:.2f} s with J={res.effort:.1f}")
