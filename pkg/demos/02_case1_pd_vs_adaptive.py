"""Velocity tracking with PD alone versus PD plus the adaptive network.

The three-level reference (1, 2, 1.5 rad/s, stepping every 5 s) exposes
the structural weakness of plain PD on this plant: holding a speed v
against viscous friction needs a standing torque of roughly zeta * v,
which a PD law can only produce by keeping a proportional error of
zeta * v / (kp + zeta). The network learns that torque online and hands
the PD law back an error at the numerical floor.

Writes demos/output/02_velocity.svg and 02_error.svg.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from spherebot import ControllerConfig, FnnConfig, LearningConfig, PlantParams, Scenario, run
from spherebot.scenario import compute_metrics

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

plant = PlantParams()
traces = {}
for mode in ("pd", "pd+fnn"):
    scn = Scenario(name="case1", mode=mode)
    traces[mode] = run(scn, plant, ControllerConfig(mode=mode), FnnConfig(), LearningConfig())
    print(f"--- {mode} ---")
    for m in compute_metrics(traces[mode], scn):
        print(f"  segment {m.index} (ref {m.reference} rad/s): "
              f"steady-state error = {m.ss_error:.2e} rad/s, "
              f"settling = {m.settling_time if m.settling_time is not None else float('nan'):.3f} s")

expected = [0.2 * r / (1.0 + 0.2) for r in (1.0, 2.0, 1.5)]
print(f"predicted PD errors zeta*r/(kp+zeta): {[f'{e:.4f}' for e in expected]}")

fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(traces["pd"]["t"], traces["pd"]["ref"], "k--", label="reference")
ax.plot(traces["pd"]["t"], traces["pd"]["theta_dot"], label="PD")
ax.plot(traces["pd+fnn"]["t"], traces["pd+fnn"]["theta_dot"], label="PD + network")
ax.set_xlabel("time [s]")
ax.set_ylabel("shell velocity [rad/s]")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "02_velocity.svg"))

fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(traces["pd"]["t"], traces["pd"]["e"], label="PD")
ax.plot(traces["pd+fnn"]["t"], traces["pd+fnn"]["e"], label="PD + network")
ax.set_xlabel("time [s]")
ax.set_ylabel("velocity error [rad/s]")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "02_error.svg"))
print(f"figures written to {OUT}")
