"""Robustness to surface changes, and who ends up doing the work.

The friction coefficient steps 0.2 / 0.5 / 0.8 at 0 / 5 / 10 s while the
reference steps 1 / 2 / 1.5 rad/s. Each friction step changes the torque
needed to hold speed; the adaptive network re-learns it within a few
hundred milliseconds, after which the PID output returns to roughly
zero. The torque plot shows the handover; the network torque is drawn
negated because the applied torque is tau_c - tau_n.

Writes demos/output/04_velocity.svg and 04_torque_handover.svg.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from spherebot import ControllerConfig, FnnConfig, LearningConfig, PlantParams, Scenario, run
from spherebot.scenario import DAMPING_CASE_STEPS, compute_metrics

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

plant = PlantParams()
traces = {}
for mode in ("pid", "pid+fnn"):
    scn = Scenario(name="case2_zeta", mode=mode, damping=DAMPING_CASE_STEPS)
    traces[mode] = run(scn, plant, ControllerConfig(mode=mode), FnnConfig(), LearningConfig())
    settle = [m.settling_time for m in compute_metrics(traces[mode], scn)]
    print(f"{mode}: settling times per segment = "
          + ", ".join("none" if s is None else f"{s:.3f} s" for s in settle))

trace = traces["pid+fnn"]
t = trace["t"]
for seg_end in (5.0, 10.0, 15.0):
    window = (t > seg_end - 1.0) & (t <= seg_end)
    mean_c = np.abs(trace["tau_c"][window]).mean()
    mean_n = np.abs(trace["tau_n"][window]).mean()
    print(f"final second before t = {seg_end:4.1f}: mean |tau_c| = {mean_c:.5f} N m, "
          f"mean |tau_n| = {mean_n:.5f} N m (holding torque = zeta * v)")

fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(t, trace["ref"], "k--", label="reference")
for mode in ("pid", "pid+fnn"):
    ax.plot(traces[mode]["t"], traces[mode]["theta_dot"], label=mode)
ax.set_xlabel("time [s]")
ax.set_ylabel("shell velocity [rad/s]")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "04_velocity.svg"))

fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(t, trace["tau_c"], label="tau_c (PID)")
ax.plot(t, -trace["tau_n"], label="-tau_n (network contribution)")
ax.plot(t, trace["tau"], alpha=0.5, label="tau applied")
ax.set_xlabel("time [s]")
ax.set_ylabel("torque [N m]")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "04_torque_handover.svg"))
print(f"figures written to {OUT}")
