"""Transient response with PID versus PID plus the adaptive network.

The PI stage removes the steady-state error on its own, so the network's
contribution in this pairing is speed: it supplies the new holding
torque within a fraction of a second after each reference step, while
the integrator alone needs to wind up through the error. Rise and
settling times on the later segments show the difference.

Writes demos/output/03_velocity_zoom.svg.
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
traces, metrics = {}, {}
for mode in ("pid", "pid+fnn"):
    scn = Scenario(name="case2", mode=mode)
    traces[mode] = run(scn, plant, ControllerConfig(mode=mode), FnnConfig(), LearningConfig())
    metrics[mode] = compute_metrics(traces[mode], scn)

print(f"{'segment':>8} {'PID rise':>9} {'+net rise':>10} {'PID settle':>11} {'+net settle':>12}")
for pid_m, net_m in zip(metrics["pid"], metrics["pid+fnn"]):
    print(f"{pid_m.index:>8} {pid_m.rise_time:>9.3f} {net_m.rise_time:>10.3f} "
          f"{pid_m.settling_time:>11.3f} {net_m.settling_time:>12.3f}")

fig, axes = plt.subplots(1, 3, figsize=(12, 4), sharey=False)
for ax, (lo, hi) in zip(axes, [(0.0, 3.0), (5.0, 8.0), (10.0, 13.0)]):
    for mode, style in (("pid", "-"), ("pid+fnn", "-")):
        t = traces[mode]["t"]
        sel = (t >= lo) & (t <= hi)
        ax.plot(t[sel], traces[mode]["theta_dot"][sel], style, label=mode)
    t = traces["pid"]["t"]
    sel = (t >= lo) & (t <= hi)
    ax.plot(t[sel], traces["pid"]["ref"][sel], "k--", label="reference")
    ax.set_xlabel("time [s]")
axes[0].set_ylabel("shell velocity [rad/s]")
axes[0].legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "03_velocity_zoom.svg"))
print(f"figure written to {OUT}")
