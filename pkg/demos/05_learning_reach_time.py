"""Finite-time reaching of the learning surface, against its bound.

Outside any plant, the network adapts against an externally supplied
bounded-derivative torque signal with the hard sign law. The surface
variable tau_c = tau_n + tau then obeys V' <= -(a - B)|tau_c| for
learning rate a and torque-derivative bound B, so |tau_c| must hit the
chatter band no later than |tau_c(0)| / (a - B). The demo sweeps the
learning rate and plots each descent against its bound.

Writes demos/output/05_reaching.svg.
"""

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from spherebot import fnn, learning

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

DT = 1e-4
B_RATE = 1.0       # bound on the external torque derivative
START = 2.0        # tau_c(0)


def descend(rate):
    cfg = learning.LearningConfig(learning_rate=rate, sign_mode="hard")
    params = fnn.initial_params(fnn.FnnConfig())
    params.consequents[:] = START
    amp = 0.5
    freq = B_RATE / (amp * 2 * math.pi)
    bound = START / (rate - B_RATE)
    steps = int(round(1.3 * bound / DT))
    tau_c = np.zeros(steps + 1)
    for k in range(steps + 1):
        t = k * DT
        ev = fnn.evaluate_guarded(params, 0.4 * math.sin(4.4 * t), 1.5 * math.cos(3.1 * t))
        tau_c[k] = ev.output + amp * math.sin(2 * math.pi * freq * t)
        inputs = learning.LearningInputs(
            x1=0.4 * math.sin(4.4 * t), x2=1.5 * math.cos(3.1 * t),
            x1_dot=0.4 * 4.4 * math.cos(4.4 * t), x2_dot=-1.5 * 3.1 * math.sin(3.1 * t),
            tau_c=tau_c[k])
        rates = learning.parameter_rates(params, inputs, cfg, ev, on_degenerate="freeze")
        params, _ = learning.apply_update(params, rates, DT, cfg.width_floor)
    return tau_c


fig, ax = plt.subplots(figsize=(8, 4))
for rate in (3.0, 5.0, 8.0):
    tau_c = descend(rate)
    t = np.arange(len(tau_c)) * DT
    band = 2.0 * (rate + B_RATE) * DT
    report = learning.finite_time_convergence_check(tau_c, DT, rate, B_RATE, band)
    print(f"rate {rate:4.1f}: reached the band at {report.reach_time:.4f} s "
          f"(bound {report.bound:.4f} s, satisfied: {report.within_bound})")
    line, = ax.plot(t, np.abs(tau_c), label=f"rate = {rate:g}")
    ax.axvline(report.bound, color=line.get_color(), linestyle=":", alpha=0.6)
ax.set_xlabel("time [s]")
ax.set_ylabel("|tau_c|")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "05_reaching.svg"))
print(f"figure written to {OUT}")
