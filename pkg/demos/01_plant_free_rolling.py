"""Free rolling of the sphere-pendulum: energy bookkeeping sanity checks.

Two unforced rollouts from a perturbed start (pendulum leaned 0.4 rad,
shell spinning at 1 rad/s):

  * frictionless: total energy must stay constant to integrator accuracy
  * viscous friction: energy must decay monotonically, and the integral
    of the dissipation power must account for every lost joule

Writes demos/output/01_energy.svg and prints the bookkeeping numbers.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from spherebot import plant

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

DT = 0.001
STEPS = 15_000
START = plant.PlantState(alpha=0.4, theta_dot=1.0)


def rollout(params):
    states = [START]
    for _ in range(STEPS):
        states.append(plant.step(params, states[-1], 0.0, DT))
    t = np.array([s.time for s in states])
    energy = np.array([plant.total_energy(params, s) for s in states])
    power = np.array([plant.dissipation_power(params, s) for s in states])
    return t, energy, power


# frictionless: conservation
ideal = plant.PlantParams(damping=0.0)
t, e_ideal, _ = rollout(ideal)
drift = np.abs(e_ideal - e_ideal[0]).max() / abs(e_ideal[0])
print(f"frictionless 15 s rollout: relative energy drift = {drift:.2e}")

# viscous friction: decay + audit
damped = plant.PlantParams()
t, e_damped, power = rollout(damped)
dissipated = np.trapezoid(power, t)
lost = e_damped[0] - e_damped[-1]
print(f"damped rollout: energy lost = {lost:.6f} J, "
      f"integrated dissipation = {dissipated:.6f} J, "
      f"mismatch = {abs(lost - dissipated) / lost:.2e} relative")
print(f"monotone decay: {bool(np.all(np.diff(e_damped) <= 1e-12))}")

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
ax1.plot(t, e_ideal - e_ideal[0], label="zeta = 0")
ax1.set_ylabel("E(t) - E(0) [J]")
ax1.legend()
ax2.plot(t, e_damped, label="zeta = 0.2")
ax2.plot(t, e_damped[0] - np.concatenate([[0.0], np.cumsum(
    0.5 * (power[1:] + power[:-1]) * np.diff(t))]), "--",
    label="E(0) - integrated dissipation")
ax2.set_xlabel("time [s]")
ax2.set_ylabel("total energy [J]")
ax2.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "01_energy.svg"))
print(f"figure written to {os.path.join(OUT, '01_energy.svg')}")
