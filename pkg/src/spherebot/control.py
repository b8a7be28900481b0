"""Conventional controllers and the parallel torque combination.

The conventional part is a PD law tau_c = kp e + kd e', optionally wrapped
by a PI stage acting on the PD output (the "PID" modes):

    tau_c = pi_alpha * u_pd + pi_beta * integral(u_pd dt)

which reduces to plain PD for pi_alpha = 1, pi_beta = 0. In the adaptive
modes the network torque is subtracted from the conventional torque,
tau = tau_c - tau_n, so a fully trained network cancels the conventional
effort.

Sliding-surface bookkeeping: S_p = e' + lambda e with lambda = kp/kd, and
S_c = tau_c. In the PD modes S_c = kd * S_p holds identically, which ties
the learning surface to the tracking surface.

A controller instance owns its integrator state; one instance per rollout.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "MODES",
    "ControllerConfig",
    "ControlState",
    "normalize_mode",
    "uses_fnn",
    "base_law",
    "pd_law",
    "pid_law",
    "combine",
    "sliding_surfaces",
]

MODES = ("pd", "pid", "pd+fnn", "pid+fnn")


def normalize_mode(mode: str) -> str:
    m = mode.strip().lower()
    if m not in MODES:
        raise ValueError(f"unknown controller mode {mode!r}; expected one of {MODES}")
    return m


def uses_fnn(mode: str) -> bool:
    return normalize_mode(mode).endswith("+fnn")


def base_law(mode: str) -> str:
    """Conventional part of a mode: 'pd' or 'pid'."""
    return normalize_mode(mode).split("+")[0]


@dataclass(frozen=True)
class ControllerConfig:
    kp: float = 1.0            # proportional gain [N m s/rad]
    kd: float = 0.05           # derivative gain [N m s^2/rad]
    pi_alpha: float = 1.0      # PI stage direct gain
    pi_beta: float = 2.0       # PI stage integral gain [1/s]
    mode: str = "pd"
    integrator_limit: float = 50.0  # anti-windup saturation [N m s]

    def validate(self) -> None:
        if self.kp <= 0:
            raise ValueError("kp must be > 0")
        if self.kd <= 0:
            raise ValueError("kd must be > 0")
        if self.integrator_limit <= 0:
            raise ValueError("integrator_limit must be > 0")
        normalize_mode(self.mode)

    @property
    def surface_slope(self) -> float:
        """lambda = kp/kd, the slope of the tracking sliding surface."""
        return self.kp / self.kd


@dataclass
class ControlState:
    """Mutable per-rollout controller state; reset by constructing fresh."""

    integral: float = 0.0      # accumulated u_pd [N m s]
    prev_error: float = 0.0
    s_p: float = 0.0
    s_c: float = 0.0
    integrator_clamps: int = 0


def pd_law(cfg: ControllerConfig, e: float, e_dot: float) -> float:
    """PD torque kp e + kd e'."""
    return cfg.kp * e + cfg.kd * e_dot


def pid_law(cfg: ControllerConfig, state: ControlState, e: float, e_dot: float, dt: float) -> float:
    """PI stage applied to the PD output; anti-windup clamps the integrator.

    Clamping is silent but counted in ``state.integrator_clamps``.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    u_pd = pd_law(cfg, e, e_dot)
    state.integral += u_pd * dt
    if abs(state.integral) > cfg.integrator_limit:
        state.integral = max(-cfg.integrator_limit, min(cfg.integrator_limit, state.integral))
        state.integrator_clamps += 1
    return cfg.pi_alpha * u_pd + cfg.pi_beta * state.integral


def combine(tau_c: float, tau_n: float) -> float:
    """Overall applied torque: conventional minus network."""
    return tau_c - tau_n


def sliding_surfaces(cfg: ControllerConfig, e: float, e_dot: float, tau_c: float) -> tuple[float, float]:
    """(S_p, S_c): tracking surface e' + (kp/kd) e and learning surface tau_c."""
    return e_dot + cfg.surface_slope * e, tau_c
