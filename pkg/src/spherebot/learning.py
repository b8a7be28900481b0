"""Sliding-mode online learning law for the fuzzy network parameters.

The conventional controller's output tau_c is treated as a time-varying
sliding surface: the network is tuned so that tau_c is driven to zero and
the network takes over the control effort. With sgn the (optionally
smoothed) sign of tau_c and a the learning rate, the continuous-time
parameter laws are

    c_A[i]'     = x1' + (x1 - c_A[i]) a sgn
    c_B[j]'     = x2' + (x2 - c_B[j]) a sgn
    sigma_A[i]' = -(sigma_A[i] + sigma_A[i]^3 / (s_A.s_A)) a sgn
    sigma_B[j]' = -(sigma_B[j] + sigma_B[j]^3 / (s_B.s_B)) a sgn
    f[i,j]'     = -(wbar[i,j] / (wbar.wbar)) a sgn

with s_A = x1 - c_A (vector over i), s_B = x2 - c_B. Two exact algebraic
consequences are used as correctness oracles elsewhere: with
N_A = s_A / sigma_A,

    N_A . N_A' = a sgn      (dot product over memberships)
    sum_ij f'[i,j] wbar[i,j] = -a sgn

Under these laws the squared surface V = tau_c^2 / 2 decays at rate at
least (a - B) |tau_c| whenever the learning rate a exceeds the bound B on
the applied-torque derivative, which yields the finite reach-time bound
|tau_c(0)| / (a - B).

Rate computation is stateless; ``apply_update`` returns a fresh parameter
value, so the control loop is the single writer and monitors may read
snapshots freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fnn

__all__ = [
    "LearningConfig",
    "LearningInputs",
    "FnnParamRates",
    "ConvergenceReport",
    "LyapunovMonitor",
    "DegenerateDistanceError",
    "ConditionViolatedError",
    "smoothed_sign",
    "sign_value",
    "parameter_rates",
    "apply_update",
    "finite_time_convergence_check",
]

SIGN_MODES = ("hard", "smoothed")


class DegenerateDistanceError(ArithmeticError):
    """All centers of one input coincide with the input value."""


class ConditionViolatedError(ValueError):
    """Learning rate does not exceed the torque-derivative bound."""


@dataclass(frozen=True)
class LearningConfig:
    """Tuning of the online learning law.

    Attributes:
        learning_rate: adaptation gain a; must exceed the torque-derivative
            bound for finite-time convergence.
        smoothing: chattering-mitigation constant delta in the smoothed
            sign tau_c / (|tau_c| + delta) [torque units].
        guard: small positive constant added to the squared-distance and
            squared-firing denominators.
        sign_mode: "smoothed" (default) or "hard".
        width_floor: lower clamp for membership widths; the width law
            pushes widths toward zero on one side of the surface and the
            positivity invariant needs a floor.
        input_bound / input_rate_bound / torque_rate_bound: optional
            declared bounds (B_x, B_xdot, B_taudot) used for diagnostics
            only; None disables the check.
    """

    learning_rate: float = 15.0
    smoothing: float = 0.05
    guard: float = 1e-12
    sign_mode: str = "smoothed"
    width_floor: float = 1e-3
    input_bound: float | None = None
    input_rate_bound: float | None = None
    torque_rate_bound: float | None = None

    def validate(self) -> None:
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")
        if self.smoothing <= 0:
            raise ValueError("smoothing must be > 0")
        if self.guard <= 0:
            raise ValueError("guard must be > 0")
        if self.sign_mode not in SIGN_MODES:
            raise ValueError(f"sign_mode must be one of {SIGN_MODES}")
        if self.width_floor <= 0:
            raise ValueError("width_floor must be > 0")


@dataclass(frozen=True)
class LearningInputs:
    """Signals consumed by one rate computation.

    x1, x2 are the network inputs (error and error rate); x1_dot, x2_dot
    their time derivatives; tau_c the conventional controller output,
    which is the surface variable being driven to zero.
    """

    x1: float
    x2: float
    x1_dot: float
    x2_dot: float
    tau_c: float


@dataclass
class FnnParamRates:
    """Time derivatives of every FnnParams entry."""

    centers_a: np.ndarray
    widths_a: np.ndarray
    centers_b: np.ndarray
    widths_b: np.ndarray
    consequents: np.ndarray


def smoothed_sign(tau_c: float, delta: float) -> float:
    """Chattering-free sign: tau_c / (|tau_c| + delta), in (-1, 1)."""
    if delta <= 0:
        raise ValueError("delta must be > 0")
    return tau_c / (abs(tau_c) + delta)


def sign_value(tau_c: float, cfg: LearningConfig) -> float:
    if cfg.sign_mode == "hard":
        return float(np.sign(tau_c))
    return smoothed_sign(tau_c, cfg.smoothing)


def parameter_rates(
    params: fnn.FnnParams,
    inputs: LearningInputs,
    cfg: LearningConfig,
    evaluation: fnn.FnnEvaluation | None = None,
    on_degenerate: str = "raise",
) -> FnnParamRates:
    """Rates of all network parameters at the current state.

    Passing a precomputed ``evaluation`` (from this step's forward pass)
    avoids evaluating the network twice per control period.

    The width laws divide by the squared distance from the input to its
    centers, so they lose all leverage when every center has collapsed
    onto the input (the center law contracts the distances exponentially
    whenever the surface sign is persistently one-sided, so long rollouts
    can reach this). ``on_degenerate`` picks the behaviour there:
    "raise" (default) raises DegenerateDistanceError, "freeze" zeroes the
    affected width rates until excitation returns, a dead-zone in the
    classic adaptive-control sense. Closed-loop runs use "freeze".

    Raises:
        DegenerateDistanceError: degenerate distances with on_degenerate
            set to "raise".
    """
    if np.any(params.widths_a <= 0) or np.any(params.widths_b <= 0):
        raise fnn.NonPositiveWidthError("membership widths must be > 0")
    if on_degenerate not in ("raise", "freeze"):
        raise ValueError("on_degenerate must be 'raise' or 'freeze'")
    if evaluation is None:
        evaluation = fnn.evaluate(params, inputs.x1, inputs.x2)

    s_a = inputs.x1 - params.centers_a
    s_b = inputs.x2 - params.centers_b
    ss_a = float(s_a @ s_a)
    ss_b = float(s_b @ s_b)
    degenerate_a = ss_a < cfg.guard
    degenerate_b = ss_b < cfg.guard
    if (degenerate_a or degenerate_b) and on_degenerate == "raise":
        side = "input-1" if degenerate_a else "input-2"
        raise DegenerateDistanceError(f"all {side} centers coincide with the input")

    sgn = sign_value(inputs.tau_c, cfg)
    gain = cfg.learning_rate * sgn

    # The consequent law is defined on firings normalized to sum one;
    # renormalize here rather than trusting evaluation.normalized, whose
    # guarded variant sums below one near total underflow and would blow
    # the w/(w.w) ratio past its I*J bound. With nothing firing there is
    # no gradient information and the consequents hold.
    total = float(evaluation.firing.sum())
    if total > 0.0:
        wbar = evaluation.firing / total
        wbar_sq = float(np.sum(wbar * wbar))
        consequent_rate = -(wbar / (wbar_sq + cfg.guard)) * gain
    else:
        consequent_rate = np.zeros_like(params.consequents)

    if degenerate_a:
        widths_a_rate = np.zeros_like(params.widths_a)
    else:
        widths_a_rate = -(params.widths_a + params.widths_a**3 / (ss_a + cfg.guard)) * gain
    if degenerate_b:
        widths_b_rate = np.zeros_like(params.widths_b)
    else:
        widths_b_rate = -(params.widths_b + params.widths_b**3 / (ss_b + cfg.guard)) * gain

    return FnnParamRates(
        centers_a=inputs.x1_dot + s_a * gain,
        widths_a=widths_a_rate,
        centers_b=inputs.x2_dot + s_b * gain,
        widths_b=widths_b_rate,
        consequents=consequent_rate,
    )


# The width law grows widths cubically under a persistently negative
# surface sign, which diverges in finite time; beyond this ceiling a
# Gaussian is indistinguishable from the constant one anyway.
WIDTH_CEILING = 1e6


def apply_update(
    params: fnn.FnnParams,
    rates: FnnParamRates,
    dt: float,
    width_floor: float = 1e-3,
) -> tuple[fnn.FnnParams, int]:
    """One explicit-Euler step of the parameter ODE.

    The sign makes the right-hand sides discontinuous in tau_c, so a
    higher-order scheme would buy nothing; Euler at the control period
    matches a sampled-data implementation.

    Widths are clamped into [width_floor, WIDTH_CEILING] to preserve
    positivity and finiteness; returns the updated parameters and how
    many width entries were clamped.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    new_widths_a = params.widths_a + rates.widths_a * dt
    new_widths_b = params.widths_b + rates.widths_b * dt
    clamped = int(np.sum(new_widths_a < width_floor)) + int(np.sum(new_widths_b < width_floor))
    clamped += int(np.sum(new_widths_a > WIDTH_CEILING)) + int(np.sum(new_widths_b > WIDTH_CEILING))
    updated = fnn.FnnParams(
        centers_a=params.centers_a + rates.centers_a * dt,
        widths_a=np.clip(new_widths_a, width_floor, WIDTH_CEILING),
        centers_b=params.centers_b + rates.centers_b * dt,
        widths_b=np.clip(new_widths_b, width_floor, WIDTH_CEILING),
        consequents=params.consequents + rates.consequents * dt,
    )
    return updated, clamped


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of the finite-time reaching check."""

    reach_time: float | None  # first time |tau_c| enters the band, None if never
    bound: float              # closed-form bound |tau_c(0)| / (rate - B)
    within_bound: bool


def finite_time_convergence_check(
    tau_c_trace: np.ndarray,
    dt: float,
    learning_rate: float,
    torque_rate_bound: float,
    band: float,
) -> ConvergenceReport:
    """Check that |tau_c| reaches ``band`` within the theoretical bound.

    The surface Lyapunov function V = tau_c^2 / 2 obeys
    V' <= -(a - B) |tau_c| when the learning rate a exceeds the bound B on
    the applied-torque derivative, so |tau_c| hits zero no later than
    |tau_c(0)| / (a - B).

    Raises:
        ConditionViolatedError: a <= B, the premise fails and the check
            is vacuous.
    """
    if learning_rate <= torque_rate_bound:
        raise ConditionViolatedError(
            f"learning rate {learning_rate} must exceed torque-rate bound {torque_rate_bound}"
        )
    tau_c_trace = np.asarray(tau_c_trace, dtype=float)
    if tau_c_trace.size == 0:
        raise ValueError("empty trace")
    bound = abs(float(tau_c_trace[0])) / (learning_rate - torque_rate_bound)
    inside = np.abs(tau_c_trace) <= band
    if not inside.any():
        return ConvergenceReport(reach_time=None, bound=bound, within_bound=False)
    reach = float(np.argmax(inside)) * dt
    return ConvergenceReport(reach_time=reach, bound=bound, within_bound=reach <= bound)


@dataclass
class LyapunovMonitor:
    """Runtime recorder for the two Lyapunov candidates.

    Tracks V = tau_c^2 / 2 (learning surface) and V_p = S_p^2 / 2
    (tracking surface), finite-differences the surface rate, and counts
    how often the sliding condition tau_c * tau_c' < 0 holds outside a
    chatter band around the surface.
    """

    dt: float
    band: float
    v: list[float] = field(default_factory=list)
    v_p: list[float] = field(default_factory=list)
    _tau_c: list[float] = field(default_factory=list)
    outside_band: int = 0
    sliding_hits: int = 0

    def update(self, tau_c: float, s_p: float) -> None:
        self.v.append(0.5 * tau_c * tau_c)
        self.v_p.append(0.5 * s_p * s_p)
        if self._tau_c:
            prev = self._tau_c[-1]
            if abs(prev) > self.band:
                self.outside_band += 1
                tau_c_rate = (tau_c - prev) / self.dt
                if prev * tau_c_rate < 0:
                    self.sliding_hits += 1
        self._tau_c.append(tau_c)

    @property
    def sliding_fraction(self) -> float:
        """Fraction of outside-band samples satisfying the sliding condition."""
        if self.outside_band == 0:
            return 1.0
        return self.sliding_hits / self.outside_band

    def v_strictly_decreasing_fraction(self) -> float:
        """Fraction of outside-band steps where V decreased."""
        v = np.asarray(self.v)
        tau = np.abs(np.asarray(self._tau_c))
        if len(v) < 2:
            return 1.0
        mask = tau[:-1] > self.band
        if not mask.any():
            return 1.0
        return float(np.mean(np.diff(v)[mask] < 0))
