"""Closed-loop simulation scenarios, traces and tracking metrics.

A scenario bundles everything one rollout needs: a piecewise-constant
velocity reference, a piecewise-constant damping-coefficient schedule
(surface changes are the disturbance of interest), an optional
measurement-noise level, duration, step size and seed.

The control loop runs at the plant sampling period. Each step:

    1. look up reference and damping for the current time
    2. measure theta_dot (plus sensor noise when configured) and form the
       velocity error e; the error rate e' = -theta_dd comes from the
       plant's analytic acceleration, never from differencing the noisy
       measurement
    3. close the acceleration algebraic loop: the derivative feedback
       means e' depends on the torque being applied while the torque
       depends on e', exactly as in the continuous-time block diagram.
       The dynamics are affine in torque, so the loop solves in closed
       form. Feeding back the previous step's acceleration instead would
       make the sampled loop unstable whenever kd times the plant's
       torque-to-acceleration gain exceeds one, which the benchmark
       gains do.
    4. conventional torque tau_c (PD or PID per mode), network torque
       tau_n, one learning step of the parameter ODE
    5. apply tau = tau_c - tau_n, hold it for one step, advance the plant

The center adaptation needs care under sampling: the continuous law
makes the input-center offsets s = x - c contract exactly
(ds/dt = -s a sgn), the input-rate term existing solely to co-move the
centers with the inputs. Euler-integrating the centers against the
analytic input rates would miss the impulsive changes of e' at the
torque switching instants and leave permanent offset errors that starve
the memberships, so the runner tracks the offsets themselves and applies
the pure contraction, which realizes the continuous law exactly at the
samples. A welcome consequence is that the network torque for a step is
fixed by the stored offsets before e' is known, keeping the algebraic
loop linear.

Traces are recorded at every sample including the initial one, so a run
of duration T at step dt has T/dt + 1 rows. Identical scenario + seed
produces bitwise-identical traces.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from . import control, fnn, learning, plant

__all__ = [
    "Scenario",
    "SimTrace",
    "SegmentMetrics",
    "OutOfRangeError",
    "SegmentTooShortError",
    "FeedbackLoopError",
    "REFERENCE_CASE_STEPS",
    "DAMPING_CASE_STEPS",
    "reference_at",
    "damping_at",
    "reference_mean_power",
    "noise_std_for_snr",
    "add_measurement_noise",
    "run",
    "compute_metrics",
    "energy_audit",
]

# Benchmark schedules used throughout: a three-level velocity reference
# and a three-level damping schedule with steps every 5 s.
REFERENCE_CASE_STEPS = ((0.0, 5.0, 1.0), (5.0, 10.0, 2.0), (10.0, 15.0, 1.5))
DAMPING_CASE_STEPS = ((0.0, 5.0, 0.2), (5.0, 10.0, 0.5), (10.0, 15.0, 0.8))

STEADY_WINDOW = 1.0     # seconds at segment end used for steady-state error
SETTLE_BAND = 0.02      # settling band, fraction of the step size
RISE_LO, RISE_HI = 0.1, 0.9

TRACE_COLUMNS = [
    "t", "ref", "theta", "alpha", "theta_dot", "alpha_dot", "e", "e_dot",
    "tau_c", "tau_n", "tau", "S_p", "S_c", "V", "V_p", "zeta", "noise",
]
DIAG_COLUMNS = ["sgn", "clamp_count", "lr_margin"]


class OutOfRangeError(ValueError):
    """Time outside the scenario horizon."""


class SegmentTooShortError(ValueError):
    """A reference segment is too short to contain a steady window."""


class FeedbackLoopError(ArithmeticError):
    """The acceleration algebraic loop could not be closed."""


Schedule = tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class Scenario:
    """One reproducible experiment definition."""

    name: str = "scenario"
    duration: float = 15.0
    dt: float = 0.001
    reference: Schedule = REFERENCE_CASE_STEPS
    damping: Schedule = ((0.0, 15.0, 0.2),)
    snr_db: float | None = None
    seed: int = 0
    mode: str | None = None  # overrides ControllerConfig.mode when set

    def validate(self) -> None:
        if self.duration < 0:
            raise ValueError("duration must be >= 0")
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if self.snr_db is not None and self.snr_db <= 0:
            raise ValueError("snr_db must be > 0 when present")
        for label, sched in (("reference", self.reference), ("damping", self.damping)):
            _validate_schedule(label, sched, self.duration)
        if self.mode is not None:
            control.normalize_mode(self.mode)


def _validate_schedule(label: str, sched: Schedule, duration: float) -> None:
    if not sched:
        raise ValueError(f"{label} schedule is empty")
    tol = 1e-9
    prev_end = 0.0
    for t0, t1, _ in sched:
        if t1 <= t0:
            raise ValueError(f"{label} schedule segment ({t0}, {t1}) is empty")
        if abs(t0 - prev_end) > tol:
            raise ValueError(f"{label} schedule has a gap or overlap at t = {t0}")
        prev_end = t1
    if duration > 0 and prev_end < duration - tol:
        raise ValueError(f"{label} schedule ends at {prev_end} s, before duration {duration} s")


def _schedule_at(sched: Schedule, t: float, duration: float) -> float:
    if t < 0 or t > duration + 1e-9:
        raise OutOfRangeError(f"t = {t} outside [0, {duration}]")
    if t <= sched[0][0]:
        return sched[0][2]
    for t0, t1, value in sched:
        if t0 < t <= t1 + 1e-9:
            return value
    return sched[-1][2]


def reference_at(scenario: Scenario, t: float) -> float:
    """Reference velocity [rad/s] at time t; segments are (t0, t1] bins."""
    return _schedule_at(scenario.reference, t, scenario.duration)


def damping_at(scenario: Scenario, t: float) -> float:
    """Damping coefficient at time t."""
    return _schedule_at(scenario.damping, t, scenario.duration)


def reference_mean_power(scenario: Scenario) -> float:
    """Duration-weighted mean square of the reference signal."""
    total = sum((t1 - t0) * v * v for t0, t1, v in scenario.reference)
    span = scenario.reference[-1][1] - scenario.reference[0][0]
    return total / span


def noise_std_for_snr(snr_db: float, signal_power: float) -> float:
    """Noise standard deviation giving the requested SNR against signal_power."""
    if snr_db <= 0:
        raise ValueError("snr_db must be > 0")
    return float(np.sqrt(signal_power / 10.0 ** (snr_db / 10.0)))


def add_measurement_noise(
    clean: float, snr_db: float, rng: np.random.Generator, signal_power: float
) -> float:
    """Corrupt a measurement with zero-mean Gaussian sensor noise."""
    return clean + rng.normal(0.0, noise_std_for_snr(snr_db, signal_power))


def _conventional_affine(
    cfg: control.ControllerConfig, ctrl_state: control.ControlState, base: str, e: float, dt: float
) -> tuple[float, float]:
    """Express this step's tau_c as k0 + k1 * e_dot, integrator frozen."""
    if base == "pd":
        return cfg.kp * e, cfg.kd
    u0 = cfg.kp * e
    k0 = cfg.pi_alpha * u0 + cfg.pi_beta * (ctrl_state.integral + u0 * dt)
    k1 = (cfg.pi_alpha + cfg.pi_beta * dt) * cfg.kd
    return k0, k1


def _closed_loop_error_rate(
    aff: plant.AffineAcceleration, k0: float, k1: float, tau_n: float
) -> float:
    """Solve e' = -(drift + gain * (k0 + k1 e' - tau_n)) for e'."""
    denom = 1.0 + aff.gain_theta * k1
    if denom < 1e-9:
        raise FeedbackLoopError(
            f"derivative feedback closes a singular algebraic loop (1 + gain*kd = {denom:.3e})"
        )
    return -(aff.drift_theta + aff.gain_theta * (k0 - tau_n)) / denom


@dataclass
class SimTrace:
    """Per-step record of one rollout plus run-level diagnostics."""

    columns: dict[str, np.ndarray]
    mode: str
    scenario: Scenario
    param_column_names: list[str] = field(default_factory=list)
    param_snapshots: list[tuple[float, np.ndarray]] = field(default_factory=list)
    integrator_clamps: int = 0
    width_clamps: int = 0
    bound_violations: int = 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(self.columns["t"])

    def write_csv(self, path: str) -> None:
        """Write the trace with the documented column order, atomically.

        Values are written with repr (shortest round-trip text), so a
        rerun with identical config and seed is byte-identical.
        """
        names = TRACE_COLUMNS + DIAG_COLUMNS
        tmp = path + ".tmp"
        with open(tmp, "w", newline="") as handle:
            handle.write(",".join(names) + "\n")
            cols = [self.columns[n] for n in names]
            for i in range(len(self)):
                handle.write(",".join(repr(float(c[i])) for c in cols) + "\n")
        os.replace(tmp, path)

    def write_param_snapshots_csv(self, path: str) -> None:
        tmp = path + ".tmp"
        with open(tmp, "w", newline="") as handle:
            handle.write(",".join(["t"] + self.param_column_names) + "\n")
            for t, flat in self.param_snapshots:
                handle.write(",".join([repr(float(t))] + [repr(float(v)) for v in flat]) + "\n")
        os.replace(tmp, path)


def run(
    scenario: Scenario,
    plant_params: plant.PlantParams,
    controller_cfg: control.ControllerConfig,
    fnn_cfg: fnn.FnnConfig,
    learning_cfg: learning.LearningConfig,
    snapshot_every: int = 0,
) -> SimTrace:
    """Simulate one closed-loop rollout and return the full trace."""
    scenario.validate()
    plant_params.validate()
    controller_cfg.validate()
    fnn_cfg.validate()
    learning_cfg.validate()

    mode = control.normalize_mode(scenario.mode or controller_cfg.mode)
    adaptive = control.uses_fnn(mode)
    conventional = control.base_law(mode)

    n_steps = int(round(scenario.duration / scenario.dt))
    n_rows = n_steps + 1
    cols = {name: np.zeros(n_rows) for name in TRACE_COLUMNS + DIAG_COLUMNS}

    rng = np.random.default_rng(scenario.seed)
    noise_power = reference_mean_power(scenario) if scenario.snr_db is not None else 0.0

    state = plant.PlantState()
    ctrl_state = control.ControlState()
    params = fnn.initial_params(fnn_cfg) if adaptive else None
    offs_a = offs_b = None  # input-center offsets, tracked exactly

    trace = SimTrace(columns=cols, mode=mode, scenario=scenario)
    if adaptive:
        trace.param_column_names = params.column_names()

    width_clamps = 0
    try:
        for k in range(n_rows):
            t = k * scenario.dt
            ref = reference_at(scenario, t)
            zeta = damping_at(scenario, t)
            p_k = replace(plant_params, damping=zeta)

            noise = 0.0
            if scenario.snr_db is not None:
                noise = rng.normal(0.0, noise_std_for_snr(scenario.snr_db, noise_power))
            e = ref - (state.theta_dot + noise)

            # e' = -theta_dd must be consistent with the torque being
            # applied over the upcoming hold interval; close the loop.
            aff = plant.acceleration_affine(p_k, state)
            k0, k1 = _conventional_affine(controller_cfg, ctrl_state, conventional, e, scenario.dt)

            evaluation = None
            tau_n = 0.0
            if adaptive:
                if offs_a is None:
                    # first sample: seed the offsets from the initial
                    # center grid and the network-free error rate
                    e_dot_free = _closed_loop_error_rate(aff, k0, k1, 0.0)
                    offs_a = e - params.centers_a
                    offs_b = e_dot_free - params.centers_b
                evaluation = fnn.evaluate_offsets(params, offs_a, offs_b)
                tau_n = evaluation.output
            e_dot = _closed_loop_error_rate(aff, k0, k1, tau_n)

            if conventional == "pd":
                tau_c = control.pd_law(controller_cfg, e, e_dot)
            else:
                tau_c = control.pid_law(controller_cfg, ctrl_state, e, e_dot, scenario.dt)
            tau = control.combine(tau_c, tau_n)

            if adaptive:
                # materialize the co-moving centers at this step's inputs
                # (bookkeeping and snapshots only; evaluation uses the
                # offsets directly)
                params = fnn.FnnParams(
                    centers_a=e - offs_a,
                    widths_a=params.widths_a,
                    centers_b=e_dot - offs_b,
                    widths_b=params.widths_b,
                    consequents=params.consequents,
                )
                # input-rate terms are zero here because the runner
                # integrates the center drift exactly via the offsets
                inputs = learning.LearningInputs(
                    x1=e, x2=e_dot, x1_dot=0.0, x2_dot=0.0, tau_c=tau_c
                )
                _count_bound_violations(trace, p_k, state, e, e_dot, tau, learning_cfg)
                rates = learning.parameter_rates(
                    params, inputs, learning_cfg, evaluation, on_degenerate="freeze"
                )
                snapshot_view = params
                params, clamped = learning.apply_update(
                    params, rates, scenario.dt, learning_cfg.width_floor
                )
                width_clamps += clamped
                # exact sampled realization of the center law: offsets
                # contract by (1 - a sgn dt), centers co-move with inputs
                shrink = 1.0 - learning_cfg.learning_rate * learning.sign_value(
                    tau_c, learning_cfg
                ) * scenario.dt
                offs_a = offs_a * shrink
                offs_b = offs_b * shrink

            s_p, s_c = control.sliding_surfaces(controller_cfg, e, e_dot, tau_c)
            ctrl_state.s_p, ctrl_state.s_c = s_p, s_c
            ctrl_state.prev_error = e

            cols["t"][k] = t
            cols["ref"][k] = ref
            cols["theta"][k] = state.theta
            cols["alpha"][k] = state.alpha
            cols["theta_dot"][k] = state.theta_dot
            cols["alpha_dot"][k] = state.alpha_dot
            cols["e"][k] = e
            cols["e_dot"][k] = e_dot
            cols["tau_c"][k] = tau_c
            cols["tau_n"][k] = tau_n
            cols["tau"][k] = tau
            cols["S_p"][k] = s_p
            cols["S_c"][k] = s_c
            cols["V"][k] = 0.5 * tau_c * tau_c
            cols["V_p"][k] = 0.5 * s_p * s_p
            cols["zeta"][k] = zeta
            cols["noise"][k] = noise
            cols["sgn"][k] = learning.sign_value(tau_c, learning_cfg)
            cols["clamp_count"][k] = width_clamps
            tau_rate_est = 0.0 if k == 0 else abs(tau - cols["tau"][k - 1]) / scenario.dt
            cols["lr_margin"][k] = learning_cfg.learning_rate - tau_rate_est
            if learning_cfg.torque_rate_bound is not None and tau_rate_est > learning_cfg.torque_rate_bound:
                trace.bound_violations += 1

            if adaptive and snapshot_every > 0 and k % snapshot_every == 0:
                trace.param_snapshots.append((t, snapshot_view.flatten()))

            if k < n_steps:
                state = plant.step(p_k, state, tau, scenario.dt)
    except (
        plant.SingularMassMatrixError,
        fnn.DegenerateFiringError,
        fnn.NonPositiveWidthError,
        learning.DegenerateDistanceError,
        FeedbackLoopError,
    ) as exc:
        raise type(exc)(f"{exc} (at step {k}, t = {k * scenario.dt:.3f} s)") from exc

    trace.integrator_clamps = ctrl_state.integrator_clamps
    trace.width_clamps = width_clamps
    return trace


def _count_bound_violations(trace, p_k, state, e, e_dot, tau, cfg) -> None:
    """Diagnostics only: count samples exceeding the declared bounds.

    x1' equals x2, and x2' is the analytic jerk of the tracking error,
    computed only when a rate bound is actually declared.
    """
    if cfg.input_bound is not None:
        if abs(e) > cfg.input_bound or abs(e_dot) > cfg.input_bound:
            trace.bound_violations += 1
    if cfg.input_rate_bound is not None:
        e_ddot = -plant.acceleration_rates(p_k, state, tau).theta_ddot
        if abs(e_dot) > cfg.input_rate_bound or abs(e_ddot) > cfg.input_rate_bound:
            trace.bound_violations += 1


@dataclass(frozen=True)
class SegmentMetrics:
    """Step-response metrics of one reference segment.

    Metrics that do not exist for a segment (no step, never crossed,
    never settled) are None, not zero.
    """

    index: int
    t_start: float
    t_end: float
    reference: float
    ss_error: float
    rise_time: float | None
    settling_time: float | None
    overshoot: float | None


def compute_metrics(trace: SimTrace, scenario: Scenario) -> list[SegmentMetrics]:
    """Per-segment steady-state error, rise time, settling time, overshoot.

    Rise time is the 10%-90% crossing interval of the measured velocity;
    settling time is the first entry into a band of +/-2% of the step
    size around the segment reference with no later exit inside the
    segment; steady-state error is the mean absolute controller error
    over the last second.
    """
    t = trace["t"]
    y = trace["theta_dot"]
    e = trace["e"]
    out = []
    for idx, (t0, t1, ref) in enumerate(scenario.reference):
        if t1 - t0 < STEADY_WINDOW - 1e-9:
            raise SegmentTooShortError(
                f"segment {idx} spans {t1 - t0:.3f} s < steady window {STEADY_WINDOW} s"
            )
        seg = (t > t0 + 1e-12) & (t <= t1 + 1e-9)
        if not seg.any():
            raise SegmentTooShortError(f"segment {idx} contains no samples")
        ts, ys = t[seg], y[seg]

        before = t <= t0 + 1e-12
        baseline = float(y[before][-1]) if before.any() else float(ys[0])
        step_size = ref - baseline

        tail = seg & (t > t1 - STEADY_WINDOW + 1e-12)
        ss_error = float(np.mean(np.abs(e[tail])))

        rise = _rise_time(ts, ys, baseline, step_size)
        settle = _settling_time(ts, ys, t0, ref, step_size)
        over = _overshoot(ys, ref, step_size)
        out.append(
            SegmentMetrics(
                index=idx,
                t_start=t0,
                t_end=t1,
                reference=ref,
                ss_error=ss_error,
                rise_time=rise,
                settling_time=settle,
                overshoot=over,
            )
        )
    return out


def _rise_time(ts, ys, baseline, step_size) -> float | None:
    if step_size == 0.0:
        return None
    sign = 1.0 if step_size > 0 else -1.0
    lo = baseline + RISE_LO * step_size
    hi = baseline + RISE_HI * step_size
    above_lo = sign * (ys - lo) >= 0
    above_hi = sign * (ys - hi) >= 0
    if not above_lo.any() or not above_hi.any():
        return None
    t_lo = ts[np.argmax(above_lo)]
    t_hi = ts[np.argmax(above_hi)]
    if t_hi < t_lo:
        return None
    return float(t_hi - t_lo)


def _settling_time(ts, ys, t0, ref, step_size) -> float | None:
    band = SETTLE_BAND * abs(step_size) if step_size != 0.0 else SETTLE_BAND * abs(ref)
    if band == 0.0:
        return None
    inside = np.abs(ys - ref) <= band
    if not inside[-1]:
        return None
    # last index where the response is outside the band; settled after it
    outside = np.nonzero(~inside)[0]
    first_settled = 0 if outside.size == 0 else outside[-1] + 1
    if first_settled >= len(ts):
        return None
    return float(ts[first_settled] - t0)


def _overshoot(ys, ref, step_size) -> float | None:
    if step_size == 0.0:
        return None
    sign = 1.0 if step_size > 0 else -1.0
    peak = float(np.max(sign * (ys - ref)))
    return max(0.0, peak) / abs(step_size) * 100.0


def energy_audit(trace: SimTrace, plant_params: plant.PlantParams) -> dict[str, float]:
    """Trapezoidal work/dissipation balance over a trace.

    Work input is the applied torque times the sum of coordinate rates
    (the torque acts on both coordinates); the balance
    work - dissipated = E(T) - E(0) holds to integrator accuracy.
    """
    t = trace["t"]
    td, ad = trace["theta_dot"], trace["alpha_dot"]
    tau, zeta = trace["tau"], trace["zeta"]
    dt = np.diff(t)
    gen_rate = td + ad
    # torque and damping are held over [t_k, t_k+1), so use the left value
    work = float(np.sum(tau[:-1] * 0.5 * (gen_rate[:-1] + gen_rate[1:]) * dt))
    diss_rate = zeta * (td * td + ad * ad)
    dissipated = float(np.sum(0.5 * (diss_rate[:-1] + diss_rate[1:]) * dt))

    def state_at(i: int) -> plant.PlantState:
        return plant.PlantState(
            theta=float(trace["theta"][i]),
            alpha=float(trace["alpha"][i]),
            theta_dot=float(td[i]),
            alpha_dot=float(ad[i]),
            time=float(t[i]),
        )

    e0 = plant.total_energy(plant_params, state_at(0))
    e1 = plant.total_energy(plant_params, state_at(len(trace) - 1))
    return {
        "work": work,
        "dissipated": dissipated,
        "delta_energy": e1 - e0,
        "residual": work - dissipated - (e1 - e0),
    }
