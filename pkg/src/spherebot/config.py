"""Plain-text run configuration.

Grammar: INI-style sections, one ``key = value`` pair per line, ``#`` or
``;`` starting a line is a comment. Sections and keys:

    [plant]       sphere_mass, pendulum_mass, sphere_radius,
                  pendulum_offset, gravity, sphere_inertia,
                  pendulum_inertia, damping
    [controller]  kp, kd, pi_alpha, pi_beta, mode, integrator_limit
    [fnn]         num_mf_input1, num_mf_input2, error_range, rate_range
    [learning]    learning_rate, smoothing, guard, sign_mode, width_floor,
                  input_bound, input_rate_bound, torque_rate_bound
    [scenario]    name, duration, dt, reference, damping, snr_db, seed

Schedules (``reference`` and ``[scenario] damping``) are semicolon lists
of ``t0:t1:value`` triples, e.g. ``0:5:1; 5:10:2; 10:15:1.5``.

Every key is optional; omitted keys fall back to the benchmark defaults
(3 kg / 2 kg sphere-pendulum, kp = 1, kd = 0.05, PI gains 1 and 2, 3x3
membership grid, 1 ms sampling, the three-level velocity reference).
Grammar violations raise ParseError with a line/column location;
violated value invariants raise ValidationError naming the invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import control, fnn, learning, plant, scenario

__all__ = ["ParseError", "ValidationError", "SimConfig", "parse_config", "load_config"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(ValueError):
    """A parsed value violates a config invariant."""


@dataclass(frozen=True)
class SimConfig:
    scenario: scenario.Scenario
    plant: plant.PlantParams
    controller: control.ControllerConfig
    fnn: fnn.FnnConfig
    learning: learning.LearningConfig


_SECTION_KEYS = {
    "plant": {
        "sphere_mass", "pendulum_mass", "sphere_radius", "pendulum_offset",
        "gravity", "sphere_inertia", "pendulum_inertia", "damping",
    },
    "controller": {"kp", "kd", "pi_alpha", "pi_beta", "mode", "integrator_limit"},
    "fnn": {"num_mf_input1", "num_mf_input2", "error_range", "rate_range"},
    "learning": {
        "learning_rate", "smoothing", "guard", "sign_mode", "width_floor",
        "input_bound", "input_rate_bound", "torque_rate_bound",
    },
    "scenario": {"name", "duration", "dt", "reference", "damping", "snr_db", "seed"},
}


def _tokenize(text: str) -> dict[str, dict[str, tuple[str, int, int]]]:
    """Raw (value, line, column) per section/key, with location checks."""
    sections: dict[str, dict[str, tuple[str, int, int]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        indent = len(raw) - len(raw.lstrip())
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, indent + 1)
            name = stripped[1:-1].strip().lower()
            if name not in _SECTION_KEYS:
                raise ParseError(f"unknown section [{name}]", lineno, indent + 1)
            current = name
            sections.setdefault(name, {})
            continue
        if "=" not in stripped:
            raise ParseError("expected 'key = value'", lineno, indent + 1)
        if current is None:
            raise ParseError("key outside any section", lineno, indent + 1)
        key, _, value = raw.partition("=")
        key_name = key.strip().lower()
        if key_name not in _SECTION_KEYS[current]:
            raise ParseError(f"unknown key {key_name!r} in section [{current}]",
                             lineno, indent + 1)
        value_col = len(key) + 2  # 1-based position just after '='
        sections[current][key_name] = (value.strip(), lineno, value_col)
    return sections


def _get_float(sec: dict, key: str):
    if key not in sec:
        return None
    value, line, col = sec[key]
    try:
        return float(value)
    except ValueError:
        raise ParseError(f"{key} must be a number, got {value!r}", line, col) from None


def _get_int(sec: dict, key: str):
    if key not in sec:
        return None
    value, line, col = sec[key]
    try:
        return int(value)
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {value!r}", line, col) from None


def _get_str(sec: dict, key: str):
    return sec[key][0] if key in sec else None


def _parse_schedule(sec: dict, key: str):
    if key not in sec:
        return None
    value, line, col = sec[key]
    segments = []
    offset = 0
    for chunk in value.split(";"):
        triple = chunk.strip()
        chunk_col = col + offset + (len(chunk) - len(chunk.lstrip()))
        offset += len(chunk) + 1
        if not triple:
            raise ParseError("empty schedule entry", line, chunk_col)
        parts = triple.split(":")
        if len(parts) != 3:
            raise ParseError(
                f"schedule entry {triple!r} must be 't0:t1:value'", line, chunk_col
            )
        try:
            segments.append(tuple(float(p) for p in parts))
        except ValueError:
            raise ParseError(
                f"schedule entry {triple!r} has a non-numeric field", line, chunk_col
            ) from None
    return tuple(segments)


def _build(cls_default, overrides: dict):
    present = {k: v for k, v in overrides.items() if v is not None}
    return replace(cls_default, **present)


def parse_config(text: str) -> SimConfig:
    """Parse and validate a config document; all keys optional."""
    sections = _tokenize(text)
    p = sections.get("plant", {})
    c = sections.get("controller", {})
    f = sections.get("fnn", {})
    l = sections.get("learning", {})
    s = sections.get("scenario", {})

    plant_params = _build(plant.PlantParams(), {
        "sphere_mass": _get_float(p, "sphere_mass"),
        "pendulum_mass": _get_float(p, "pendulum_mass"),
        "sphere_radius": _get_float(p, "sphere_radius"),
        "pendulum_offset": _get_float(p, "pendulum_offset"),
        "gravity": _get_float(p, "gravity"),
        "sphere_inertia": _get_float(p, "sphere_inertia"),
        "pendulum_inertia": _get_float(p, "pendulum_inertia"),
        "damping": _get_float(p, "damping"),
    })
    controller_cfg = _build(control.ControllerConfig(), {
        "kp": _get_float(c, "kp"),
        "kd": _get_float(c, "kd"),
        "pi_alpha": _get_float(c, "pi_alpha"),
        "pi_beta": _get_float(c, "pi_beta"),
        "mode": _get_str(c, "mode"),
        "integrator_limit": _get_float(c, "integrator_limit"),
    })
    fnn_cfg = _build(fnn.FnnConfig(), {
        "num_mf_input1": _get_int(f, "num_mf_input1"),
        "num_mf_input2": _get_int(f, "num_mf_input2"),
        "error_range": _get_float(f, "error_range"),
        "rate_range": _get_float(f, "rate_range"),
    })
    learning_cfg = _build(learning.LearningConfig(), {
        "learning_rate": _get_float(l, "learning_rate"),
        "smoothing": _get_float(l, "smoothing"),
        "guard": _get_float(l, "guard"),
        "sign_mode": _get_str(l, "sign_mode"),
        "width_floor": _get_float(l, "width_floor"),
        "input_bound": _get_float(l, "input_bound"),
        "input_rate_bound": _get_float(l, "input_rate_bound"),
        "torque_rate_bound": _get_float(l, "torque_rate_bound"),
    })

    duration = _get_float(s, "duration")
    duration = duration if duration is not None else 15.0
    dt = _get_float(s, "dt")
    seed = _get_int(s, "seed")
    damping_schedule = _parse_schedule(s, "damping")
    if damping_schedule is None:
        # constant plant damping over the whole horizon
        damping_schedule = ((0.0, max(duration, 15.0), plant_params.damping),)
    scn = scenario.Scenario(
        name=_get_str(s, "name") or "scenario",
        duration=duration,
        dt=dt if dt is not None else 0.001,
        reference=_parse_schedule(s, "reference") or scenario.REFERENCE_CASE_STEPS,
        damping=damping_schedule,
        snr_db=_get_float(s, "snr_db"),
        seed=seed if seed is not None else 0,
    )

    try:
        plant_params.validate()
        controller_cfg.validate()
        fnn_cfg.validate()
        learning_cfg.validate()
        scn.validate()
    except (ValueError, fnn.NonPositiveWidthError) as exc:
        raise ValidationError(str(exc)) from exc
    return SimConfig(
        scenario=scn,
        plant=plant_params,
        controller=controller_cfg,
        fnn=fnn_cfg,
        learning=learning_cfg,
    )


def load_config(path: str) -> SimConfig:
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())
