"""Command-line entry point.

    spherebot run <config.ini> [--mode MODE] [--seed N] [--out DIR]
                               [--plots] [--snapshot-every N]

Runs the configured scenario, writes one trace CSV per rollout, a metrics
report (CSV plus a printed table), optional SVG plots, and optional
parameter-snapshot CSVs. ``--mode compare`` runs the conventional
controller and its +fnn counterpart on the identical scenario and seed.

Trace CSV schema (fixed order, full-precision decimal text):
    t, ref, theta, alpha, theta_dot, alpha_dot, e, e_dot, tau_c, tau_n,
    tau, S_p, S_c, V, V_p, zeta, noise
followed by the appended diagnostics columns sgn, clamp_count, lr_margin.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, replace

from . import config as config_mod
from . import control, fnn, learning, plant, scenario

__all__ = ["RunConfig", "run_command", "main"]

CLI_MODES = list(control.MODES) + ["compare"]


@dataclass(frozen=True)
class RunConfig:
    config_path: str
    out_dir: str = "out"
    mode: str | None = None
    seed: int | None = None
    plots: bool = False
    snapshot_every: int = 0


def _mode_slug(mode: str) -> str:
    return mode.replace("+", "_")


def _format_metric(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def _write_metrics_csv(path: str, rows: list[dict]) -> None:
    header = ["scenario", "mode", "segment", "ss_error", "rise_time", "settling_time", "overshoot"]
    tmp = path + ".tmp"
    with open(tmp, "w", newline="") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(str(row[h]) for h in header) + "\n")
    os.replace(tmp, path)


def _print_metrics_table(rows: list[dict]) -> None:
    header = ["scenario", "mode", "segment", "ss_error", "rise_time", "settling_time", "overshoot"]

    def shown(value) -> str:
        try:
            return "%.6g" % float(value)
        except (TypeError, ValueError):
            return str(value)

    cells = [[shown(r[h]) for h in header] for r in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))


def _metric_rows(name: str, mode: str, metrics: list[scenario.SegmentMetrics]) -> list[dict]:
    rows = []
    for m in metrics:
        rows.append({
            "scenario": name,
            "mode": mode,
            "segment": m.index,
            "ss_error": _format_metric(m.ss_error),
            "rise_time": _format_metric(m.rise_time),
            "settling_time": _format_metric(m.settling_time),
            "overshoot": _format_metric(m.overshoot),
        })
    return rows


def _write_plots(traces: dict[str, scenario.SimTrace], name: str, out_dir: str) -> list[str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    for mode, trace in traces.items():
        slug = f"{name}_{_mode_slug(mode)}"
        t = trace["t"]

        fig, ax = plt.subplots(figsize=(8, 4))
        ax.plot(t, trace["ref"], "k--", label="reference")
        ax.plot(t, trace["theta_dot"], label=mode)
        ax.set_xlabel("time [s]")
        ax.set_ylabel("sphere velocity [rad/s]")
        ax.legend()
        path = os.path.join(out_dir, f"{slug}_velocity.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

        fig, ax = plt.subplots(figsize=(8, 4))
        ax.plot(t, trace["e"], label="e")
        ax.set_xlabel("time [s]")
        ax.set_ylabel("velocity error [rad/s]")
        ax.legend()
        path = os.path.join(out_dir, f"{slug}_error.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

        fig, ax = plt.subplots(figsize=(8, 4))
        ax.plot(t, trace["tau_c"], label="tau_c")
        # the network torque is subtracted from tau_c, so its effective
        # contribution -tau_n is what belongs next to tau_c on a plot
        ax.plot(t, -trace["tau_n"], label="-tau_n")
        ax.plot(t, trace["tau"], label="tau", alpha=0.6)
        ax.set_xlabel("time [s]")
        ax.set_ylabel("torque [N m]")
        ax.legend()
        path = os.path.join(out_dir, f"{slug}_torque.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

    if len(traces) > 1:
        fig, ax = plt.subplots(figsize=(8, 4))
        first = next(iter(traces.values()))
        ax.plot(first["t"], first["ref"], "k--", label="reference")
        for mode, trace in traces.items():
            ax.plot(trace["t"], trace["theta_dot"], label=mode)
        ax.set_xlabel("time [s]")
        ax.set_ylabel("sphere velocity [rad/s]")
        ax.legend()
        path = os.path.join(out_dir, f"{name}_compare_velocity.svg")
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written


def run_command(run_cfg: RunConfig) -> int:
    """Execute the rollout(s) described by a RunConfig; 0 on success."""
    try:
        sim_cfg = config_mod.load_config(run_cfg.config_path)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    except (config_mod.ParseError, config_mod.ValidationError) as exc:
        print(f"error: {run_cfg.config_path}: {exc}", file=sys.stderr)
        return 1

    scn = sim_cfg.scenario
    if run_cfg.seed is not None:
        scn = replace(scn, seed=run_cfg.seed)

    if run_cfg.mode == "compare":
        base = control.base_law(sim_cfg.controller.mode)
        modes = [base, base + "+fnn"]
    elif run_cfg.mode is not None:
        modes = [control.normalize_mode(run_cfg.mode)]
    else:
        modes = [control.normalize_mode(scn.mode or sim_cfg.controller.mode)]

    os.makedirs(run_cfg.out_dir, exist_ok=True)
    traces: dict[str, scenario.SimTrace] = {}
    metric_rows: list[dict] = []
    for mode in modes:
        scn_mode = replace(scn, mode=mode)
        try:
            trace = scenario.run(
                scn_mode,
                sim_cfg.plant,
                sim_cfg.controller,
                sim_cfg.fnn,
                sim_cfg.learning,
                snapshot_every=run_cfg.snapshot_every,
            )
        except (
            plant.SingularMassMatrixError,
            fnn.DegenerateFiringError,
            fnn.NonPositiveWidthError,
            learning.DegenerateDistanceError,
            scenario.FeedbackLoopError,
            scenario.OutOfRangeError,
            ValueError,
        ) as exc:
            print(f"error: rollout {scn.name}/{mode} failed: {exc}", file=sys.stderr)
            return 1

        slug = f"{scn.name}_{_mode_slug(mode)}"
        trace.write_csv(os.path.join(run_cfg.out_dir, f"{slug}.csv"))
        if run_cfg.snapshot_every > 0 and trace.param_snapshots:
            trace.write_param_snapshots_csv(os.path.join(run_cfg.out_dir, f"{slug}_params.csv"))
        traces[mode] = trace

        try:
            metric_rows.extend(_metric_rows(scn.name, mode, scenario.compute_metrics(trace, scn_mode)))
        except scenario.SegmentTooShortError as exc:
            print(f"note: metrics skipped for {slug}: {exc}", file=sys.stderr)

    if metric_rows:
        _write_metrics_csv(os.path.join(run_cfg.out_dir, "metrics.csv"), metric_rows)
        _print_metrics_table(metric_rows)
    if run_cfg.plots:
        _write_plots(traces, scn.name, run_cfg.out_dir)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spherebot",
        description="Velocity-control simulations of a pendulum-driven spherical rolling robot.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run a scenario config file")
    run_p.add_argument("config", help="path to the scenario config")
    run_p.add_argument("--mode", choices=CLI_MODES, default=None,
                       help="override controller mode; 'compare' runs the conventional "
                            "controller and its +fnn counterpart")
    run_p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run_p.add_argument("--out", default="out", help="output directory (default: out)")
    run_p.add_argument("--plots", action="store_true", help="also write SVG plots")
    run_p.add_argument("--snapshot-every", type=int, default=0, metavar="N",
                       help="record network parameters every N steps")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run_command(RunConfig(
            config_path=args.config,
            out_dir=args.out,
            mode=args.mode,
            seed=args.seed,
            plots=args.plots,
            snapshot_every=args.snapshot_every,
        ))
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
