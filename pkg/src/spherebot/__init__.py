"""Velocity control of a pendulum-driven spherical rolling robot.

Library layout:
    plant     rigid-body dynamics, RK4 stepping, energy bookkeeping
    fnn       Takagi-Sugeno-Kang fuzzy neural network (evaluation, gradients)
    learning  sliding-mode online parameter adaptation and Lyapunov monitors
    control   PD/PID laws, torque combination, sliding surfaces
    scenario  closed-loop rollouts, traces, tracking metrics
    config    plain-text run configuration
    cli       batch entry point (``spherebot run``)
"""

from .control import ControllerConfig, ControlState
from .fnn import FnnConfig, FnnEvaluation, FnnParams
from .learning import LearningConfig, LearningInputs, LyapunovMonitor
from .plant import PlantDerivatives, PlantParams, PlantState
from .scenario import Scenario, SegmentMetrics, SimTrace, run

__all__ = [
    "ControllerConfig",
    "ControlState",
    "FnnConfig",
    "FnnEvaluation",
    "FnnParams",
    "LearningConfig",
    "LearningInputs",
    "LyapunovMonitor",
    "PlantDerivatives",
    "PlantParams",
    "PlantState",
    "Scenario",
    "SegmentMetrics",
    "SimTrace",
    "run",
]

__version__ = "0.1.0"
