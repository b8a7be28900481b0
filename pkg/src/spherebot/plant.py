"""Planar dynamics of a pendulum-driven spherical rolling robot.

The robot is a spherical shell rolling without slipping along a straight
line, driven by an internal pendulum hung from the shell center. Rotating
the pendulum through a motor torque produces an equal and opposite reaction
torque on the shell, which is what propels the sphere.

Generalized coordinates:
    theta  rolling angle of the sphere about the transverse axis [rad]
    alpha  rotation angle of the pendulum about the same axis [rad]

The relative angle phi = alpha - theta is the pendulum lean measured from
the vertical; phi = 0 is the hanging equilibrium. The equations of motion
in matrix form are

    M(q) qdd + C(q, qd) + G(q) = [tau, tau]^T

with

    M11 = Ms R^2 + mp R^2 + mp l^2 + Is + Ip + 2 mp R l cos(phi)
    M12 = M21 = -mp l^2 - Ip - mp R l cos(phi)
    M22 = mp l^2 + Ip
    C11 = mp R l sin(phi) (ad - td)^2 + zeta td
    C21 = zeta ad
    G11 = -G21 = -mp g l sin(phi)

where td, ad are the coordinate rates and zeta is a viscous damping
coefficient acting on both coordinates. The same motor torque tau enters
both rows (action and reaction about the pendulum shaft).

Energy bookkeeping uses the potential -mp g l cos(phi), i.e. the zero
level is the pendulum horizontal (phi = pi/2); the hanging equilibrium has
E_p = -mp g l.

All functions here are pure; state and parameters are immutable value
types, so evaluation is safe from multiple threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "PlantParams",
    "PlantState",
    "PlantDerivatives",
    "AffineAcceleration",
    "SingularMassMatrixError",
    "mass_matrix",
    "coriolis_and_damping",
    "gravity_vector",
    "accelerations",
    "acceleration_affine",
    "acceleration_rates",
    "step",
    "total_energy",
    "dissipation_power",
]

# M is uniformly positive definite for physical parameters; the determinant
# guard only catches misconfiguration, not a reachable dynamic state.
DET_TOLERANCE = 1e-12


class SingularMassMatrixError(ValueError):
    """Mass matrix determinant fell below tolerance (non-physical parameters)."""


@dataclass(frozen=True)
class PlantParams:
    """Physical constants of the sphere-pendulum system.

    Attributes:
        sphere_mass: shell mass Ms [kg]
        pendulum_mass: pendulum mass mp [kg]
        sphere_radius: shell radius R [m]
        pendulum_offset: distance l from shell center to pendulum mass [m]
        gravity: gravitational acceleration g [m/s^2]
        sphere_inertia: shell moment of inertia Is about its center [kg m^2]
        pendulum_inertia: pendulum moment of inertia Ip about its own
            center of mass [kg m^2] (0 for a point mass)
        damping: viscous damping coefficient zeta on both coordinate
            rates [N m s/rad]
    """

    sphere_mass: float = 3.0
    pendulum_mass: float = 2.0
    sphere_radius: float = 0.2
    pendulum_offset: float = 0.075
    gravity: float = 9.81
    # Default shell inertia is a thin spherical shell, (2/3) Ms R^2; the
    # pendulum defaults to a point mass at distance l.
    sphere_inertia: float = 0.08
    pendulum_inertia: float = 0.0
    damping: float = 0.2

    def validate(self) -> None:
        if self.sphere_mass <= 0:
            raise ValueError("sphere_mass must be > 0")
        if self.pendulum_mass <= 0:
            raise ValueError("pendulum_mass must be > 0")
        if self.sphere_radius <= 0:
            raise ValueError("sphere_radius must be > 0")
        if not 0 < self.pendulum_offset < self.sphere_radius:
            raise ValueError("pendulum_offset must satisfy 0 < l < sphere_radius")
        if self.gravity <= 0:
            raise ValueError("gravity must be > 0")
        if self.sphere_inertia < 0:
            raise ValueError("sphere_inertia must be >= 0")
        if self.pendulum_inertia < 0:
            raise ValueError("pendulum_inertia must be >= 0")
        if self.damping < 0:
            raise ValueError("damping must be >= 0")


@dataclass(frozen=True)
class PlantState:
    """Generalized coordinates and rates at a time instant."""

    theta: float = 0.0
    alpha: float = 0.0
    theta_dot: float = 0.0
    alpha_dot: float = 0.0
    time: float = 0.0


@dataclass(frozen=True)
class PlantDerivatives:
    """Coordinate accelerations produced by the mass-matrix solve."""

    theta_ddot: float
    alpha_ddot: float


def mass_matrix(params: PlantParams, state: PlantState) -> list[list[float]]:
    """Symmetric 2x2 inertia matrix [[M11, M12], [M21, M22]]."""
    p = params
    cos_phi = math.cos(state.alpha - state.theta)
    m11 = (
        p.sphere_mass * p.sphere_radius**2
        + p.pendulum_mass * p.sphere_radius**2
        + p.pendulum_mass * p.pendulum_offset**2
        + p.sphere_inertia
        + p.pendulum_inertia
        + 2.0 * p.pendulum_mass * p.sphere_radius * p.pendulum_offset * cos_phi
    )
    m12 = (
        -p.pendulum_mass * p.pendulum_offset**2
        - p.pendulum_inertia
        - p.pendulum_mass * p.sphere_radius * p.pendulum_offset * cos_phi
    )
    m22 = p.pendulum_mass * p.pendulum_offset**2 + p.pendulum_inertia
    return [[m11, m12], [m12, m22]]


def coriolis_and_damping(params: PlantParams, state: PlantState) -> list[float]:
    """Velocity-dependent terms [C11, C21], including viscous damping."""
    p = params
    phi = state.alpha - state.theta
    rel_rate = state.alpha_dot - state.theta_dot
    c11 = (
        p.pendulum_mass * p.sphere_radius * p.pendulum_offset * math.sin(phi) * rel_rate**2
        + p.damping * state.theta_dot
    )
    c21 = p.damping * state.alpha_dot
    return [c11, c21]


def gravity_vector(params: PlantParams, state: PlantState) -> list[float]:
    """Gravity terms [G11, G21]; antisymmetric, G11 = -G21."""
    p = params
    g11 = -p.pendulum_mass * p.gravity * p.pendulum_offset * math.sin(state.alpha - state.theta)
    return [g11, -g11]


@dataclass(frozen=True)
class AffineAcceleration:
    """Torque-affine form of the accelerations.

    The equations of motion are affine in the input, so
    theta_dd = drift_theta + gain_theta * tau (likewise alpha). Feedback
    laws that use the acceleration need this split to close their
    algebraic loop.
    """

    drift_theta: float
    gain_theta: float
    drift_alpha: float
    gain_alpha: float


def acceleration_affine(params: PlantParams, state: PlantState) -> AffineAcceleration:
    """Drift and input-gain parts of the accelerations at a state.

    Raises:
        SingularMassMatrixError: if |det M| < DET_TOLERANCE.
    """
    (m11, m12), (_, m22) = mass_matrix(params, state)
    c11, c21 = coriolis_and_damping(params, state)
    g11, g21 = gravity_vector(params, state)
    det = m11 * m22 - m12 * m12
    if abs(det) < DET_TOLERANCE:
        raise SingularMassMatrixError(f"mass matrix is singular (det = {det:.3e})")
    b1 = -c11 - g11
    b2 = -c21 - g21
    return AffineAcceleration(
        drift_theta=(m22 * b1 - m12 * b2) / det,
        gain_theta=(m22 - m12) / det,
        drift_alpha=(m11 * b2 - m12 * b1) / det,
        gain_alpha=(m11 - m12) / det,
    )


def accelerations(params: PlantParams, state: PlantState, torque: float) -> PlantDerivatives:
    """Solve M qdd = [tau, tau] - C - G for the coordinate accelerations.

    Uses the closed-form 2x2 inverse. The same torque drives both rows:
    the motor acts between pendulum and shell.

    Raises:
        SingularMassMatrixError: if |det M| < DET_TOLERANCE.
    """
    aff = acceleration_affine(params, state)
    return PlantDerivatives(
        theta_ddot=aff.drift_theta + aff.gain_theta * torque,
        alpha_ddot=aff.drift_alpha + aff.gain_alpha * torque,
    )


def acceleration_rates(params: PlantParams, state: PlantState, torque: float) -> PlantDerivatives:
    """Time derivatives of the accelerations (coordinate jerks).

    Differentiates M qdd + C + G = u along the flow with the torque held
    constant (zero-order hold), giving M qddd = -Mdot qdd - Cdot - Gdot.
    Needed by the sampled control loop, which feeds the learning law the
    analytic rate of the error derivative instead of differencing noise.
    """
    p = params
    phi = state.alpha - state.theta
    phi_dot = state.alpha_dot - state.theta_dot
    sin_phi = math.sin(phi)
    cos_phi = math.cos(phi)
    mrl = p.pendulum_mass * p.sphere_radius * p.pendulum_offset

    acc = accelerations(params, state, torque)
    phi_ddot = acc.alpha_ddot - acc.theta_ddot

    mdot11 = -2.0 * mrl * sin_phi * phi_dot
    mdot12 = mrl * sin_phi * phi_dot
    cdot1 = mrl * (cos_phi * phi_dot**3 + 2.0 * sin_phi * phi_dot * phi_ddot) + p.damping * acc.theta_ddot
    cdot2 = p.damping * acc.alpha_ddot
    gdot1 = -p.pendulum_mass * p.gravity * p.pendulum_offset * cos_phi * phi_dot

    b1 = -(mdot11 * acc.theta_ddot + mdot12 * acc.alpha_ddot) - cdot1 - gdot1
    b2 = -(mdot12 * acc.theta_ddot) - cdot2 + gdot1

    (m11, m12), (_, m22) = mass_matrix(params, state)
    det = m11 * m22 - m12 * m12
    return PlantDerivatives(
        theta_ddot=(m22 * b1 - m12 * b2) / det,
        alpha_ddot=(m11 * b2 - m12 * b1) / det,
    )


def _state_rates(params: PlantParams, y: tuple[float, float, float, float], torque: float):
    state = PlantState(theta=y[0], alpha=y[1], theta_dot=y[2], alpha_dot=y[3])
    acc = accelerations(params, state, torque)
    return (y[2], y[3], acc.theta_ddot, acc.alpha_ddot)


def step(params: PlantParams, state: PlantState, torque: float, dt: float) -> PlantState:
    """Advance the state by one classical RK4 step with constant torque."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    y = (state.theta, state.alpha, state.theta_dot, state.alpha_dot)
    k1 = _state_rates(params, y, torque)
    k2 = _state_rates(params, tuple(yi + 0.5 * dt * ki for yi, ki in zip(y, k1)), torque)
    k3 = _state_rates(params, tuple(yi + 0.5 * dt * ki for yi, ki in zip(y, k2)), torque)
    k4 = _state_rates(params, tuple(yi + dt * ki for yi, ki in zip(y, k3)), torque)
    new = [yi + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4)]
    return PlantState(
        theta=new[0], alpha=new[1], theta_dot=new[2], alpha_dot=new[3], time=state.time + dt
    )


def total_energy(params: PlantParams, state: PlantState) -> float:
    """Kinetic plus potential energy [J], zero potential at phi = pi/2."""
    p = params
    phi = state.alpha - state.theta
    rel_rate = state.alpha_dot - state.theta_dot
    # pendulum mass velocity: (-R td + rel l cos phi) j + (rel l sin phi) k
    v_y = -p.sphere_radius * state.theta_dot + rel_rate * p.pendulum_offset * math.cos(phi)
    v_z = rel_rate * p.pendulum_offset * math.sin(phi)
    kinetic = (
        0.5 * p.sphere_mass * (p.sphere_radius * state.theta_dot) ** 2
        + 0.5 * p.sphere_inertia * state.theta_dot**2
        + 0.5 * p.pendulum_inertia * rel_rate**2
        + 0.5 * p.pendulum_mass * (v_y**2 + v_z**2)
    )
    potential = -p.pendulum_mass * p.gravity * p.pendulum_offset * math.cos(phi)
    return kinetic + potential


def dissipation_power(params: PlantParams, state: PlantState) -> float:
    """Instantaneous power lost to viscous friction, zeta (td^2 + ad^2) [W]."""
    return params.damping * (state.theta_dot**2 + state.alpha_dot**2)
