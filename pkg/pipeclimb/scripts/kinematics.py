"""
Track Kinematics and Contact Module for the Pipe Climber Simulator

This module turns pipe geometry and the robot's mechanical parameters into
what the gearbox solver needs: how fast each track must run to follow the
wall without slip, how hard the spring-loaded modules press on the wall, how
much traction that buys, and the load curve each track presents to the
differential.

Key Features:
- No-slip track speed requirements in straights and elbows
- Body speed recovered from actual track speeds (inverse requirement map)
- Spring normal forces with preload and travel limits
- Coulomb traction limit checked against the propulsive track torque, and slip ratio
- Per-track load curves: rolling resistance, gravity share, slip reaction

Author: Pipe Climber Simulation Team
Date: 2026
"""

import math
from dataclasses import dataclass

from pipeclimb.scripts.errors import DegenerateSlipError, ParameterError, RangeError
from pipeclimb.scripts.geartrain import LoadCurve
from pipeclimb.scripts.pipegeom import Elbow

DEFAULT_ROLLS = (0.0, 2.0 * math.pi / 3.0, 4.0 * math.pi / 3.0)


@dataclass(frozen=True)
class RobotConfig:
    """
    Mechanical parameters of the robot.

    Units: mm, N, kg, s, rad. gravity is in N/kg so that mass * gravity is a force in N.
    """

    module_rolls: tuple = DEFAULT_ROLLS
    spring_stiffness: float = 2.0
    spring_preload: float = 1.5
    spring_max_travel: float = 16.0
    sprocket_radius: float = 10.0
    robot_mass: float = 0.8
    friction_coefficient: float = 0.5
    rolling_resistance: float = 0.01
    slip_stiffness: float = 100.0
    track_damping: float = 1.0
    nominal_compression: float = 4.0
    elbow_compression: float = None
    gravity: float = 9.81

    def __post_init__(self):
        object.__setattr__(self, "module_rolls", tuple(float(roll) for roll in self.module_rolls))
        if self.elbow_compression is None:
            object.__setattr__(self, "elbow_compression", self.nominal_compression)

        if len(self.module_rolls) != 3:
            raise ParameterError("exactly three module rolls are required", field="module_rolls")
        wrapped = [roll % (2.0 * math.pi) for roll in self.module_rolls]
        if len(set(wrapped)) != 3:
            raise ParameterError("module rolls must be pairwise distinct", field="module_rolls")

        for name in ("spring_stiffness", "sprocket_radius", "friction_coefficient", "track_damping",
                     "gravity"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be > 0, got {value!r}", field=name)
        for name in ("robot_mass", "rolling_resistance", "slip_stiffness"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ParameterError(f"{name} must be >= 0, got {value!r}", field=name)
        if not 0 <= self.spring_preload <= self.spring_max_travel:
            raise ParameterError(
                f"spring_preload must lie in [0, spring_max_travel={self.spring_max_travel}], "
                f"got {self.spring_preload!r}",
                field="spring_preload",
            )
        for name in ("nominal_compression", "elbow_compression"):
            value = getattr(self, name)
            if not 0 <= value <= self.spring_max_travel:
                raise ParameterError(f"{name} must lie in [0, {self.spring_max_travel}], got {value!r}",
                                     field=name)


@dataclass(frozen=True)
class ContactState:
    compression: tuple
    normal_force: tuple
    required_speed: tuple
    actual_speed: tuple
    slip: tuple
    traction_violation: bool = False


def _bend_factors(seg, spec, config, robot_roll):
    """(R + r*cos(phi_i + roll - psi)) / R for each module."""
    return tuple(
        (seg.bend_radius + spec.inner_radius * math.cos(roll + robot_roll - seg.bend_plane_roll))
        / seg.bend_radius
        for roll in config.module_rolls
    )


def required_track_speeds(body_speed, seg, spec, config, robot_roll=0.0):
    """
    Track speeds that follow the wall without slip at the given body speed.

    Args:
        body_speed (float): Centerline speed V_c (mm/s), >= 0
        seg (Straight | Elbow): Current segment
        spec (PipeSpec): Pipe dimensions
        config (RobotConfig): Robot parameters (module rolls)
        robot_roll (float): Roll of the whole robot about the pipe axis (rad)

    Returns:
        tuple: Three speeds (mm/s)
    """
    if body_speed < 0:
        raise ParameterError(f"body speed must be >= 0, got {body_speed!r}", field="body_speed")
    if not isinstance(seg, Elbow):
        return (body_speed, body_speed, body_speed)
    return tuple(body_speed * factor for factor in _bend_factors(seg, spec, config, robot_roll))


def body_speed(track_speeds, seg, spec, config, robot_roll=0.0):
    """
    Centerline speed implied by actual track speeds: the mean of the
    geometry-corrected speeds, the exact inverse of required_track_speeds.
    """
    if not isinstance(seg, Elbow):
        return sum(track_speeds) / 3.0
    factors = _bend_factors(seg, spec, config, robot_roll)
    return sum(speed / factor for speed, factor in zip(track_speeds, factors)) / 3.0


def compressions_for(seg, config):
    """Nominal spring compression of the three modules in this segment type."""
    value = config.elbow_compression if isinstance(seg, Elbow) else config.nominal_compression
    return (value, value, value)


def normal_forces(config, compressions):
    """
    Wall normal force of each module: N_i = K_s * (preload + compression_i).

    Raises:
        RangeError: A compression outside [0, spring_max_travel] (jammed or lost contact)
    """
    forces = []
    for index, delta in enumerate(compressions):
        if not 0 <= delta <= config.spring_max_travel:
            raise RangeError(
                f"module {index}: compression {delta!r} mm outside [0, {config.spring_max_travel}] mm"
            )
        forces.append(config.spring_stiffness * (config.spring_preload + delta))
    return tuple(forces)


def traction_limit(normal_force, mu):
    """Largest tangential force a track can transmit without slipping (mu * N)."""
    if normal_force < 0:
        raise ParameterError(f"normal force must be >= 0, got {normal_force!r}", field="normal_force")
    return mu * normal_force


def tangential_force(torque, config):
    return torque / config.sprocket_radius


def traction_violated(torque, normal_force, config):
    """True when the track torque needs more tangential force than mu * N provides."""
    return abs(tangential_force(torque, config)) > traction_limit(normal_force, config.friction_coefficient)


def slip_ratio(v_actual, v_required):
    """
    Slip of a track: positive when it overspeeds (slides), negative when it drags.
    """
    if v_required == 0:
        if v_actual == 0:
            return 0.0
        raise DegenerateSlipError(f"required speed is 0 but the track moves at {v_actual!r} mm/s")
    return (v_actual - v_required) / v_required


def _weight_share(config, seg):
    return config.robot_mass * config.gravity * math.sin(seg.inclination) / 3.0


def gravity_share(config, seg):
    """Weight component along the pipe axis carried by one track (equal split)."""
    return _weight_share(config, seg)


def _coulomb_torque(normal_force, config, share):
    return config.sprocket_radius * (config.rolling_resistance * normal_force + max(0.0, share))


def propulsive_torque(normal_force, config, share, omega):
    """
    Torque a track must pass to the wall to keep moving: rolling resistance,
    uphill weight share and drive damping at shaft speed omega (N*mm).
    The slip reaction of the load curve is not a wall force and is left out.
    """
    return _coulomb_torque(normal_force, config, share) + config.track_damping * abs(omega)


def track_load_curve(normal_force, seg, config, gravity_share=None, *, required_speed=None):
    """
    Load curve a track presents to its differential output.

    Coulomb part: sprocket radius x (rolling resistance + uphill gravity share).
    Viscous part: the track's drive damping plus, when a required speed is
    known, the slip stiffness mapped to the speed domain (v = w*r_s, s = v/v_req - 1).

    Args:
        normal_force (float): Wall normal force of the module (N)
        seg (Straight | Elbow): Current segment; its inclination gives the
            gravity share when none is passed
        config (RobotConfig): Robot parameters
        gravity_share (float): Axial weight share of this track (N), optional
        required_speed (float): No-slip track speed (mm/s), optional

    Returns:
        LoadCurve: Torques in N*mm
    """
    if normal_force < 0:
        raise ParameterError(f"normal force must be >= 0, got {normal_force!r}", field="normal_force")
    share = _weight_share(config, seg) if gravity_share is None else gravity_share
    radius = config.sprocket_radius
    viscous = config.track_damping
    if required_speed is not None and required_speed > 0:
        viscous += config.slip_stiffness * normal_force * radius * radius / required_speed
    return LoadCurve(coulomb_torque=_coulomb_torque(normal_force, config, share), viscous_coeff=viscous)
