"""
Quasi-Static Traversal Simulation Module for the Pipe Climber Simulator

This module steps the robot through a pipe network. At every fixed time step
the gear train and the track loads are in equilibrium (no inertia):

1. Locate the segment under the robot
2. Build spring normal forces and per-track load curves
3. Let the three-output differential split the input speed among the tracks
4. Recover the body speed from the track speeds and advance the robot
5. Record track speeds, no-slip requirements, slip and normal forces

Key Features:
- Deterministic fixed-step integration (identical configs give identical traces)
- Final step shortened to land exactly on the network end
- Timeout and solver failures reported through the summary status
- Pipe network presets for the experiment layouts
- Parameter sweeps run concurrently in a process pool

Author: Pipe Climber Simulation Team
Date: 2026
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime

import pandas as pd

from pipeclimb.scripts.errors import ParameterError, PipeClimbError, RangeError
from pipeclimb.scripts.geartrain import SOLVER_METHODS, ThreeOutputDifferential, solve_loaded_speeds
from pipeclimb.scripts.kinematics import (
    ContactState,
    RobotConfig,
    body_speed,
    compressions_for,
    gravity_share,
    normal_forces,
    propulsive_torque,
    required_track_speeds,
    slip_ratio,
    track_load_curve,
    traction_violated,
)
from pipeclimb.scripts.logger_setup import get_logger
from pipeclimb.scripts.metrics import SimSummary, summarize
from pipeclimb.scripts.pipegeom import (
    PipeNetwork,
    Straight,
    centerline_length,
    long_radius_elbow,
    segment_at,
)

TRACE_COLUMNS = [
    "t_s", "s_mm", "segment_idx",
    "vA_mm_s", "vB_mm_s", "vC_mm_s",
    "reqA_mm_s", "reqB_mm_s", "reqC_mm_s",
    "slipA", "slipB", "slipC",
    "NA_N", "NB_N", "NC_N",
]
FLAG_COLUMNS = ["traction_violation"]

PRESETS = ("vertical_climb", "elbow90", "horizontal", "u_piece", "full_circuit")
U_PIECE_MODES = ("single", "double")
BEND_ROLLS = (0.0, math.pi / 3.0, math.pi)


@dataclass(frozen=True)
class SimConfig:
    robot: RobotConfig
    diff: ThreeOutputDifferential
    network: PipeNetwork
    dt: float = 0.001
    omega_in: float = None
    v_target: float = None
    robot_roll: float = 0.0
    max_time: float = 600.0
    solver_method: str = "bisect"

    def __post_init__(self):
        if not math.isfinite(self.dt) or self.dt <= 0:
            raise ParameterError(f"dt must be > 0, got {self.dt!r}", field="dt")
        if not math.isfinite(self.max_time) or self.max_time <= 0:
            raise ParameterError(f"max_time must be > 0, got {self.max_time!r}", field="max_time")
        if (self.omega_in is None) == (self.v_target is None):
            raise ParameterError("exactly one of omega_in / v_target must be given", field="v_target")
        speed_field = "omega_in" if self.omega_in is not None else "v_target"
        speed = getattr(self, speed_field)
        if not math.isfinite(speed) or speed < 0:
            raise ParameterError(f"{speed_field} must be >= 0, got {speed!r}", field=speed_field)
        if self.solver_method not in SOLVER_METHODS:
            raise ParameterError(f"unknown solver method {self.solver_method!r}", field="solver_method")

    @property
    def input_speed(self):
        """Gearbox input speed (rad/s)."""
        if self.omega_in is not None:
            return self.omega_in
        return self.v_target / (self.diff.k * self.robot.sprocket_radius)

    @property
    def reference_speed(self):
        """Straight-line body speed the input commands (mm/s)."""
        return self.diff.k * self.input_speed * self.robot.sprocket_radius


@dataclass(frozen=True)
class SimState:
    t: float = 0.0
    s: float = 0.0
    odometers: tuple = (0.0, 0.0, 0.0)
    solution: object = None
    contact: ContactState = None
    segment_index: int = 0
    step_index: int = 0


class SimTrace:
    """Per-step records of a run."""

    def __init__(self, records=None, start_time=None, start_position=None):
        self.records = list(records or [])
        self.start_time = start_time
        self.start_position = start_position

    def __len__(self):
        return len(self.records)

    def append(self, record):
        self.records.append(record)

    def to_frame(self):
        frame = pd.DataFrame(self.records, columns=TRACE_COLUMNS + FLAG_COLUMNS)
        frame["segment_idx"] = frame["segment_idx"].astype("int64")
        frame["traction_violation"] = frame["traction_violation"].astype(bool)
        return frame


def preset_network(name, spec, *, bend_radius=None, u_piece_mode="single", straight_length=350.0):
    """
    Build one of the experiment layouts.

    Args:
        name (str): vertical_climb, elbow90, horizontal, u_piece or full_circuit
        spec (PipeSpec): Pipe dimensions (from the scenario)
        bend_radius (float): Elbow bend radius override (default long-radius 3r)
        u_piece_mode (str): "single" half-turn elbow or "double" chained 90 deg elbows
        straight_length (float): Length of straight segments (mm)

    Returns:
        tuple: (PipeNetwork, suggested robot rolls in rad)
    """
    if u_piece_mode not in U_PIECE_MODES:
        raise ParameterError(f"unknown u_piece_mode {u_piece_mode!r}; expected one of {U_PIECE_MODES}",
                             field="u_piece_mode")

    def u_piece(inclination=0.0):
        if u_piece_mode == "single":
            return [long_radius_elbow(spec, math.pi, 0.0, inclination, bend_radius=bend_radius)]
        return [long_radius_elbow(spec, math.pi / 2.0, 0.0, inclination, bend_radius=bend_radius)
                for _ in range(2)]

    if name == "vertical_climb":
        return PipeNetwork(spec, [Straight(straight_length, math.pi / 2.0)]), (0.0,)
    if name == "horizontal":
        return PipeNetwork(spec, [Straight(straight_length, 0.0)]), (0.0,)
    if name == "elbow90":
        return PipeNetwork(spec, [long_radius_elbow(spec, math.pi / 2.0, bend_radius=bend_radius)]), BEND_ROLLS
    if name == "u_piece":
        return PipeNetwork(spec, u_piece()), BEND_ROLLS
    if name == "full_circuit":
        segments = [
            Straight(straight_length, math.pi / 2.0),
            long_radius_elbow(spec, math.pi / 2.0, 0.0, math.pi / 4.0, bend_radius=bend_radius),
            Straight(straight_length, 0.0),
        ] + u_piece()
        return PipeNetwork(spec, segments), BEND_ROLLS
    raise ParameterError(f"unknown preset {name!r}; expected one of {PRESETS}", field="preset")


class TraversalSimulator:

    def __init__(self, cfg):
        """
        Set up a run of the given configuration.

        Args:
            cfg (SimConfig): Immutable run configuration
        """
        self.cfg = cfg
        self.logger = get_logger("sim")
        self.network = cfg.network
        self.spec = cfg.network.spec
        self.total_length = centerline_length(cfg.network)

    def initial_state(self):
        return SimState()

    def step(self, state):
        """
        Advance the robot by one time step.

        Args:
            state (SimState): Current state, s < network end

        Returns:
            SimState: State at the end of the step
        """
        cfg, robot = self.cfg, self.cfg.robot
        if state.s >= self.total_length:
            raise RangeError(f"robot already at the network end (s={state.s!r})")

        index, _ = segment_at(self.network, state.s)
        seg = self.network.segments[index]

        forces = normal_forces(robot, compressions_for(seg, robot))
        reference = required_track_speeds(cfg.reference_speed, seg, self.spec, robot, cfg.robot_roll)
        share = gravity_share(robot, seg)
        loads = [track_load_curve(force, seg, robot, share, required_speed=req)
                 for force, req in zip(forces, reference)]

        solution = solve_loaded_speeds(cfg.diff, cfg.input_speed, loads, method=cfg.solver_method)
        speeds = tuple(omega * robot.sprocket_radius for omega in solution.omega_out)
        v_c = body_speed(speeds, seg, self.spec, robot, cfg.robot_roll)

        remaining = self.total_length - state.s
        if v_c > 0 and v_c * cfg.dt >= remaining:
            interval, s_next, step_next = remaining / v_c, self.total_length, state.step_index
        else:
            interval, s_next, step_next = cfg.dt, state.s + v_c * cfg.dt, state.step_index + 1

        required = required_track_speeds(v_c, seg, self.spec, robot, cfg.robot_roll)
        contact = ContactState(
            compression=compressions_for(seg, robot),
            normal_force=forces,
            required_speed=required,
            actual_speed=speeds,
            slip=tuple(slip_ratio(v, req) for v, req in zip(speeds, required)),
            traction_violation=any(
                traction_violated(propulsive_torque(force, robot, share, omega), force, robot)
                for force, omega in zip(forces, solution.omega_out)
            ),
        )

        return SimState(
            t=state.step_index * cfg.dt + interval,
            s=s_next,
            odometers=tuple(d + v * interval for d, v in zip(state.odometers, speeds)),
            solution=solution,
            contact=contact,
            segment_index=index,
            step_index=step_next,
        )

    @staticmethod
    def record(state):
        contact = state.contact
        return ((state.t, state.s, state.segment_index)
                + contact.actual_speed + contact.required_speed + contact.slip + contact.normal_force
                + (contact.traction_violation,))

    def run(self):
        """
        Step until the robot reaches the network end or max_time elapses.

        Returns:
            tuple: (SimTrace, SimSummary)
        """
        self.logger.info("=" * 60)
        self.logger.info("Pipe Climber Traversal Simulation")
        start_time = time.time()
        self.logger.info(f"Started at: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        self.logger.info(f"Network: {len(self.network.segments)} segments, {self.total_length:.3f} mm; "
                         f"input speed {self.cfg.input_speed:.6g} rad/s, dt {self.cfg.dt} s")
        self.logger.info("=" * 60)

        trace = SimTrace(start_time=0.0, start_position=0.0)
        state = self.initial_state()
        status, error = "completed", None
        current_segment, violations_reported = None, set()

        try:
            while state.s < self.total_length:
                if state.t >= self.cfg.max_time:
                    status = "timeout"
                    self.logger.warning(f"Timeout at t={state.t:.3f} s, s={state.s:.3f} mm")
                    break
                state = self.step(state)
                trace.append(self.record(state))

                if state.segment_index != current_segment:
                    current_segment = state.segment_index
                    self.logger.debug(f"Entered segment {current_segment} at t={state.t:.3f} s")
                if state.contact.traction_violation and current_segment not in violations_reported:
                    violations_reported.add(current_segment)
                    self.logger.info(f"Traction limit exceeded in segment {current_segment} at t={state.t:.3f} s")
        except PipeClimbError as e:
            status, error = "solver_error", str(e)
            self.logger.error(f"Simulation stopped at t={state.t:.3f} s: {e}", exc_info=True)

        if len(trace):
            rolls = tuple(roll + self.cfg.robot_roll for roll in self.cfg.robot.module_rolls)
            summary = summarize(trace, self.network, rolls=rolls)
        else:
            summary = SimSummary.empty()
        summary = replace(summary, status=status, error=error)

        end_time = time.time()
        self.logger.info("=" * 60)
        self.logger.info(f"Status: {status}; simulated time {summary.total_time_s:.4f} s over {len(trace)} steps")
        self.logger.info(f"Total runtime: {(end_time - start_time):.2f} seconds")
        self.logger.info("=" * 60)
        return trace, summary


def step(state, cfg):
    """Advance one time step of the given configuration."""
    return TraversalSimulator(cfg).step(state)


def run(cfg):
    """Run a configuration to completion (or timeout) and summarize it."""
    return TraversalSimulator(cfg).run()


def run_sweep(configs, max_workers=None):
    """
    Run independent configurations concurrently.

    Returns:
        list: (SimTrace, SimSummary) per configuration, in input order
    """
    configs = list(configs)
    if len(configs) <= 1 or max_workers == 1:
        return [run(cfg) for cfg in configs]
    with ProcessPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(run, configs))
