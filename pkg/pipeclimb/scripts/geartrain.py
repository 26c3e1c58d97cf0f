"""
Three-Output Open Differential Module for the Pipe Climber Simulator

This module models the robot's transmission: a worm input stage feeding two
chained two-output open differentials, which together drive the three track
modules A, B and C. The gearbox is treated as a constraint network:

- Kinematics: the mean of the three output speeds is locked to k times the input speed
- Statics: every unlocked output carries the same torque (ideal open differential)
- Energy: the stage is lossless, so input power equals the summed output power

Key Features:
- Load-free speed split with stuck-output redistribution
- Loaded speed split from per-track monotone load curves, solved as a scalar
  bracketing root-finding problem on the common output torque
- Bisection (default, safe at Coulomb kinks) or scipy's brentq

Author: Pipe Climber Simulation Team
Date: 2026
"""

import logging
import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from pipeclimb.scripts.errors import (
    InfeasibleConstraintError,
    ParameterError,
    SolverError,
    UndefinedPowerError,
)
from pipeclimb.scripts.logger_setup import get_logger

OUTPUT_IDS = ("A", "B", "C")

MAX_ITERATIONS = 10_000
TOLERANCE = 1e-10
MAX_BRACKET_EXPANSIONS = 200
SOLVER_METHODS = ("bisect", "brentq")

logger = get_logger("geartrain")


def _check_positive(value, name):
    if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise ParameterError(f"{name} must be a positive finite number, got {value!r}", field=name)


@dataclass(frozen=True)
class ThreeOutputDifferential:
    """Constraint network of the three-output gearbox."""

    k: float
    stage_ratio: float = 1.0
    output_ids: tuple = OUTPUT_IDS

    def __post_init__(self):
        _check_positive(self.k, "k")
        _check_positive(self.stage_ratio, "stage_ratio")
        if len(self.output_ids) != 3 or len(set(self.output_ids)) != 3:
            raise ParameterError("a three-output differential needs exactly 3 distinct outputs",
                                 field="output_ids")

    def index_of(self, output_id):
        try:
            return self.output_ids.index(output_id)
        except ValueError:
            raise ParameterError(f"unknown output {output_id!r}; expected one of {self.output_ids}",
                                 field="output_ids") from None

    def intermediate_speed(self, omega_out):
        """Speed of the shaft linking the first stage to the B/C stage."""
        return (omega_out[1] + omega_out[2]) / (2.0 * self.stage_ratio)


@dataclass(frozen=True)
class LoadCurve:
    """
    Resisting torque of one track as a function of its shaft speed.

    torque(w) = coulomb_torque * sign(w) + viscous_coeff * w
    """

    coulomb_torque: float = 0.0
    viscous_coeff: float = 0.0
    locked: bool = False

    def __post_init__(self):
        for name in ("coulomb_torque", "viscous_coeff"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                # negative terms make the curve decrease somewhere on w >= 0
                raise ParameterError(f"load curve is not monotone: {name}={value!r}", field=name)

    @classmethod
    def lock(cls):
        return cls(locked=True)

    def torque(self, omega):
        if omega == 0:
            return 0.0
        return math.copysign(self.coulomb_torque, omega) + self.viscous_coeff * omega

    def inverse(self, tau):
        """Forward speed (w >= 0) at which the curve resists with torque tau."""
        if self.locked or tau <= self.coulomb_torque:
            return 0.0
        if self.viscous_coeff == 0:
            raise ParameterError("inverse undefined above the Coulomb torque when viscous_coeff is 0",
                                 field="viscous_coeff")
        return (tau - self.coulomb_torque) / self.viscous_coeff


@dataclass(frozen=True)
class SpeedSolution:
    omega_in: float
    omega_out: tuple
    torque_out: tuple
    torque_in: float
    residual: float
    common_torque: float = 0.0
    iterations: int = 0
    method: str = "free"
    locked: tuple = field(default_factory=tuple)

    def as_dict(self, output_ids=OUTPUT_IDS):
        record = {
            "omega_in": self.omega_in,
            "torque_in": self.torque_in,
            "common_torque": self.common_torque,
            "residual": self.residual,
            "iterations": self.iterations,
            "method": self.method,
            "locked": list(self.locked),
        }
        for output_id, omega, tau in zip(output_ids, self.omega_out, self.torque_out):
            record[f"omega_{output_id}"] = omega
            record[f"torque_{output_id}"] = tau
        return record


def compose_three_output(k, stage_ratio):
    """
    Compose the three-output differential from the input ratio and the stage ratio.

    Args:
        k (float): Mean output speed per unit input speed
        stage_ratio (float): Ratio of the internal B/C two-output stage

    Returns:
        ThreeOutputDifferential: Outputs A, B, C in fixed order
    """
    return ThreeOutputDifferential(k=k, stage_ratio=stage_ratio)


def kinematic_residual(diff, omega_out, omega_in):
    """Return mean(omega_out) - k * omega_in; zero for an admissible assignment."""
    return (omega_out[0] + omega_out[1] + omega_out[2]) / 3.0 - diff.k * omega_in


def _locked_indices(diff, locked):
    indices = sorted({diff.index_of(output_id) for output_id in locked})
    return indices


def solve_free_speeds(diff, omega_in, locked=()):
    """
    Split the input speed without loads: held outputs stop, the rest share equally.

    Args:
        diff (ThreeOutputDifferential): Gearbox
        omega_in (float): Input speed (rad/s); negative for reverse traversal
        locked (iterable): Output ids held at zero speed

    Returns:
        SpeedSolution: Zero torques everywhere
    """
    locked_idx = _locked_indices(diff, locked)
    free = [i for i in range(3) if i not in locked_idx]
    target = 3.0 * diff.k * omega_in

    if not free:
        if omega_in != 0:
            raise InfeasibleConstraintError("all three outputs are locked but the input turns")
        share = 0.0
    else:
        share = target / len(free)

    omega_out = tuple(share if i in free else 0.0 for i in range(3))
    return SpeedSolution(
        omega_in=omega_in,
        omega_out=omega_out,
        torque_out=(0.0, 0.0, 0.0),
        torque_in=0.0,
        residual=kinematic_residual(diff, omega_out, omega_in),
        locked=tuple(diff.output_ids[i] for i in locked_idx),
    )


def _expand_bracket(g, lo, hi):
    """Widen a caller-supplied bracket until g(lo) <= 0 <= g(hi)."""
    if not lo < hi:
        raise ParameterError(f"bracket must satisfy lo < hi, got ({lo!r}, {hi!r})", field="bracket")
    expansions = 0
    while g(lo) > 0:
        lo -= max(hi - lo, 1.0)
        expansions += 1
        if expansions > MAX_BRACKET_EXPANSIONS:
            raise SolverError("could not bracket the common torque from below", bracket=(lo, hi))
    while g(hi) < 0:
        hi += max(2.0 * (hi - lo), 1.0)
        expansions += 1
        if expansions > MAX_BRACKET_EXPANSIONS:
            raise SolverError("could not bracket the common torque from above", bracket=(lo, hi))
    return lo, hi


def _bisect(g, lo, hi, kinks, tol, max_iter):
    """
    Bisection on the non-decreasing function g.

    Between consecutive Coulomb kinks g is linear, so once the bracket holds no
    kink the root is interpolated directly and checked against tol.
    """
    g_lo, g_hi = g(lo), g(hi)
    if abs(g_lo) <= tol:
        return lo, 0
    if abs(g_hi) <= tol:
        return hi, 0

    iteration = 0
    while iteration < max_iter:
        iteration += 1
        if g_hi != g_lo and not any(lo < kink < hi for kink in kinks):
            candidate = lo - g_lo * (hi - lo) / (g_hi - g_lo)
            if lo < candidate < hi:
                g_c = g(candidate)
                if abs(g_c) <= tol:
                    return candidate, iteration
                if g_c < 0:
                    lo, g_lo = candidate, g_c
                else:
                    hi, g_hi = candidate, g_c

        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        g_mid = g(mid)
        if abs(g_mid) <= tol:
            return mid, iteration
        if g_mid < 0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid

    raise SolverError(
        f"torque balance did not converge after {iteration} iterations; last bracket [{lo!r}, {hi!r}]",
        bracket=(lo, hi),
        iterations=iteration,
    )


def _brentq(g, lo, hi, slope, tol, max_iter):
    g_lo, g_hi = g(lo), g(hi)
    if abs(g_lo) <= tol:
        return lo, 0
    if abs(g_hi) <= tol:
        return hi, 0
    root, info = brentq(g, lo, hi, xtol=tol / slope, maxiter=max(max_iter, 1),
                        full_output=True, disp=False)
    if not info.converged or abs(g(root)) > tol:
        raise SolverError(
            f"brentq did not converge after {info.iterations} iterations; bracket [{lo!r}, {hi!r}]",
            bracket=(lo, hi),
            iterations=info.iterations,
        )
    return root, info.iterations


def solve_loaded_speeds(diff, omega_in, loads, *, method="bisect", bracket=None, max_iter=MAX_ITERATIONS):
    """
    Split the input speed among three loaded outputs.

    Finds the common output torque tau* at which the unlocked load curves,
    inverted, satisfy the mean-speed constraint:
        g(tau) = sum_i w_i(tau) - 3 k w_in = 0
    g is non-decreasing, so a bracketing method always converges.

    Args:
        diff (ThreeOutputDifferential): Gearbox
        omega_in (float): Input speed (rad/s), >= 0
        loads (sequence of LoadCurve): One curve per output, in output order
        method (str): "bisect" or "brentq"
        bracket (tuple): Optional starting bracket for tau*
        max_iter (int): Iteration cap of the root finder

    Returns:
        SpeedSolution: Speeds, torques (locked outputs carry the reaction tau*)
    """
    loads = tuple(loads)
    if len(loads) != 3:
        raise ParameterError(f"expected 3 load curves, got {len(loads)}", field="loads")
    if method not in SOLVER_METHODS:
        raise ParameterError(f"unknown solver method {method!r}; expected one of {SOLVER_METHODS}",
                             field="solver_method")
    if not math.isfinite(omega_in) or omega_in < 0:
        raise ParameterError(f"loaded solve needs omega_in >= 0, got {omega_in!r}", field="omega_in")
    for output_id, load in zip(diff.output_ids, loads):
        if not isinstance(load, LoadCurve):
            raise ParameterError(f"output {output_id}: expected a LoadCurve, got {type(load).__name__}",
                                 field="loads")
        if not load.locked and load.viscous_coeff <= 0:
            raise ParameterError(f"output {output_id}: unlocked load curve needs viscous_coeff > 0",
                                 field="viscous_coeff")

    free = [i for i in range(3) if not loads[i].locked]
    locked_ids = tuple(diff.output_ids[i] for i in range(3) if loads[i].locked)
    target = 3.0 * diff.k * omega_in

    if not free and target != 0:
        raise InfeasibleConstraintError("all three outputs are locked but the input turns")

    iterations = 0
    if not free or target == 0:
        tau_star = 0.0
    else:
        tol = TOLERANCE * max(1.0, target)
        free_loads = [loads[i] for i in free]

        def g(tau):
            return sum(load.inverse(tau) for load in free_loads) - target

        if bracket is None:
            lo = 0.0
            hi = max(load.coulomb_torque + load.viscous_coeff * target for load in free_loads)
        else:
            lo, hi = _expand_bracket(g, float(bracket[0]), float(bracket[1]))

        if method == "bisect":
            kinks = [load.coulomb_torque for load in free_loads]
            tau_star, iterations = _bisect(g, lo, hi, kinks, tol, max_iter)
        else:
            slope = sum(1.0 / load.viscous_coeff for load in free_loads)
            tau_star, iterations = _brentq(g, lo, hi, slope, tol, max_iter)

        if logger.isEnabledFor(logging.DEBUG):
            logger.debug("tau*=%r after %d iterations (method=%s, bracket=[%r, %r])",
                         tau_star, iterations, method, lo, hi)

    omega_out = tuple(loads[i].inverse(tau_star) if i in free else 0.0 for i in range(3))
    torque_out = (tau_star, tau_star, tau_star)
    if omega_in != 0:
        torque_in = sum(t * w for t, w in zip(torque_out, omega_out)) / omega_in
    else:
        torque_in = 3.0 * diff.k * tau_star

    return SpeedSolution(
        omega_in=omega_in,
        omega_out=omega_out,
        torque_out=torque_out,
        torque_in=torque_in,
        residual=kinematic_residual(diff, omega_out, omega_in),
        common_torque=tau_star,
        iterations=iterations,
        method=method,
        locked=locked_ids,
    )


def input_torque(solution):
    """
    Input torque from the lossless power balance tau_in * w_in = sum tau_i * w_i.

    Args:
        solution (SpeedSolution): Solved gearbox state

    Returns:
        float: Input torque (N*mm)
    """
    power = sum(t * w for t, w in zip(solution.torque_out, solution.omega_out))
    if solution.omega_in == 0:
        if power != 0:
            raise UndefinedPowerError("input speed is zero but the outputs deliver power")
        return 0.0
    return power / solution.omega_in
