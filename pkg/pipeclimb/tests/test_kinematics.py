"""
Unit Tests for the Track Kinematics and Contact Module

Test Coverage:
- RobotConfig validation
- No-slip track speed requirements and their inverse (body speed)
- Spring normal forces, traction limit and traction violation
- Propulsive track torque (the wall load without the slip reaction)
- Slip ratio, including the degenerate zero-requirement case
- Per-track load curves (rolling resistance, gravity share, slip reaction)
- Joint check with the differential: required speeds satisfy its mean constraint

Author: Pipe Climber Simulation Team
Date: 2026
"""

import math

import numpy as np
import pytest

from pipeclimb.scripts.errors import DegenerateSlipError, ParameterError, RangeError
from pipeclimb.scripts.geartrain import ThreeOutputDifferential, kinematic_residual
from pipeclimb.scripts.kinematics import (
    RobotConfig,
    body_speed,
    compressions_for,
    gravity_share,
    normal_forces,
    propulsive_torque,
    required_track_speeds,
    slip_ratio,
    track_load_curve,
    traction_limit,
    traction_violated,
)
from pipeclimb.scripts.pipegeom import Elbow, PipeSpec, Straight


@pytest.fixture
def config():
    """Default robot: modules at 0, 120 and 240 deg."""
    return RobotConfig()


@pytest.fixture
def spec():
    return PipeSpec(inner_radius=20.0)


@pytest.mark.parametrize("kwargs", [
    {"spring_stiffness": 0.0},
    {"spring_preload": 20.0},
    {"spring_preload": -0.1},
    {"friction_coefficient": 0.0},
    {"sprocket_radius": -1.0},
    {"module_rolls": (0.0, 0.0, 1.0)},
    {"module_rolls": (0.0, 2.0 * math.pi, 1.0)},
    {"module_rolls": (0.0, 1.0)},
    {"nominal_compression": 17.0},
    {"slip_stiffness": -1.0},
])
def test_robot_config_rejects(kwargs):
    with pytest.raises(ParameterError):
        RobotConfig(**kwargs)


def test_elbow_compression_defaults_to_nominal():
    assert RobotConfig(nominal_compression=3.0).elbow_compression == 3.0
    assert RobotConfig(nominal_compression=3.0, elbow_compression=5.0).elbow_compression == 5.0


def test_required_speeds_straight(config, spec):
    assert required_track_speeds(33.62, Straight(350.0), spec, config) == (33.62, 33.62, 33.62)


def test_required_speeds_elbow_extrados(config, spec):
    """R = 2r with module A at the extrados: (1.5, 0.75, 0.75) V_c."""
    elbow = Elbow(40.0, math.pi / 2)
    speeds = required_track_speeds(10.0, elbow, spec, config)
    assert speeds == pytest.approx((15.0, 7.5, 7.5), rel=1e-12)
    assert sum(speeds) / 3.0 == pytest.approx(10.0, rel=1e-12)


def test_required_speeds_at_rest(config, spec):
    assert required_track_speeds(0.0, Elbow(40.0, 1.0), spec, config) == (0.0, 0.0, 0.0)


def test_required_speeds_reject_negative(config, spec):
    with pytest.raises(ParameterError):
        required_track_speeds(-1.0, Straight(1.0), spec, config)


def test_mean_requirement_equals_body_speed(config):
    """Cosine cancellation over 120 deg spacing, any elbow and any roll."""
    rng = np.random.default_rng(3)
    for _ in range(500):
        spec = PipeSpec(float(rng.uniform(5.0, 80.0)))
        elbow = Elbow(spec.inner_radius * float(rng.uniform(1.05, 6.0)), float(rng.uniform(0.1, math.pi)),
                      float(rng.uniform(-math.pi, math.pi)))
        v_c = float(rng.uniform(0.0, 100.0))
        roll = float(rng.uniform(-2.0 * math.pi, 2.0 * math.pi))
        speeds = required_track_speeds(v_c, elbow, spec, config, roll)
        assert sum(speeds) / 3.0 == pytest.approx(v_c, rel=1e-12, abs=1e-12)


def test_required_speeds_satisfy_differential_constraint(config):
    """A mean-constrained gearbox can deliver the no-slip requirements exactly."""
    rng = np.random.default_rng(5)
    for _ in range(200):
        spec = PipeSpec(float(rng.uniform(5.0, 80.0)))
        elbow = Elbow(spec.inner_radius * float(rng.uniform(1.05, 6.0)), float(rng.uniform(0.1, math.pi)),
                      float(rng.uniform(-math.pi, math.pi)))
        diff = ThreeOutputDifferential(k=float(rng.uniform(0.2, 3.0)))
        v_c = float(rng.uniform(1.0, 100.0))
        omega_required = [v / config.sprocket_radius
                          for v in required_track_speeds(v_c, elbow, spec, config, float(rng.uniform(0, 6.3)))]
        omega_in = v_c / (diff.k * config.sprocket_radius)
        assert kinematic_residual(diff, omega_required, omega_in) == pytest.approx(0.0, abs=1e-12 * v_c)


def test_extrados_module_fastest(config, spec):
    """The module with the largest cos(phi + roll - psi) needs the strictly largest speed."""
    rng = np.random.default_rng(9)
    for _ in range(200):
        elbow = Elbow(float(rng.uniform(25.0, 120.0)), float(rng.uniform(0.1, math.pi)),
                      float(rng.uniform(-math.pi, math.pi)))
        roll = float(rng.uniform(0.0, 2.0 * math.pi))
        speeds = required_track_speeds(30.0, elbow, spec, config, roll)
        cosines = [math.cos(phi + roll - elbow.bend_plane_roll) for phi in config.module_rolls]
        outer = int(np.argmax(cosines))
        others = [speeds[i] for i in range(3) if i != outer]
        assert speeds[outer] > max(others)


def test_required_speeds_periodic_in_roll(config, spec):
    elbow = Elbow(60.0, math.pi / 2, bend_plane_roll=0.3)
    assert required_track_speeds(20.0, elbow, spec, config, 0.7) == pytest.approx(
        required_track_speeds(20.0, elbow, spec, config, 0.7 + 2.0 * math.pi), rel=1e-12)


def test_body_speed_inverts_requirements(config, spec):
    elbow = Elbow(60.0, math.pi / 2, bend_plane_roll=1.1)
    speeds = required_track_speeds(33.62, elbow, spec, config, 0.4)
    assert body_speed(speeds, elbow, spec, config, 0.4) == pytest.approx(33.62, rel=1e-12)
    assert body_speed((30.0, 33.0, 36.0), Straight(10.0), spec, config) == pytest.approx(33.0)


@pytest.mark.parametrize("stiffness, deltas, expected", [
    (1.0, (0.0, 0.0, 0.0), (1.5, 1.5, 1.5)),
    (1.0, (16.0, 16.0, 16.0), (17.5, 17.5, 17.5)),
    (2.0, (4.0, 0.0, 1.0), (11.0, 3.0, 5.0)),
])
def test_normal_forces(stiffness, deltas, expected):
    config = RobotConfig(spring_stiffness=stiffness, spring_preload=1.5)
    assert normal_forces(config, deltas) == pytest.approx(expected)


@pytest.mark.parametrize("deltas", [(17.0, 0.0, 0.0), (0.0, -0.5, 0.0)])
def test_normal_forces_out_of_travel(deltas):
    with pytest.raises(RangeError):
        normal_forces(RobotConfig(spring_stiffness=1.0), deltas)


def test_compressions_per_segment_type():
    config = RobotConfig(nominal_compression=4.0, elbow_compression=6.0)
    assert compressions_for(Straight(1.0), config) == (4.0, 4.0, 4.0)
    assert compressions_for(Elbow(60.0, 1.0), config) == (6.0, 6.0, 6.0)


@pytest.mark.parametrize("normal, mu, expected", [(10.0, 0.5, 5.0), (0.0, 0.5, 0.0), (1.5, 0.5, 0.75)])
def test_traction_limit(normal, mu, expected):
    assert traction_limit(normal, mu) == pytest.approx(expected)


def test_traction_limit_rejects_negative_normal():
    with pytest.raises(ParameterError):
        traction_limit(-1.0, 0.5)


def test_traction_violated(config):
    """r_s = 10 mm, mu = 0.5, N = 11 N: limit 5.5 N, i.e. 55 N*mm of torque."""
    assert not traction_violated(54.0, 11.0, config)
    assert traction_violated(56.0, 11.0, config)
    assert traction_violated(-56.0, 11.0, config)


@pytest.mark.parametrize("inclination, expected", [
    (0.0, 10.0 * 0.11 + 3.362),
    (math.pi / 2, 10.0 * (0.11 + 0.8 * 9.81 / 3.0) + 3.362),
    (-math.pi / 2, 10.0 * 0.11 + 3.362),
])
def test_propulsive_torque(config, inclination, expected):
    """Rolling resistance, uphill weight share and damping at w = 3.362 rad/s."""
    seg = Straight(100.0, inclination)
    torque = propulsive_torque(11.0, config, gravity_share(config, seg), 3.362)
    assert torque == pytest.approx(expected, rel=1e-12)


def test_traction_uses_propulsive_torque(config):
    """The slip reaction dominates the load curve torque but stays within traction."""
    seg = Straight(100.0)
    share = gravity_share(config, seg)
    curve = track_load_curve(11.0, seg, config, share, required_speed=33.62)
    omega = 3.362
    assert curve.torque(omega) > 1000.0
    assert not traction_violated(propulsive_torque(11.0, config, share, omega), 11.0, config)


def test_climb_on_slippery_wall_violates_traction():
    config = RobotConfig(friction_coefficient=0.001)
    seg = Straight(100.0, math.pi / 2)
    torque = propulsive_torque(11.0, config, gravity_share(config, seg), 3.362)
    assert traction_violated(torque, 11.0, config)


@pytest.mark.parametrize("actual, required, expected", [
    (33.62, 33.62, 0.0),
    (36.982, 33.62, 0.1),
    (0.0, 0.0, 0.0),
    (30.258, 33.62, -0.1),
])
def test_slip_ratio(actual, required, expected):
    assert slip_ratio(actual, required) == pytest.approx(expected, abs=1e-12)


def test_slip_ratio_degenerate():
    with pytest.raises(DegenerateSlipError):
        slip_ratio(1.0, 0.0)


def test_load_curve_rolling_resistance():
    """Horizontal, N = 10, C_rr = 0.01, r_s = 20 -> 2 N*mm."""
    config = RobotConfig(sprocket_radius=20.0, rolling_resistance=0.01)
    seg = Straight(100.0, inclination=0.0)
    curve = track_load_curve(10.0, seg, config, gravity_share(config, seg))
    assert curve.coulomb_torque == pytest.approx(2.0)
    assert curve.viscous_coeff == pytest.approx(config.track_damping)


def test_load_curve_gravity_share():
    """Vertical, m = 1, g = 9810, r_s = 20 -> 65400 N*mm per track."""
    config = RobotConfig(sprocket_radius=20.0, robot_mass=1.0, gravity=9810.0)
    seg = Straight(100.0, inclination=math.pi / 2)
    share = gravity_share(config, seg)
    assert share == pytest.approx(3270.0)
    assert track_load_curve(0.0, seg, config, share).coulomb_torque == pytest.approx(65400.0)


def test_load_curve_share_from_segment(config):
    """Without an explicit share the segment inclination decides it."""
    seg = Straight(100.0, inclination=math.pi / 2)
    derived = track_load_curve(11.0, seg, config)
    explicit = track_load_curve(11.0, seg, config, gravity_share(config, seg))
    assert derived == explicit
    assert derived.coulomb_torque == pytest.approx(10.0 * (0.11 + 0.8 * 9.81 / 3.0), rel=1e-12)
    assert track_load_curve(11.0, seg, config, 0.0).coulomb_torque == pytest.approx(1.1, rel=1e-12)


def test_load_curve_downhill_adds_no_coulomb(config):
    seg = Straight(100.0, inclination=-math.pi / 2)
    share = gravity_share(config, seg)
    assert share < 0
    assert track_load_curve(0.0, seg, config, share).coulomb_torque == 0.0


def test_load_curve_slip_reaction(config):
    """Slip stiffness maps to c_slip * N * r_s^2 / v_req in the speed domain."""
    seg = Straight(100.0)
    curve = track_load_curve(11.0, seg, config, 0.0, required_speed=33.62)
    expected = config.track_damping + config.slip_stiffness * 11.0 * 100.0 / 33.62
    assert curve.viscous_coeff == pytest.approx(expected, rel=1e-12)


def test_load_curve_rejects_negative_normal(config):
    with pytest.raises(ParameterError):
        track_load_curve(-1.0, Straight(1.0), config, 0.0)


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
