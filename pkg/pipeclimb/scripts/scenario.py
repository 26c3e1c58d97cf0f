"""
Scenario Configuration Module for the Pipe Climber Simulator

This module reads scenario files (JSON) and turns them into validated domain
objects ready to simulate. Every allowed key and its type is listed in
pipeclimb/data/scenario_schema.json; anything else is rejected.

Key Features:
- Unknown sections and keys are hard errors (no silent typos)
- Type checking against the schema before any object is built
- Angles given in degrees (`_deg` keys) and converted to radians
- Domain invariant violations reported with the offending dotted key
- Networks from a preset name or an explicit segment list

Author: Pipe Climber Simulation Team
Date: 2026
"""

import json
import math
import os
from dataclasses import dataclass
from functools import lru_cache

from pipeclimb.scripts.errors import ConfigError, ParameterError, RangeError
from pipeclimb.scripts.geartrain import ThreeOutputDifferential
from pipeclimb.scripts.kinematics import RobotConfig
from pipeclimb.scripts.logger_setup import get_logger
from pipeclimb.scripts.pipegeom import Elbow, PipeNetwork, PipeSpec, Straight, long_radius_elbow
from pipeclimb.scripts.sim import BEND_ROLLS, SimConfig, preset_network

SCHEMA_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                           "data", "scenario_schema.json")

SIM_FIELD_KEYS = {"robot_roll": "sim.roll_deg", "solver_method": "differential.solver_method"}
ROBOT_FIELD_KEYS = {"module_rolls": "module_rolls_deg"}
PRESET_FIELD_KEYS = {"length": "straight_length", "bend_angle": "preset"}
SEGMENT_FIELD_KEYS = {"bend_angle": "bend_angle_deg", "bend_plane_roll": "bend_plane_roll_deg",
                      "inclination": "inclination_deg"}


@lru_cache(maxsize=1)
def load_schema(path=SCHEMA_PATH):
    with open(path) as f:
        return json.load(f)


@dataclass(frozen=True)
class Scenario:
    name: str
    sim: SimConfig
    suggested_rolls: tuple = (0.0,)
    output_dir: str = None
    source: str = None

    @property
    def network(self):
        return self.sim.network

    @property
    def robot(self):
        return self.sim.robot

    @property
    def diff(self):
        return self.sim.diff


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _check_type(key, value, type_tag):
    if type_tag == "float":
        ok = _is_number(value) and math.isfinite(value)
    elif type_tag == "int":
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif type_tag == "string":
        ok = isinstance(value, str)
    elif type_tag == "bool":
        ok = isinstance(value, bool)
    elif type_tag == "float_list":
        ok = isinstance(value, list) and all(_is_number(v) and math.isfinite(v) for v in value)
    elif type_tag == "segment_list":
        ok = isinstance(value, list) and all(isinstance(v, dict) for v in value)
    else:
        raise ConfigError(key, f"schema uses unknown type tag {type_tag!r}")
    if not ok:
        raise ConfigError(key, f"expected {type_tag}, got {type(value).__name__} {value!r}")


def _check_keys(prefix, mapping, allowed):
    for key, value in mapping.items():
        dotted = f"{prefix}.{key}" if prefix else key
        if key not in allowed:
            raise ConfigError(dotted, f"unknown key (allowed: {', '.join(sorted(allowed))})")
        _check_type(dotted, value, allowed[key])


def validate_document(document, schema=None):
    """
    Check a parsed scenario document against the schema.

    Raises:
        ConfigError: Unknown section/key, wrong type or missing required key
    """
    schema = schema or load_schema()
    if not isinstance(document, dict):
        raise ConfigError("", "scenario document must be a JSON object")

    sections = schema["sections"]
    top_level = schema["top_level"]
    for key, value in document.items():
        if key in top_level:
            _check_type(key, value, top_level[key])
        elif key in sections:
            if not isinstance(value, dict):
                raise ConfigError(key, "section must be a JSON object")
            _check_keys(key, value, sections[key])
        else:
            raise ConfigError(key, "unknown section")

    for section in schema["required_sections"]:
        if section not in document:
            raise ConfigError(section, "required section is missing")
    for key in schema["required_keys"]["pipe"]:
        if key not in document["pipe"]:
            raise ConfigError(f"pipe.{key}", "required key is missing")

    for index, item in enumerate(document["network"].get("segments", [])):
        prefix = f"network.segments[{index}]"
        seg_type = item.get("type")
        if seg_type not in schema["segment_types"]:
            raise ConfigError(f"{prefix}.type", f"expected one of {sorted(schema['segment_types'])}, "
                                                f"got {seg_type!r}")
        _check_keys(prefix, {k: v for k, v in item.items() if k != "type"}, schema["segment_types"][seg_type])
        for key in schema["required_keys"][seg_type]:
            if key not in item:
                raise ConfigError(f"{prefix}.{key}", "required key is missing")


def _build(key_for, builder):
    """Run a constructor, turning invariant violations into ConfigError naming the key."""
    try:
        return builder()
    except (ParameterError, RangeError) as e:
        raise ConfigError(key_for(getattr(e, "field", None)), str(e)) from e


def _build_segment(item, spec, prefix):
    def key_for(field):
        return f"{prefix}.{SEGMENT_FIELD_KEYS.get(field, field)}" if field else prefix

    if item["type"] == "straight":
        return _build(key_for, lambda: Straight(
            length=item["length"],
            inclination=math.radians(item.get("inclination_deg", 0.0)),
        ))
    angle = math.radians(item["bend_angle_deg"])
    roll = math.radians(item.get("bend_plane_roll_deg", 0.0))
    inclination = math.radians(item.get("inclination_deg", 0.0))
    if "bend_radius" in item:
        return _build(key_for, lambda: Elbow(item["bend_radius"], angle, roll, inclination))
    return _build(key_for, lambda: long_radius_elbow(spec, angle, roll, inclination))


def build_network(section, spec):
    """
    Build the pipe network of a scenario.

    Returns:
        tuple: (PipeNetwork, suggested rolls)
    """
    has_preset, has_segments = "preset" in section, "segments" in section
    if has_preset == has_segments:
        raise ConfigError("network", "give exactly one of 'preset' or 'segments'")

    if has_preset:
        options = {key: section[key] for key in ("bend_radius", "u_piece_mode", "straight_length")
                   if key in section}
        return _build(lambda field: f"network.{PRESET_FIELD_KEYS.get(field, field)}" if field else "network",
                      lambda: preset_network(section["preset"], spec, **options))

    preset_only = [key for key in ("bend_radius", "u_piece_mode", "straight_length") if key in section]
    if preset_only:
        raise ConfigError(f"network.{preset_only[0]}", "only valid together with 'preset'")
    segments = [_build_segment(item, spec, f"network.segments[{index}]")
                for index, item in enumerate(section["segments"])]
    network = _build(lambda field: "network.segments", lambda: PipeNetwork(spec, segments))
    has_bend = any(isinstance(seg, Elbow) for seg in segments)
    return network, (BEND_ROLLS if has_bend else (0.0,))


def parse_scenario(document, default_name="scenario", source=None):
    """
    Validate a scenario document and build its domain objects.

    Args:
        document (dict): Parsed JSON scenario
        default_name (str): Name used when the document has none
        source (str): File the document came from, for messages

    Returns:
        Scenario: Ready-to-run scenario

    Raises:
        ConfigError: Any schema or invariant violation, naming the key
    """
    validate_document(document)

    diff_section = dict(document.get("differential", {}))
    solver_method = diff_section.pop("solver_method", "bisect")
    diff_section.setdefault("k", 1.0)
    diff = _build(lambda field: f"differential.{field}" if field else "differential",
                  lambda: ThreeOutputDifferential(**diff_section))

    robot_section = dict(document.get("robot", {}))
    if "module_rolls_deg" in robot_section:
        robot_section["module_rolls"] = tuple(math.radians(v) for v in robot_section.pop("module_rolls_deg"))
    robot = _build(lambda field: f"robot.{ROBOT_FIELD_KEYS.get(field, field)}" if field else "robot",
                   lambda: RobotConfig(**robot_section))

    spec = _build(lambda field: "pipe.inner_radius", lambda: PipeSpec(document["pipe"]["inner_radius"]))
    network, rolls = build_network(document["network"], spec)

    sim_section = dict(document["sim"])
    if "roll_deg" in sim_section:
        sim_section["robot_roll"] = math.radians(sim_section.pop("roll_deg"))
    sim = _build(lambda field: SIM_FIELD_KEYS.get(field, f"sim.{field}") if field else "sim",
                 lambda: SimConfig(robot=robot, diff=diff, network=network, solver_method=solver_method,
                                   **sim_section))

    return Scenario(
        name=document.get("name", default_name),
        sim=sim,
        suggested_rolls=rolls,
        output_dir=document.get("output_dir"),
        source=source,
    )


def load_scenario(path):
    """
    Read and validate a scenario file.

    Args:
        path (str): Path to a JSON scenario

    Returns:
        Scenario: Ready-to-run scenario
    """
    logger = get_logger("scenario")
    try:
        with open(path) as f:
            document = json.load(f)
    except OSError as e:
        raise ConfigError("", f"cannot read scenario file {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigError("", f"{path} is not valid JSON (line {e.lineno}, column {e.colno}): {e.msg}") from e

    default_name = os.path.splitext(os.path.basename(path))[0]
    try:
        scenario = parse_scenario(document, default_name=default_name, source=path)
    except ConfigError as e:
        logger.error(f"Invalid scenario {path}: {e}")
        raise
    logger.info(f"Loaded scenario '{scenario.name}' from {path}: "
                f"{len(scenario.network.segments)} segments")
    return scenario
