"""
Pipe Network Geometry Module for the Pipe Climber Simulator

This module describes the pipe the robot climbs through as an ordered chain of
straight and elbow segments, and answers the geometric questions the
simulator asks: how long is the centerline, which segment holds a given
centerline coordinate, and how far does each track travel along the wall.

Key Features:
- Straight and Elbow segments (an Elbow with a half-turn angle is a U-piece)
- Per-track contact path length from the module roll angle
- Long-radius elbow preset (bend radius 1.5 x nominal diameter)
- 3-D frame chain of the centerline, used only for plotting

Conventions:
- A module at roll angle alpha touches the wall at radial distance r in the
  direction cos(alpha)*N0 + sin(alpha)*B of the local frame
- An elbow's bend_plane_roll psi names the extrados direction: alpha = psi is
  the outermost (longest) contact line

Author: Pipe Climber Simulation Team
Date: 2026
"""

import bisect
import math
from dataclasses import dataclass

import numpy as np

from pipeclimb.scripts.errors import ParameterError, RangeError


@dataclass(frozen=True)
class PipeSpec:
    inner_radius: float

    def __post_init__(self):
        if not math.isfinite(self.inner_radius) or self.inner_radius <= 0:
            raise ParameterError(f"inner_radius must be > 0, got {self.inner_radius!r}",
                                 field="inner_radius")


@dataclass(frozen=True)
class Straight:
    length: float
    inclination: float = 0.0

    kind = "straight"

    def __post_init__(self):
        if not math.isfinite(self.length) or self.length <= 0:
            raise ParameterError(f"straight length must be > 0, got {self.length!r}", field="length")

    @property
    def centerline_length(self):
        return self.length


@dataclass(frozen=True)
class Elbow:
    bend_radius: float
    bend_angle: float
    bend_plane_roll: float = 0.0
    inclination: float = 0.0

    kind = "elbow"

    def __post_init__(self):
        if not math.isfinite(self.bend_radius) or self.bend_radius <= 0:
            raise ParameterError(f"bend_radius must be > 0, got {self.bend_radius!r}", field="bend_radius")
        if not 0 < self.bend_angle <= math.pi:
            raise ParameterError(f"bend_angle must lie in (0, pi], got {self.bend_angle!r}", field="bend_angle")

    @property
    def centerline_length(self):
        return self.bend_angle * self.bend_radius


@dataclass(frozen=True)
class PipeNetwork:
    spec: PipeSpec
    segments: tuple

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ParameterError("a pipe network needs at least one segment", field="segments")
        for index, seg in enumerate(self.segments):
            if not isinstance(seg, (Straight, Elbow)):
                raise ParameterError(f"segment {index}: expected Straight or Elbow, got {type(seg).__name__}",
                                     field="segments")
            if isinstance(seg, Elbow) and seg.bend_radius <= self.spec.inner_radius:
                raise ParameterError(
                    f"segment {index}: bend_radius {seg.bend_radius} must exceed the pipe radius "
                    f"{self.spec.inner_radius} (self-intersecting bend)",
                    field="bend_radius",
                )


def centerline_length(net):
    """Total centerline arclength of the network (mm)."""
    return sum(seg.centerline_length for seg in net.segments)


def segment_offsets(net):
    """Centerline coordinate at which each segment starts."""
    offsets = []
    position = 0.0
    for seg in net.segments:
        offsets.append(position)
        position += seg.centerline_length
    return offsets


def track_path_length(seg, spec, module_roll):
    """
    Length of the wall contact line followed by a track at the given roll.

    Args:
        seg (Straight | Elbow): Segment
        spec (PipeSpec): Pipe dimensions
        module_roll (float): Roll angle of the module about the pipe axis (rad)

    Returns:
        float: Path length (mm); theta * (R + r*cos(alpha - psi)) in an elbow
    """
    if isinstance(seg, Straight):
        return seg.length
    return seg.bend_angle * (seg.bend_radius + spec.inner_radius * math.cos(module_roll - seg.bend_plane_roll))


def segment_at(net, s):
    """
    Locate the segment containing centerline coordinate s.

    A coordinate on a boundary belongs to the later segment, except at the
    network end where it belongs to the last one.

    Returns:
        tuple: (segment index, offset within the segment in mm)
    """
    total = centerline_length(net)
    if not 0 <= s <= total:
        raise RangeError(f"centerline coordinate {s!r} outside [0, {total!r}]")
    offsets = segment_offsets(net)
    index = min(bisect.bisect_right(offsets, s) - 1, len(offsets) - 1)
    return index, s - offsets[index]


def long_radius_elbow(spec, bend_angle, bend_plane_roll=0.0, inclination=0.0, *, bend_radius=None,
                      diameter_factor=1.0):
    """
    Long-radius elbow preset: R = 1.5 x nominal diameter = 3 r unless overridden.

    Args:
        spec (PipeSpec): Pipe dimensions
        bend_angle (float): Bend angle (rad); pi gives a U-piece
        bend_plane_roll (float): Extrados direction (rad)
        inclination (float): Axis inclination used for the gravity load (rad)
        bend_radius (float): Explicit bend radius override (mm)
        diameter_factor (float): Nominal diameter as a multiple of the inner diameter

    Returns:
        Elbow: The preset segment
    """
    if bend_radius is None:
        bend_radius = 1.5 * (2.0 * spec.inner_radius * diameter_factor)
    if bend_radius <= spec.inner_radius:
        raise ParameterError(f"bend_radius {bend_radius} must exceed the pipe radius {spec.inner_radius}",
                             field="bend_radius")
    return Elbow(bend_radius=bend_radius, bend_angle=bend_angle, bend_plane_roll=bend_plane_roll,
                 inclination=inclination)


def _rotate(vector, axis, angle):
    """Rodrigues rotation of vector about a unit axis."""
    return (vector * math.cos(angle)
            + np.cross(axis, vector) * math.sin(angle)
            + axis * np.dot(axis, vector) * (1.0 - math.cos(angle)))


def segment_poses(net):
    """
    Start pose of every segment plus the end pose of the network.

    The chain starts at the origin heading along +z with roll reference +x.

    Returns:
        list of tuple: (position, tangent, roll reference) numpy 3-vectors
    """
    position = np.zeros(3)
    tangent = np.array([0.0, 0.0, 1.0])
    reference = np.array([1.0, 0.0, 0.0])
    poses = [(position.copy(), tangent.copy(), reference.copy())]

    for seg in net.segments:
        if isinstance(seg, Straight):
            position = position + seg.length * tangent
        else:
            binormal = np.cross(tangent, reference)
            extrados = math.cos(seg.bend_plane_roll) * reference + math.sin(seg.bend_plane_roll) * binormal
            inward = -extrados
            axis = np.cross(tangent, inward)
            center = position + seg.bend_radius * inward
            position = center + _rotate(position - center, axis, seg.bend_angle)
            tangent = _rotate(tangent, axis, seg.bend_angle)
            reference = _rotate(reference, axis, seg.bend_angle)
        poses.append((position.copy(), tangent.copy(), reference.copy()))
    return poses


def centerline_points(net, samples_per_segment=32):
    """Polyline of the centerline (N x 3 array), for plotting."""
    poses = segment_poses(net)
    points = []
    for seg, (start, tangent, reference) in zip(net.segments, poses[:-1]):
        if isinstance(seg, Straight):
            for u in np.linspace(0.0, 1.0, samples_per_segment):
                points.append(start + u * seg.length * tangent)
            continue
        binormal = np.cross(tangent, reference)
        inward = -(math.cos(seg.bend_plane_roll) * reference + math.sin(seg.bend_plane_roll) * binormal)
        axis = np.cross(tangent, inward)
        center = start + seg.bend_radius * inward
        for angle in np.linspace(0.0, seg.bend_angle, samples_per_segment):
            points.append(center + _rotate(start - center, axis, angle))
    return np.array(points)
