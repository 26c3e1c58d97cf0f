"""
Error Metrics Module for the Pipe Climber Simulator

This module compares simulated track speeds against their analytic no-slip
requirements and condenses a traversal trace into per-segment statistics.

Key Features:
- SpeedSeries type with timestamp validation
- Absolute percentage error (APE) between a simulated and a reference series
- Per-segment summary: entry/exit times, mean speeds, per-track APE, max |slip|
- Run totals: traversal time, odometers, centerline distance, analytic path lengths

Author: Pipe Climber Simulation Team
Date: 2026
"""

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from pipeclimb.scripts.errors import AlignmentError, MetricUndefinedError, ParameterError
from pipeclimb.scripts.pipegeom import track_path_length

TRACK_IDS = ("A", "B", "C")


@dataclass(frozen=True)
class SpeedSeries:
    timestamps: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        timestamps = np.asarray(self.timestamps, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if timestamps.ndim != 1 or values.ndim != 1:
            raise ParameterError("speed series must be one-dimensional", field="timestamps")
        if len(timestamps) < 1:
            raise ParameterError("speed series needs at least one sample", field="timestamps")
        if len(timestamps) != len(values):
            raise ParameterError(
                f"timestamps ({len(timestamps)}) and values ({len(values)}) differ in length",
                field="values",
            )
        if np.any(np.diff(timestamps) <= 0):
            raise ParameterError("timestamps must be strictly increasing", field="timestamps")
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


def ape(sim, ref):
    """
    Mean absolute percentage error of a simulated series against a reference.

    Samples where both series are zero contribute 0.

    Args:
        sim (SpeedSeries): Simulated speeds
        ref (SpeedSeries): Reference speeds on the same timestamps

    Returns:
        float: (100/n) * sum(|sim_i - ref_i| / ref_i)

    Raises:
        AlignmentError: Timestamps differ
        MetricUndefinedError: A reference value <= 0 (unless both are zero)
    """
    if len(sim) != len(ref) or not np.array_equal(sim.timestamps, ref.timestamps):
        raise AlignmentError("simulated and reference series have different timestamps")

    both_zero = (sim.values == 0) & (ref.values == 0)
    undefined = (ref.values <= 0) & ~both_zero
    if np.any(undefined):
        first = int(np.argmax(undefined))
        raise MetricUndefinedError(
            f"reference value {ref.values[first]!r} at t={ref.timestamps[first]!r} is not positive"
        )

    safe_ref = np.where(both_zero, 1.0, ref.values)
    errors = np.where(both_zero, 0.0, np.abs(sim.values - ref.values) / safe_ref)
    return float(np.mean(errors) * 100.0)


@dataclass(frozen=True)
class SegmentSummary:
    index: int
    kind: str
    entry_time_s: float
    exit_time_s: float
    duration_s: float
    mean_speed_mm_s: tuple
    ape_pct: tuple
    max_abs_slip: float
    distance_mm: tuple
    traction_violations: int = 0

    def to_dict(self):
        return {
            "index": self.index,
            "kind": self.kind,
            "entry_time_s": self.entry_time_s,
            "exit_time_s": self.exit_time_s,
            "duration_s": self.duration_s,
            "mean_speed_mm_s": dict(zip(TRACK_IDS, self.mean_speed_mm_s)),
            "ape_pct": dict(zip(TRACK_IDS, self.ape_pct)),
            "max_abs_slip": self.max_abs_slip,
            "distance_mm": dict(zip(TRACK_IDS, self.distance_mm)),
            "traction_violations": self.traction_violations,
        }


@dataclass(frozen=True)
class SimSummary:
    total_time_s: float
    segments: tuple = ()
    aggregate_ape_pct: float = None
    track_ape_pct: tuple = None
    odometers_mm: tuple = (0.0, 0.0, 0.0)
    centerline_distance_mm: float = 0.0
    path_lengths_mm: tuple = None
    status: str = "completed"
    error: str = None
    scenario: str = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def empty(cls):
        """Summary of a run that produced no steps."""
        return cls(total_time_s=0.0)

    def segments_frame(self):
        """One row per segment, flattened per-track columns."""
        rows = []
        for seg in self.segments:
            row = {"segment": seg.index, "kind": seg.kind, "entry_s": seg.entry_time_s,
                   "exit_s": seg.exit_time_s, "duration_s": seg.duration_s}
            for track, speed, err in zip(TRACK_IDS, seg.mean_speed_mm_s, seg.ape_pct):
                row[f"v{track}_mm_s"] = speed
                row[f"ape{track}_pct"] = err
            row["max_abs_slip"] = seg.max_abs_slip
            row["traction_violations"] = seg.traction_violations
            rows.append(row)
        return pd.DataFrame(rows)

    def to_dict(self):
        def per_track(values):
            return None if values is None else dict(zip(TRACK_IDS, values))

        return {
            "scenario": self.scenario,
            "status": self.status,
            "error": self.error,
            "total_time_s": self.total_time_s,
            "aggregate_ape_pct": self.aggregate_ape_pct,
            "track_ape_pct": per_track(self.track_ape_pct),
            "centerline_distance_mm": self.centerline_distance_mm,
            "odometers_mm": per_track(self.odometers_mm),
            "path_lengths_mm": per_track(self.path_lengths_mm),
            "segments": [seg.to_dict() for seg in self.segments],
            **self.extra,
        }


def _track_ape(frame, track):
    timestamps = frame["t_s"].to_numpy()
    return ape(SpeedSeries(timestamps, frame[f"v{track}_mm_s"].to_numpy()),
               SpeedSeries(timestamps, frame[f"req{track}_mm_s"].to_numpy()))


def analytic_path_lengths(net, rolls):
    """Per-track wall path length over the whole network for the given absolute rolls."""
    return tuple(sum(track_path_length(seg, net.spec, roll) for seg in net.segments) for roll in rolls)


def summarize(trace, net, *, rolls=None):
    """
    Condense a traversal trace into per-segment and run statistics.

    Args:
        trace (SimTrace | pd.DataFrame): Non-empty trace; a SimTrace may carry the
            start time/position of the run, otherwise the first record is the start
        net (PipeNetwork): Network the trace was recorded on
        rolls (tuple): Absolute module rolls (rad) for the analytic path lengths, optional

    Returns:
        SimSummary: Statistics of the trace
    """
    if isinstance(trace, pd.DataFrame):
        frame, start_time, start_position = trace, None, None
    else:
        frame = trace.to_frame()
        start_time = getattr(trace, "start_time", None)
        start_position = getattr(trace, "start_position", None)

    if frame.empty:
        raise ParameterError("cannot summarize an empty trace", field="trace")

    times = frame["t_s"].to_numpy()
    if start_time is None:
        start_time = float(times[0])
    if start_position is None:
        start_position = float(frame["s_mm"].iloc[0])

    intervals = np.diff(times, prepend=start_time)
    frame = frame.assign(_dt=intervals)
    for track in TRACK_IDS:
        frame[f"_d{track}"] = frame[f"v{track}_mm_s"] * frame["_dt"]

    segments = []
    entry_time = start_time
    for index, group in frame.groupby("segment_idx", sort=True):
        index = int(index)
        exit_time = float(group["t_s"].iloc[-1])
        slips = group[[f"slip{track}" for track in TRACK_IDS]].abs().to_numpy()
        violations = int(group["traction_violation"].sum()) if "traction_violation" in group else 0
        segments.append(SegmentSummary(
            index=index,
            kind=net.segments[index].kind,
            entry_time_s=entry_time,
            exit_time_s=exit_time,
            duration_s=exit_time - entry_time,
            mean_speed_mm_s=tuple(float(group[f"v{track}_mm_s"].mean()) for track in TRACK_IDS),
            ape_pct=tuple(_track_ape(group, track) for track in TRACK_IDS),
            max_abs_slip=float(slips.max()),
            distance_mm=tuple(float(group[f"_d{track}"].sum()) for track in TRACK_IDS),
            traction_violations=violations,
        ))
        entry_time = exit_time

    track_ape = tuple(_track_ape(frame, track) for track in TRACK_IDS)
    return SimSummary(
        total_time_s=float(times[-1]) - start_time,
        segments=tuple(segments),
        aggregate_ape_pct=float(np.mean(track_ape)),
        track_ape_pct=track_ape,
        odometers_mm=tuple(float(frame[f"_d{track}"].sum()) for track in TRACK_IDS),
        centerline_distance_mm=float(frame["s_mm"].iloc[-1]) - start_position,
        path_lengths_mm=None if rolls is None else analytic_path_lengths(net, rolls),
    )
