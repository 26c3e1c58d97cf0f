"""
Run Artifact I/O for the Pipe Climber Simulator

Writes and reads the files a simulation leaves in its output directory:
trace.csv (one row per step) and summary.json (per-segment statistics).
Files are written next to their target and moved into place with os.replace,
so a reader never sees a half-written artifact.

Author: Pipe Climber Simulation Team
Date: 2026
"""

import json
import os
import tempfile
from contextlib import contextmanager

import pandas as pd

from pipeclimb.scripts.errors import ConfigError
from pipeclimb.scripts.sim import TRACE_COLUMNS

TRACE_FILE = "trace.csv"
SUMMARY_FILE = "summary.json"
VELOCITY_PLOT = "velocity.svg"
DISTANCE_PLOT = "distance.svg"
NETWORK_PLOT = "network.svg"
FLOAT_FORMAT = "%.12g"


@contextmanager
def atomic_path(path):
    """Yield a temporary path in the target's directory; replace the target on success."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", suffix=os.path.splitext(path)[1], dir=directory)
    os.close(fd)
    try:
        yield tmp_path
        os.replace(tmp_path, path)
    finally:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)


def write_trace(trace, out_dir):
    """
    Write trace.csv with the fixed column order.

    Args:
        trace (SimTrace | pd.DataFrame): Run trace
        out_dir (str): Output directory

    Returns:
        str: Path of the written file
    """
    frame = trace if isinstance(trace, pd.DataFrame) else trace.to_frame()
    path = os.path.join(out_dir, TRACE_FILE)
    with atomic_path(path) as tmp_path:
        frame[TRACE_COLUMNS].to_csv(tmp_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_summary(summary, out_dir):
    """Write summary.json; returns its path."""
    path = os.path.join(out_dir, SUMMARY_FILE)
    with atomic_path(path) as tmp_path:
        with open(tmp_path, "w") as f:
            json.dump(summary.to_dict(), f, indent=2)
            f.write("\n")
    return path


def read_trace(out_dir):
    path = os.path.join(out_dir, TRACE_FILE)
    if not os.path.exists(path):
        raise ConfigError("out_dir", f"no {TRACE_FILE} in {out_dir}")
    frame = pd.read_csv(path)
    missing = [column for column in TRACE_COLUMNS if column not in frame.columns]
    if missing:
        raise ConfigError("out_dir", f"{path} lacks columns {missing}")
    return frame


def read_summary(out_dir):
    path = os.path.join(out_dir, SUMMARY_FILE)
    if not os.path.exists(path):
        raise ConfigError("out_dir", f"no {SUMMARY_FILE} in {out_dir}")
    with open(path) as f:
        return json.load(f)


def summary_table(summary_dict):
    """Per-segment table of a summary.json document, for printing."""
    rows = []
    for seg in summary_dict.get("segments", []):
        row = {"segment": seg["index"], "kind": seg["kind"], "duration_s": seg["duration_s"]}
        for track, value in seg["ape_pct"].items():
            row[f"ape{track}_pct"] = value
        row["max_abs_slip"] = seg["max_abs_slip"]
        rows.append(row)
    return pd.DataFrame(rows)
