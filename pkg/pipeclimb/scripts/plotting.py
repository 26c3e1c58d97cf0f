"""
Figure output for simulation runs: per-track speed and distance against time,
and a side view of the pipe centerline, written as SVG. Figures are byte-stable for identical traces (fixed SVG hash
salt, no date metadata).
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402

from pipeclimb.scripts.metrics import TRACK_IDS  # noqa: E402
from pipeclimb.scripts.outputs import DISTANCE_PLOT, NETWORK_PLOT, VELOCITY_PLOT, atomic_path  # noqa: E402
from pipeclimb.scripts.pipegeom import centerline_points, segment_poses  # noqa: E402

MAX_POINTS = 2000
FIGSIZE = (7.0, 3.5)
STABLE_RC = {
    "svg.hashsalt": "pipeclimb",
    "svg.fonttype": "none",
    "path.simplify": False,
}


def _downsample(frame, max_points=MAX_POINTS):
    """Evenly spaced rows, always keeping the first and last."""
    if len(frame) <= max_points:
        return frame
    rows = np.unique(np.linspace(0, len(frame) - 1, max_points).round().astype(int))
    return frame.iloc[rows]


_UNITS = {"v": "_mm_s", "req": "_mm_s", "d": "_mm"}


def _long_frame(frame, prefix, label):
    """Wide per-track columns -> long format for seaborn."""
    parts = [pd.DataFrame({"t_s": frame["t_s"].to_numpy(),
                           "value": frame[f"{prefix}{track}{_UNITS[prefix]}"].to_numpy(),
                           "track": track, "series": label})
             for track in TRACK_IDS]
    return pd.concat(parts, ignore_index=True)


def _segment_boundaries(ax, frame):
    changes = frame.index[frame["segment_idx"].diff().fillna(0) != 0]
    for t in frame.loc[changes, "t_s"]:
        ax.axvline(t, color="0.6", linewidth=0.8, linestyle=":")


def _save(fig, path):
    with atomic_path(path) as tmp_path:
        fig.savefig(tmp_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_velocity(frame, path, title=None):
    """
    Actual (solid) and no-slip required (dashed) track speeds against time.

    Args:
        frame (pd.DataFrame): Trace frame with the trace.csv columns
        path (str): Output SVG path
        title (str): Figure title

    Returns:
        str: Path written
    """
    sampled = _downsample(frame)
    data = pd.concat([_long_frame(sampled, "v", "actual"), _long_frame(sampled, "req", "required")],
                     ignore_index=True)
    with plt.rc_context(STABLE_RC), sns.axes_style("whitegrid"):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        sns.lineplot(data=data, x="t_s", y="value", hue="track", style="series", estimator=None,
                     sort=False, linewidth=1.0, ax=ax)
        _segment_boundaries(ax, sampled)
        ax.set_xlabel("time (s)")
        ax.set_ylabel("track speed (mm/s)")
        ax.set_title(title or "Track speeds")
        fig.tight_layout()
        return _save(fig, path)


def plot_distance(frame, path, title=None):
    """Per-track odometers against time; outer tracks pull ahead in bends."""
    intervals = np.diff(frame["t_s"].to_numpy(), prepend=0.0)
    odometers = frame[["t_s", "segment_idx"]].copy()
    for track in TRACK_IDS:
        odometers[f"d{track}_mm"] = np.cumsum(frame[f"v{track}_mm_s"].to_numpy() * intervals)
    sampled = _downsample(odometers)
    data = _long_frame(sampled, "d", "odometer")
    with plt.rc_context(STABLE_RC), sns.axes_style("whitegrid"):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        sns.lineplot(data=data, x="t_s", y="value", hue="track", estimator=None, sort=False,
                     linewidth=1.0, ax=ax)
        _segment_boundaries(ax, sampled)
        ax.set_xlabel("time (s)")
        ax.set_ylabel("track distance (mm)")
        ax.set_title(title or "Track distances")
        fig.tight_layout()
        return _save(fig, path)


def plot_network(network, path, title=None):
    """
    Side view (x-z plane) of the pipe centerline with segment starts marked.

    Args:
        network (PipeNetwork): Traversed network
        path (str): Output SVG path
        title (str): Figure title

    Returns:
        str: Path written
    """
    points = centerline_points(network, samples_per_segment=64)
    starts = np.array([pose[0] for pose in segment_poses(network)])
    with plt.rc_context(STABLE_RC), sns.axes_style("whitegrid"):
        fig, ax = plt.subplots(figsize=(FIGSIZE[1], FIGSIZE[1]))
        ax.plot(points[:, 0], points[:, 2], color="0.2", linewidth=1.5)
        ax.plot(starts[:, 0], starts[:, 2], linestyle="none", marker="o", markersize=3, color="C3")
        for index, (x, z) in enumerate(starts[:-1, [0, 2]]):
            ax.annotate(f"{index}:{network.segments[index].kind}", (x, z), textcoords="offset points",
                        xytext=(4, 4), fontsize=7)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x (mm)")
        ax.set_ylabel("z (mm)")
        ax.set_title(title or "Pipe centerline")
        fig.tight_layout()
        return _save(fig, path)


def write_figures(frame, out_dir, title=None, network=None):
    """Render velocity.svg and distance.svg (and network.svg when the network is known) into out_dir."""
    paths = [
        plot_velocity(frame, os.path.join(out_dir, VELOCITY_PLOT), title),
        plot_distance(frame, os.path.join(out_dir, DISTANCE_PLOT), title),
    ]
    if network is not None:
        paths.append(plot_network(network, os.path.join(out_dir, NETWORK_PLOT), title))
    return paths
