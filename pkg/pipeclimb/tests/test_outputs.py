"""
Unit Tests for Run Artifact I/O and Figures

Test Coverage:
- trace.csv column order and number formatting
- summary.json content and trailing newline
- Atomic replacement: no temporary files left, failures keep the old file
- Byte-identical rewrites
- Readers: missing files and missing columns
- Figure rendering and downsampling

Author: Pipe Climber Simulation Team
Date: 2026
"""

import json
import math
import os

import pandas as pd
import pytest

from pipeclimb.scripts.errors import ConfigError
from pipeclimb.scripts.metrics import summarize
from pipeclimb.scripts.outputs import (
    SUMMARY_FILE,
    TRACE_FILE,
    atomic_path,
    read_summary,
    read_trace,
    summary_table,
    write_summary,
    write_trace,
)
from pipeclimb.scripts.pipegeom import Elbow, PipeNetwork, PipeSpec, Straight
from pipeclimb.scripts.plotting import MAX_POINTS, _downsample, plot_network, write_figures
from pipeclimb.scripts.sim import TRACE_COLUMNS, SimTrace


@pytest.fixture
def network():
    return PipeNetwork(PipeSpec(20.0), [Straight(10.0), Elbow(60.0, math.pi / 2)])


@pytest.fixture
def trace():
    """Six steps across a straight and an elbow."""
    rows = []
    for i in range(6):
        segment = 0 if i < 3 else 1
        speeds = (10.0, 10.0, 10.0) if segment == 0 else (13.0 + 1.0 / 3.0, 8.4, 8.2)
        required = (10.0, 10.0, 10.0) if segment == 0 else (13.0, 8.5, 8.5)
        slips = tuple((v - r) / r for v, r in zip(speeds, required))
        rows.append((0.1 * (i + 1), 1.0 * (i + 1), segment) + speeds + required + slips
                    + (11.0, 11.0, 11.0, False))
    return SimTrace(rows, start_time=0.0, start_position=0.0)


def test_trace_header_and_order(tmp_path, trace):
    path = write_trace(trace, str(tmp_path))
    assert os.path.basename(path) == TRACE_FILE
    with open(path) as f:
        header = f.readline().strip()
    assert header.split(",") == TRACE_COLUMNS
    assert "traction_violation" not in header


def test_trace_float_format(tmp_path, trace):
    """Twelve significant digits, integers for the segment index."""
    path = write_trace(trace, str(tmp_path))
    with open(path) as f:
        lines = f.read().splitlines()
    assert len(lines) == 7
    first = lines[1].split(",")
    assert first[0] == "0.1"
    assert first[2] == "0"
    fourth = lines[4].split(",")
    assert fourth[3] == "13.3333333333"
    assert "\r" not in open(path, newline="").read()


def test_trace_accepts_frame(tmp_path, trace):
    write_trace(trace.to_frame(), str(tmp_path))
    frame = read_trace(str(tmp_path))
    assert list(frame.columns) == TRACE_COLUMNS
    assert len(frame) == 6
    assert frame["segment_idx"].tolist() == [0, 0, 0, 1, 1, 1]


def test_rewrite_is_byte_identical(tmp_path, trace, network):
    summary = summarize(trace, network, rolls=(0.0, 2.0, 4.0))
    out = str(tmp_path)
    write_trace(trace, out)
    write_summary(summary, out)
    first = {name: open(os.path.join(out, name), "rb").read() for name in (TRACE_FILE, SUMMARY_FILE)}
    write_trace(trace, out)
    write_summary(summary, out)
    for name, content in first.items():
        assert open(os.path.join(out, name), "rb").read() == content


def test_summary_document(tmp_path, trace, network):
    summary = summarize(trace, network)
    path = write_summary(summary, str(tmp_path))
    with open(path) as f:
        text = f.read()
    assert text.endswith("}\n")
    document = json.loads(text)
    assert document == read_summary(str(tmp_path))
    assert [seg["kind"] for seg in document["segments"]] == ["straight", "elbow"]
    assert document["total_time_s"] == pytest.approx(0.6)


def test_no_temporary_files_left(tmp_path, trace):
    write_trace(trace, str(tmp_path))
    assert sorted(os.listdir(tmp_path)) == [TRACE_FILE]


def test_atomic_path_keeps_old_file_on_failure(tmp_path):
    target = tmp_path / "artifact.txt"
    target.write_text("old")
    with pytest.raises(RuntimeError):
        with atomic_path(str(target)) as tmp:
            with open(tmp, "w") as f:
                f.write("partial")
            raise RuntimeError("boom")
    assert target.read_text() == "old"
    assert os.listdir(tmp_path) == ["artifact.txt"]


def test_output_directory_created(tmp_path, trace):
    out = tmp_path / "nested" / "run"
    write_trace(trace, str(out))
    assert (out / TRACE_FILE).exists()


def test_readers_report_missing_files(tmp_path):
    with pytest.raises(ConfigError, match="trace.csv"):
        read_trace(str(tmp_path))
    with pytest.raises(ConfigError, match="summary.json"):
        read_summary(str(tmp_path))


def test_read_trace_missing_columns(tmp_path):
    pd.DataFrame({"t_s": [0.1], "s_mm": [1.0]}).to_csv(tmp_path / TRACE_FILE, index=False)
    with pytest.raises(ConfigError, match="lacks columns"):
        read_trace(str(tmp_path))


def test_summary_table(trace, network):
    table = summary_table(summarize(trace, network).to_dict())
    assert list(table["kind"]) == ["straight", "elbow"]
    assert {"apeA_pct", "apeB_pct", "apeC_pct", "max_abs_slip"} <= set(table.columns)
    assert table.loc[0, "apeA_pct"] == 0.0


def test_downsample_keeps_ends():
    frame = pd.DataFrame({"t_s": range(MAX_POINTS * 3)})
    sampled = _downsample(frame)
    assert len(sampled) <= MAX_POINTS
    assert sampled["t_s"].iloc[0] == 0
    assert sampled["t_s"].iloc[-1] == MAX_POINTS * 3 - 1
    small = frame.head(10)
    assert _downsample(small) is small


def test_write_figures(tmp_path, trace):
    paths = write_figures(trace.to_frame(), str(tmp_path), title="unit")
    assert [os.path.basename(p) for p in paths] == ["velocity.svg", "distance.svg"]
    for path in paths:
        with open(path) as f:
            content = f.read()
        assert "<svg" in content
    assert not [name for name in os.listdir(tmp_path) if name.startswith(".tmp-")]


def test_write_figures_with_network(tmp_path, trace, network):
    paths = write_figures(trace.to_frame(), str(tmp_path), network=network)
    assert os.path.basename(paths[-1]) == "network.svg"


def test_plot_network_labels_segments(tmp_path, network):
    path = plot_network(network, str(tmp_path / "network.svg"), title="layout")
    with open(path) as f:
        content = f.read()
    assert "0:straight" in content and "1:elbow" in content


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
