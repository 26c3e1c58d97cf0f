"""
Command-Line Entry Point for the Pipe Climber Simulator

Subcommands:
- gearbox:  solve the three-output differential for a load triple
- geometry: centerline and per-track path lengths of a pipe network
- simulate: run scenario files, write trace.csv, summary.json and SVG figures
- report:   print a finished run's per-segment table and re-render its figures

Exit codes: 0 ok, 2 configuration/argument error, 3 solver failure, 4 timeout.

Key Features:
- Scenario validation completes before any file is written
- Optional concurrent sweep over several scenarios, one output directory each
- Machine-readable JSON record on stdout next to the human-readable table
- Logs on stderr (verbosity from PIPECLIMB_LOG)

Author: Pipe Climber Simulation Team
Date: 2026
"""

import argparse
import json
import math
import os
import sys
import time
from dataclasses import replace
from datetime import datetime

import pandas as pd

from pipeclimb.scripts import outputs, plotting
from pipeclimb.scripts.errors import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_TIMEOUT,
    ConfigError,
    PipeClimbError,
    exit_code_for,
)
from pipeclimb.scripts.geartrain import SOLVER_METHODS, LoadCurve, ThreeOutputDifferential, solve_loaded_speeds
from pipeclimb.scripts.kinematics import DEFAULT_ROLLS
from pipeclimb.scripts.logger_setup import get_logger
from pipeclimb.scripts.pipegeom import (
    Elbow,
    PipeNetwork,
    PipeSpec,
    Straight,
    centerline_length,
    track_path_length,
)
from pipeclimb.scripts.scenario import load_scenario
from pipeclimb.scripts.sim import PRESETS, preset_network, run, run_sweep

STATUS_EXIT_CODES = {"completed": EXIT_OK, "timeout": EXIT_TIMEOUT, "solver_error": EXIT_SOLVER}
# most severe last
SEVERITY = (EXIT_OK, EXIT_TIMEOUT, EXIT_SOLVER, EXIT_CONFIG)
TABLE_FLOAT_FORMAT = "{:.6f}".format


def _parse_keyvalues(text, option):
    values = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(option, f"expected key=value, got {item!r}")
        try:
            values[key.strip()] = float(value)
        except ValueError:
            raise ConfigError(option, f"{key.strip()} must be a number, got {value!r}") from None
    return values


def parse_loads(text):
    """
    Parse a load triple: three items separated by ';', each "lock" or "c=<val>[,tau0=<val>]".

    Returns:
        list: Three LoadCurve objects
    """
    items = [item.strip() for item in text.split(";")]
    if len(items) != 3:
        raise ConfigError("--loads", f"expected 3 loads separated by ';', got {len(items)}")
    loads = []
    for item in items:
        if item.lower() == "lock":
            loads.append(LoadCurve.lock())
            continue
        values = _parse_keyvalues(item, "--loads")
        unknown = set(values) - {"c", "tau0"}
        if unknown or "c" not in values:
            raise ConfigError("--loads", f"load {item!r}: expected 'lock' or 'c=<val>[,tau0=<val>]'")
        loads.append(LoadCurve(coulomb_torque=values.get("tau0", 0.0), viscous_coeff=values["c"]))
    return loads


def parse_segment(text):
    """
    Parse a segment option: "straight:L=350[,incl=90]" or
    "elbow:R=76.2,theta=90[,psi=0][,incl=0]" (angles in degrees).
    """
    kind, sep, rest = text.partition(":")
    values = _parse_keyvalues(rest, "--segment") if sep else {}
    kind = kind.strip().lower()
    allowed = {"straight": ({"L"}, {"L", "incl"}), "elbow": ({"R", "theta"}, {"R", "theta", "psi", "incl"})}
    if kind not in allowed:
        raise ConfigError("--segment", f"unknown segment kind {kind!r} (straight or elbow)")
    required, known = allowed[kind]
    if not required <= set(values) or not set(values) <= known:
        raise ConfigError("--segment", f"{text!r}: {kind} needs {sorted(required)}, accepts {sorted(known)}")
    inclination = math.radians(values.get("incl", 0.0))
    if kind == "straight":
        return Straight(values["L"], inclination)
    return Elbow(values["R"], math.radians(values["theta"]), math.radians(values.get("psi", 0.0)), inclination)


def parse_rolls(text):
    try:
        return tuple(math.radians(float(value)) for value in text.split(","))
    except ValueError:
        raise ConfigError("--rolls", f"expected comma-separated degrees, got {text!r}") from None


def cmd_gearbox(args):
    diff = ThreeOutputDifferential(k=args.k, stage_ratio=args.stage_ratio)
    loads = parse_loads(args.loads)
    solution = solve_loaded_speeds(diff, args.win, loads, method=args.method)

    table = pd.DataFrame({
        "output": diff.output_ids,
        "omega_rad_s": solution.omega_out,
        "torque_Nmm": solution.torque_out,
        "locked": [load.locked for load in loads],
    })
    print(table.to_string(index=False, float_format=TABLE_FLOAT_FORMAT))
    print(f"omega_in={solution.omega_in:.6f} rad/s  torque_in={solution.torque_in:.6f} N*mm  "
          f"intermediate={diff.intermediate_speed(solution.omega_out):.6f} rad/s  "
          f"residual={solution.residual:.3e}")
    record = solution.as_dict(diff.output_ids)
    record["intermediate_speed"] = diff.intermediate_speed(solution.omega_out)
    print(json.dumps(record))
    return EXIT_OK


def _geometry_network(args):
    if args.scenario:
        scenario = load_scenario(args.scenario)
        if args.rolls:
            return scenario.network, parse_rolls(args.rolls)
        return scenario.network, tuple(roll + scenario.sim.robot_roll for roll in scenario.robot.module_rolls)
    if args.radius is None:
        raise ConfigError("--radius", "required unless --scenario is given")
    spec = PipeSpec(args.radius)
    if args.preset:
        network, _ = preset_network(args.preset, spec)
    elif args.segment:
        network = PipeNetwork(spec, [parse_segment(text) for text in args.segment])
    else:
        raise ConfigError("--segment", "give --scenario, --preset or at least one --segment")
    return network, parse_rolls(args.rolls) if args.rolls else None


def cmd_geometry(args):
    network, rolls = _geometry_network(args)
    rolls = rolls or DEFAULT_ROLLS
    labels = [f"track@{math.degrees(roll):g}deg_mm" for roll in rolls]

    rows = []
    for index, seg in enumerate(network.segments):
        row = {"segment": index, "kind": seg.kind, "centerline_mm": seg.centerline_length}
        for label, roll in zip(labels, rolls):
            row[label] = track_path_length(seg, network.spec, roll)
        rows.append(row)
    table = pd.DataFrame(rows)
    total = {"segment": "total", "kind": "", "centerline_mm": centerline_length(network)}
    total.update({label: table[label].sum() for label in labels})
    table = pd.concat([table, pd.DataFrame([total])], ignore_index=True)
    print(table.to_string(index=False, float_format=TABLE_FLOAT_FORMAT))
    return EXIT_OK


class ScenarioRunner:

    def __init__(self, scenarios, out=None, sweep=False, workers=None):
        """
        Args:
            scenarios (list of Scenario): Validated scenarios
            out (str): Output directory (parent directory when several scenarios run)
            sweep (bool): Run the scenarios concurrently
            workers (int): Process pool size for a sweep
        """
        self.logger = get_logger("cli")
        self.scenarios = scenarios
        self.out = out
        self.sweep = sweep
        self.workers = workers

    def output_dir(self, scenario):
        if self.out and len(self.scenarios) == 1:
            return self.out
        if self.out:
            return os.path.join(self.out, scenario.name)
        return scenario.output_dir or os.path.join("outputs", scenario.name)

    def write_artifacts(self, scenario, trace, summary):
        out_dir = self.output_dir(scenario)
        frame = trace.to_frame()
        outputs.write_trace(frame, out_dir)
        outputs.write_summary(summary, out_dir)
        if not frame.empty:
            plotting.write_figures(frame, out_dir, title=scenario.name, network=scenario.network)
        self.logger.info(f"Wrote artifacts of '{scenario.name}' to {out_dir}")
        return out_dir

    def report(self, scenario, summary, out_dir):
        ape = summary.aggregate_ape_pct
        ape_text = "n/a" if ape is None else f"{ape:.4f} %"
        print(f"== {scenario.name}: {summary.status}, total time {summary.total_time_s:.4f} s, "
              f"aggregate APE {ape_text} -> {out_dir}")
        if summary.segments:
            print(summary.segments_frame().to_string(index=False, float_format=TABLE_FLOAT_FORMAT))
        if summary.error:
            print(f"error: {summary.error}")

    def run(self):
        """
        Run every scenario and write its artifacts.

        Returns:
            int: Most severe exit code among the runs
        """
        self.logger.info("=" * 60)
        self.logger.info(f"Simulating {len(self.scenarios)} scenario(s)")
        start_time = time.time()
        self.logger.info(f"Started at: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        self.logger.info("=" * 60)

        configs = [scenario.sim for scenario in self.scenarios]
        if self.sweep and len(configs) > 1:
            results = run_sweep(configs, max_workers=self.workers)
        else:
            results = [run(cfg) for cfg in configs]

        codes = []
        for scenario, (trace, summary) in zip(self.scenarios, results):
            summary = replace(summary, scenario=scenario.name)
            out_dir = self.write_artifacts(scenario, trace, summary)
            self.report(scenario, summary, out_dir)
            codes.append(STATUS_EXIT_CODES[summary.status])

        end_time = time.time()
        self.logger.info("=" * 60)
        self.logger.info(f"Total runtime: {(end_time - start_time):.2f} seconds")
        self.logger.info("=" * 60)
        return max(codes, key=SEVERITY.index)


def cmd_simulate(args):
    scenarios = [load_scenario(path) for path in args.scenario]
    names = [scenario.name for scenario in scenarios]
    if len(set(names)) != len(names):
        raise ConfigError("name", f"scenario names must be unique, got {names}")
    return ScenarioRunner(scenarios, out=args.out, sweep=args.sweep, workers=args.workers).run()


def cmd_report(args):
    summary = outputs.read_summary(args.out_dir)
    frame = outputs.read_trace(args.out_dir)
    print(f"== {summary.get('scenario')}: {summary.get('status')}, total time {summary['total_time_s']:.4f} s, "
          f"aggregate APE {summary.get('aggregate_ape_pct')}")
    table = outputs.summary_table(summary)
    if not table.empty:
        print(table.to_string(index=False, float_format=TABLE_FLOAT_FORMAT))
    if not frame.empty:
        plotting.write_figures(frame, args.out_dir, title=summary.get("scenario"))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pipeclimb",
        description="Quasi-static simulator of a three-track in-pipe climbing robot with a "
                    "three-output open differential.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    gearbox = subparsers.add_parser("gearbox", help="solve the differential for a load triple")
    gearbox.add_argument("--k", type=float, required=True, help="input-to-mean-output speed ratio")
    gearbox.add_argument("--stage-ratio", type=float, default=1.0, help="ratio of the B/C stage")
    gearbox.add_argument("--win", type=float, required=True, help="input speed (rad/s)")
    gearbox.add_argument("--loads", required=True, help='e.g. "c=1;c=1,tau0=0.5;lock"')
    gearbox.add_argument("--method", choices=SOLVER_METHODS, default="bisect")
    gearbox.set_defaults(handler=cmd_gearbox)

    geometry = subparsers.add_parser("geometry", help="centerline and per-track path lengths")
    geometry.add_argument("--scenario", help="scenario file providing the network")
    geometry.add_argument("--radius", type=float, help="pipe inner radius (mm)")
    geometry.add_argument("--segment", action="append",
                          help='"straight:L=350[,incl=90]" or "elbow:R=76.2,theta=90[,psi=0][,incl=0]"')
    geometry.add_argument("--preset", choices=PRESETS)
    geometry.add_argument("--rolls", help="module rolls in degrees, e.g. 0,120,240")
    geometry.set_defaults(handler=cmd_geometry)

    simulate = subparsers.add_parser("simulate", help="run scenario files")
    simulate.add_argument("scenario", nargs="+", help="scenario JSON file(s)")
    simulate.add_argument("--out", help="output directory")
    simulate.add_argument("--sweep", action="store_true", help="run several scenarios concurrently")
    simulate.add_argument("--workers", type=int, help="process pool size for --sweep")
    simulate.set_defaults(handler=cmd_simulate)

    report = subparsers.add_parser("report", help="summarize a finished run")
    report.add_argument("out_dir", help="directory holding trace.csv and summary.json")
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv=None):
    """
    Parse arguments and dispatch to a subcommand.

    Returns:
        int: Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_CONFIG

    logger = get_logger("cli")
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (PipeClimbError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())
