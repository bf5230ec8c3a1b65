#!/usr/bin/env python3
"""
Rate Allocation Main Script
Runs two-stage radar/communications rate allocations, bandwidth sweeps and oracle checks.
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

# Add project root to path for imports
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from config.settings import settings
from src.allocation.certification import certify_two_stage
from src.allocation.protocol import SplitPolicy, default_configs, run_two_stage
from src.experiments.sweep import BandwidthSweep, SweepSpec, sweep_fieldnames, sweep_row
from src.scenario.loader import load_scenario_file
from src.scenario.table1 import builtin_table1
from src.utility.functions import PRESETS, describe_utility, eval_utility
from src.utils.errors import AllocationError
from src.utils.file_operations import (
    ALLOCATION_FIELDS,
    CURVE_FIELDS,
    TRACE_FIELDS,
    FileOperations,
    format_number,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

BUILTIN_SCENARIOS = {"table1": builtin_table1}


class RateAllocationWorkflow:
    """Main workflow orchestrator for the rate allocation CLI."""

    def __init__(self, out_dir=None, verbose=False):
        """Initialize the workflow and its output folder."""
        self.out_dir = Path(out_dir) if out_dir else settings.OUTPUT_FOLDER
        self.file_ops = FileOperations()

        # Setup logging
        self._setup_logging(verbose)

        # Validate configuration
        self._validate_configuration()

    def _setup_logging(self, verbose):
        """Setup logging configuration."""
        settings.ensure_directories()
        log_file = settings.LOGS_FOLDER / "rate_allocation.log"

        logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO,
                            format='%(asctime)s - %(levelname)s - %(message)s',
                            handlers=[logging.FileHandler(log_file), logging.StreamHandler(sys.stderr)])

        self.logger = logging.getLogger(__name__)

    def _validate_configuration(self):
        """Validate that protocol settings are usable."""
        try:
            settings.validate()
            self.logger.debug("Success: Configuration validation passed")
        except ValueError as e:
            self.logger.error(f"ERROR: Configuration validation failed: {e}")
            raise

    def load_scenario(self, builtin=None, scenario_path=None, r_radar=None, r_comm=None, no_radar=False):
        """Resolve the scenario from a built-in name or a YAML file, then apply overrides."""
        if scenario_path:
            scenario = load_scenario_file(scenario_path)
        else:
            scenario = BUILTIN_SCENARIOS[builtin or "table1"]()

        scenario = scenario.with_budgets(r_radar=r_radar, r_comm=r_comm)
        if no_radar:
            scenario = scenario.without_radar()
        return scenario

    def run_allocation(self, scenario, write_trace=False, **overrides):
        """Run both stages and write the allocation (and optionally trace) CSV."""
        self.logger.info(f"Starting: two-stage allocation on '{scenario.name}'")
        radar_config, comm_config = default_configs(scenario, **overrides)
        result = run_two_stage(scenario, radar_config, comm_config)

        values = [eval_utility(ue.utility, rate) for ue, rate in zip(scenario.ues, result.r_aggregate)]
        allocation_file = self.file_ops.write_csv(
            self.out_dir / "allocation.csv", ALLOCATION_FIELDS,
            self.file_ops.allocation_rows(scenario, result, values))
        self._report_file(allocation_file)

        if write_trace:
            trace_file = self.file_ops.write_csv(
                self.out_dir / "trace.csv", TRACE_FIELDS,
                self.file_ops.trace_rows(result.radar_trace, result.comm_trace))
            self._report_file(trace_file)

        return result

    def run_sweep(self, scenario, spec, **overrides):
        """
        Sweep the total budget and write the sweep CSV; returns the completed points.
        Rows completed before an error are still written.
        """
        points = []
        try:
            for point in BandwidthSweep(scenario, spec, **overrides).iter_points():
                points.append(point)
        finally:
            sweep_file = self.file_ops.write_csv(
                self.out_dir / "sweep.csv", sweep_fieldnames(scenario.sector_count),
                (sweep_row(point) for point in points))
            self._report_file(sweep_file)
        return points

    def run_oracle_check(self, scenario, tol, **overrides):
        """Run both stages and certify each against the coordinate-ascent oracle."""
        radar_config, comm_config = default_configs(scenario, **overrides)
        result = run_two_stage(scenario, radar_config, comm_config)
        certificates = certify_two_stage(scenario, result, tol=settings.ORACLE_TOL, split=comm_config.split)
        for certificate in certificates:
            status = "ok" if certificate.within(tol) else "FAILED"
            print(f"{certificate.stage.value},{format_number(certificate.protocol_objective)},"
                  f"{format_number(certificate.oracle_objective)},{certificate.gap:.3e},{status}")
        return result, certificates

    def write_curves(self, scenario=None, r_max=40.0, step=0.5):
        """Write U(r) on a rate grid for the preset applications and a scenario's UEs."""
        applications = [(name, utility) for name, utility in PRESETS.items()]
        if scenario is not None:
            applications.extend((f"{ue.id}:{describe_utility(ue.utility)}", ue.utility) for ue in scenario.ues)

        grid = np.round(np.arange(0.0, r_max + step / 2, step), 9)
        rows = ({"application": name, "rate": format_number(rate), "utility": format_number(eval_utility(u, rate))}
                for name, u in applications for rate in grid)
        curves_file = self.file_ops.write_csv(self.out_dir / "curves.csv", CURVE_FIELDS, rows)
        self._report_file(curves_file)
        return curves_file

    def _report_file(self, file_path):
        info = self.file_ops.get_file_info(file_path)
        if info:
            self.logger.info(f"Output: {info['name']} ({info['size_bytes']} bytes)")


def _add_scenario_arguments(parser):
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--builtin', choices=sorted(BUILTIN_SCENARIOS), help='Built-in scenario (default: table1)')
    source.add_argument('--scenario', help='Path to a YAML scenario document')
    parser.add_argument('--no-radar', action='store_true', help='Disable the interference mask')


def _add_protocol_arguments(parser):
    parser.add_argument('--delta', type=float, help=f'MME convergence threshold (default: {settings.DELTA})')
    parser.add_argument('--max-iters', type=int, help=f'Iteration cap (default: {settings.MAX_ITERS})')
    parser.add_argument('--initial-bid', type=float, help=f'Initial UE bid (default: {settings.INITIAL_BID})')
    parser.add_argument('--split', choices=[policy.value for policy in SplitPolicy],
                        help=f'MME budget split (default: {settings.SPLIT}; equal with --no-radar)')
    parser.add_argument('--out', help='Output directory (default: output/)')
    parser.add_argument('--verbose', action='store_true', help='Log every protocol iteration')


def build_parser():
    parser = argparse.ArgumentParser(description="Two-stage radar/communications rate allocation")
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help='Run one two-stage allocation')
    _add_scenario_arguments(run)
    _add_protocol_arguments(run)
    run.add_argument('--r-radar', type=float, help='Radar-band budget override')
    run.add_argument('--r-comm', type=float, help='Communications-band budget override')
    run.add_argument('--trace', action='store_true', help='Also write the convergence trace CSV')

    sweep = subparsers.add_parser('sweep', help='Sweep the total bandwidth (radar band filled first)')
    _add_scenario_arguments(sweep)
    _add_protocol_arguments(sweep)
    sweep.add_argument('--r-min', type=float, default=50.0, help='Smallest total budget (default: 50)')
    sweep.add_argument('--r-max', type=float, default=1000.0, help='Largest total budget (default: 1000)')
    sweep.add_argument('--r-step', type=float, default=50.0, help='Budget step (default: 50)')
    sweep.add_argument('--radar-cap', type=float, default=settings.RADAR_CAP,
                       help=f'Radar band capacity (default: {settings.RADAR_CAP:g})')

    check = subparsers.add_parser('oracle-check', help='Certify the protocol optimum with the oracle')
    _add_scenario_arguments(check)
    _add_protocol_arguments(check)
    check.add_argument('--r-radar', type=float, help='Radar-band budget override')
    check.add_argument('--r-comm', type=float, help='Communications-band budget override')
    check.add_argument('--tol', type=float, default=settings.CERTIFY_TOL,
                       help=f'Allowed objective gap (default: {settings.CERTIFY_TOL:g})')

    curves = subparsers.add_parser('curves', help='Write utility curves for plotting')
    _add_scenario_arguments(curves)
    curves.add_argument('--rate-max', type=float, default=40.0, help='Largest rate on the grid (default: 40)')
    curves.add_argument('--rate-step', type=float, default=0.5, help='Grid step (default: 0.5)')
    curves.add_argument('--out', help='Output directory (default: output/)')
    curves.add_argument('--verbose', action='store_true', help='Verbose logging')

    return parser


def execute(argv=None):
    """Run the CLI and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        workflow = RateAllocationWorkflow(out_dir=args.out, verbose=args.verbose)
        # Without a radar every sector keeps its own band, R / L each.
        split = getattr(args, 'split', None) or (SplitPolicy.EQUAL.value if args.no_radar else None)
        overrides = dict(delta=getattr(args, 'delta', None), max_iters=getattr(args, 'max_iters', None),
                         initial_bid=getattr(args, 'initial_bid', None), split=split)
        scenario = workflow.load_scenario(builtin=args.builtin, scenario_path=args.scenario,
                                          r_radar=getattr(args, 'r_radar', None),
                                          r_comm=getattr(args, 'r_comm', None), no_radar=args.no_radar)

        if args.command == 'run':
            result = workflow.run_allocation(scenario, write_trace=args.trace, **overrides)
            return EXIT_OK if result.converged else EXIT_NOT_CONVERGED

        if args.command == 'sweep':
            spec = SweepSpec(args.r_min, args.r_max, args.r_step, radar_cap=args.radar_cap)
            points = workflow.run_sweep(scenario, spec, **overrides)
            converged = len(points) == len(spec.totals()) and points[-1].result.converged
            return EXIT_OK if converged else EXIT_NOT_CONVERGED

        if args.command == 'oracle-check':
            result, certificates = workflow.run_oracle_check(scenario, args.tol, **overrides)
            certified = result.converged and all(c.within(args.tol) for c in certificates)
            return EXIT_OK if certified else EXIT_NOT_CONVERGED

        include_roster = bool(args.scenario or args.builtin)
        workflow.write_curves(scenario if include_roster else None, r_max=args.rate_max, step=args.rate_step)
        return EXIT_OK

    except (AllocationError, ValueError, OSError) as e:
        print(f"ERROR: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR


def main():
    """Main entry point for the application."""
    try:
        sys.exit(execute())
    except KeyboardInterrupt:
        print("\n⏹️ Operation cancelled by user", file=sys.stderr)
        sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
