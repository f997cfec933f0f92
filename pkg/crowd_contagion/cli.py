"""
Command line entry point ``crowd-contagion``::

    crowd-contagion run corridor_bi --contact-time off --out runs/bi_off --plots
    crowd-contagion plot runs/bi_on --other runs/bi_off
    crowd-contagion compare runs/bi_on runs/bi_off

``run`` accepts a scenario file or the name of a shipped preset.
Exit code 0 on success, 2 on bad arguments, 1 on scenario or simulation errors.
"""

__all__ = ['cli_main', 'main']

import argparse
import json
import logging
import os
import sys
from typing import (List, Optional)

from .errors import CrowdContagionError, ScenarioError
from .io_ops.compare import compare_runs
from .io_ops.plot import emit_plots
from .log import configure_logger
from .scenario.load import load_scenario, load_preset, preset_names, apply_overrides
from .sim.simulator import Simulator

log = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='crowd-contagion',
                                     description='Pedestrian flow with non-local SEIS contagion in a corridor')
    parser.add_argument('--verbose', action='store_true', help='log DEBUG messages')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='run a scenario')
    run.add_argument('scenario', help=f'scenario YAML file or preset name ({", ".join(preset_names())})')
    run.add_argument('--dt', type=float, help='time step (s)')
    run.add_argument('--t-end', type=float, dest='t_end', help='simulated time (s)')
    run.add_argument('--contact-time', choices=('on', 'off'), dest='contact_time',
                     help='weight the infection kernel by relative speed')
    run.add_argument('--eikonal-every', type=int, dest='k_eik', help='steps between eikonal refreshes')
    run.add_argument('--eikonal-method', choices=('fast_marching', 'sweeping'), dest='eikonal_method')
    run.add_argument('--out', help='run directory (default runs/<scenario name>)')
    run.add_argument('--plots', action='store_true', help='emit the figures once the run is over')

    plot = commands.add_parser('plot', help='figures of a run directory')
    plot.add_argument('run_dir')
    plot.add_argument('--other', help='second run directory overlaid on the exposure figure')
    plot.add_argument('--out', help='folder for the figures (default <run_dir>/plots)')

    compare = commands.add_parser('compare', help='exposed percentage of two runs side by side')
    compare.add_argument('dir_a')
    compare.add_argument('dir_b')
    compare.add_argument('--out', help='CSV file for the comparison table')
    return parser


def _get_scenario(name: str):
    if os.path.exists(name):
        return load_scenario(name)
    if name in preset_names():
        return load_preset(name)
    raise ScenarioError(f'{name} is neither a scenario file nor a preset ({", ".join(preset_names())})')


def _run(args: argparse.Namespace) -> None:
    scenario = _get_scenario(args.scenario)
    contact = None if args.contact_time is None else args.contact_time == 'on'
    scenario = apply_overrides(scenario, dt=args.dt, t_end=args.t_end, contact_time_enabled=contact,
                               k_eik=args.k_eik, eikonal_method=args.eikonal_method)
    simulator = Simulator(scenario, directory=args.out)
    summary = simulator.run()
    print(json.dumps(summary, indent=2))
    if args.plots:
        emit_plots(simulator.directory)


def _compare(args: argparse.Namespace) -> None:
    table = compare_runs(args.dir_a, args.dir_b)
    if args.out:
        table.to_csv(args.out, index=False)
    print(table.to_string(index=False))


def cli_main(args: Optional[List[str]] = None) -> int:
    """
    Parses ``args`` (default ``sys.argv[1:]``) and runs the command.

    :return: exit code
    """
    parser = _build_parser()
    try:
        namespace = parser.parse_args(args)
    except SystemExit as error:
        return int(error.code or 0)
    configure_logger(logging.DEBUG if namespace.verbose else logging.INFO)
    try:
        if namespace.command == 'run':
            _run(namespace)
        elif namespace.command == 'plot':
            emit_plots(namespace.run_dir, other=namespace.other, directory=namespace.out)
        else:
            _compare(namespace)
    except (CrowdContagionError, OSError, ValueError) as error:
        print(f'{error.__class__.__name__}: {error}', file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == '__main__':
    main()
