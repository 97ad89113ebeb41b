"""Commandline front ends for SCMAtools."""

import argparse
import os
import sys
import traceback

from scmatools import constellation, kpi
from scmatools.config import load_config
from scmatools.errors import ScmaError, TooLarge, WorkerFailure
from scmatools.harness import oracle_agreement, run_sweep
from scmatools.logger import Logger

EXIT_OK = 0
EXIT_BELOW_THRESHOLD = 1
EXIT_INVALID = 2
EXIT_RUNTIME = 3


def _error(exc):
    sys.stderr.write(f'[ERROR] {exc}\n')


def _parser(command, description):
    return argparse.ArgumentParser(
        prog=f'scmatools {command}',
        description=description,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )


def _format_report(report):
    return '\n'.join(
        f'{name:<10}{value}'
        for name, value in zip(kpi.fieldnames, report.row())
    ) + '\n'


def parse_kpi_options(args):
    """
    Parse commandline options for the kpi command.

    Parameters:
        args (list): Arguments after the command name

    Returns:
        namespace: commandline args
    """
    parser = _parser('kpi', 'Constellation key performance indicators')
    target = parser.add_mutually_exclusive_group(required=True)
    target.add_argument(
        '-c',
        '--constellation',
        help='Builtin name, bundled name or JSON file',
    )
    target.add_argument(
        '-t',
        '--table',
        help='Comma separated list of constellations; always printed as CSV',
    )
    parser.add_argument(
        '--csv',
        action='store_true',
        help='Print a CSV row instead of a listing',
    )
    return parser.parse_args(args)


def cmd_kpi(args):
    """
    Print the KPI report of one or more constellations.

    Parameters:
        args (list): Arguments after the command name

    Returns:
        int: exit code
    """
    options = parse_kpi_options(args)
    try:
        if options.table is not None:
            names = [name.strip() for name in options.table.split(',') if name.strip()]
            sys.stdout.write(kpi.table([constellation.resolve(name) for name in names]))
            return EXIT_OK
        target = constellation.resolve(options.constellation)
        if options.csv:
            sys.stdout.write(kpi.table([target]))
        else:
            sys.stdout.write(_format_report(kpi.report(target)))
    except ScmaError as exc:
        _error(exc)
        return EXIT_INVALID
    return EXIT_OK


def parse_simulate_options(args):
    """
    Parse commandline options for the simulate command.

    Parameters:
        args (list): Arguments after the command name

    Returns:
        namespace: commandline args
    """
    parser = _parser('simulate', 'Monte Carlo error-rate sweep')
    parser.add_argument(
        '--config',
        required=True,
        help='JSON experiment configuration',
    )
    parser.add_argument(
        '-o',
        '--out',
        required=True,
        help='Result CSV; a JSON mirror is written next to it',
    )
    parser.add_argument(
        '-w',
        '--workers',
        type=int,
        help='Worker processes; overrides the configuration',
    )
    parser.add_argument(
        '-q',
        '--quiet',
        action='store_true',
        help='Do not report progress',
    )
    parser.add_argument(
        '--debug',
        action='store_true',
        help='Report each batch and print tracebacks',
    )
    return parser.parse_args(args)


def json_path(csv_path):
    """
    Location of the JSON mirror of a result CSV.

    Parameters:
        csv_path (str): Result CSV path

    Returns:
        str
    """
    stem, ext = os.path.splitext(csv_path)
    if ext.lower() == '.csv':
        return f'{stem}.json'
    return f'{csv_path}.json'


def _log_level(options):
    if options.debug:
        return Logger.debug_level
    if options.quiet:
        return Logger.silent_level
    return Logger.info_level


def cmd_simulate(args):
    """
    Run a sweep and write its CSV and JSON results.

    Parameters:
        args (list): Arguments after the command name

    Returns:
        int: exit code
    """
    options = parse_simulate_options(args)
    log_level = _log_level(options)
    try:
        sweep = load_config(options.config).to_sweep(
            workers=options.workers,
            log_level=log_level,
        )
    except ScmaError as exc:
        _error(exc)
        return EXIT_INVALID

    try:
        result = run_sweep(sweep)
        result.to_csv(options.out)
        result.to_json(json_path(options.out))
    except (ScmaError, WorkerFailure, OSError) as exc:
        if options.debug:
            traceback.print_exception(*sys.exc_info())
        _error(exc)
        return EXIT_RUNTIME
    return EXIT_OK


def parse_oracle_options(args):
    """
    Parse commandline options for the oracle-check command.

    Parameters:
        args (list): Arguments after the command name

    Returns:
        namespace: commandline args
    """
    parser = _parser('oracle-check', 'Compare Log-MPA with exhaustive max-log MAP')
    parser.add_argument(
        '--config',
        required=True,
        help='JSON experiment configuration',
    )
    parser.add_argument(
        '-T',
        '--trials',
        type=int,
        default=10000,
        help='Channel uses per SNR point',
    )
    parser.add_argument(
        '--threshold',
        type=float,
        default=0.99,
        help='Minimum agreement fraction',
    )
    return parser.parse_args(args)


def cmd_oracle(args):
    """
    Report MPA versus joint MAP agreement at every configured SNR.

    Parameters:
        args (list): Arguments after the command name

    Returns:
        int: exit code
    """
    options = parse_oracle_options(args)
    try:
        experiment = load_config(options.config)
        system = experiment.system()
    except ScmaError as exc:
        _error(exc)
        return EXIT_INVALID

    worst = 1.0
    for snr_db in experiment.grid:
        try:
            agreement = oracle_agreement(
                system,
                experiment.case,
                snr_db,
                options.trials,
                seed=experiment.seed,
                iterations=experiment.iterations,
            )
        except TooLarge as exc:
            _error(exc)
            return EXIT_INVALID
        except ScmaError as exc:
            _error(exc)
            return EXIT_RUNTIME
        sys.stdout.write(f'{snr_db:g}\t{100 * agreement:.2f}%\n')
        worst = min(worst, agreement)
    return EXIT_OK if worst >= options.threshold else EXIT_BELOW_THRESHOLD


def parse_catalog_options(args):
    """
    Parse commandline options for the catalog command.

    Parameters:
        args (list): Arguments after the command name

    Returns:
        namespace: commandline args
    """
    parser = _parser('catalog', 'List or export the available constellations')
    parser.add_argument(
        '--export',
        metavar='DIR',
        help='Write every builtin constellation as JSON into DIR',
    )
    return parser.parse_args(args)


def cmd_catalog(args):
    """
    List available constellations or export the builtins.

    Parameters:
        args (list): Arguments after the command name

    Returns:
        int: exit code
    """
    options = parse_catalog_options(args)
    try:
        if options.export:
            os.makedirs(options.export, exist_ok=True)
            for name in constellation.builtin_names:
                path = os.path.join(
                    options.export,
                    os.path.basename(constellation.bundled_path(name)),
                )
                constellation.save(constellation.builtin(name), path)
                sys.stdout.write(f'{path}\n')
            return EXIT_OK
        for name, source in constellation.catalog():
            sys.stdout.write(f'{name}\t{source}\n')
    except ScmaError as exc:
        _error(exc)
        return EXIT_INVALID
    except OSError as exc:
        _error(exc)
        return EXIT_RUNTIME
    return EXIT_OK
