"""Commandline tool for SCMAtools."""

import sys

from scmatools import cli


def usage():
    """Print program usage."""
    print("""usage: scmatools {kpi,simulate,oracle-check,catalog}

SCMAtools

Run Modes:
  kpi                Compute the distance, diversity and labeling indicators
                     of one or more constellations.

  simulate           Run a Monte Carlo error-rate sweep from a JSON
                     configuration.

  oracle-check       Compare Log-MPA decisions with exhaustive joint MAP.

  catalog            List builtin and bundled constellations, or export the
                     builtins as JSON.
""")


def main(argv=None):
    """
    Dispatch a subcommand.

    Parameters:
        argv (list): Commandline arguments without the program name

    Returns:
        int: exit code
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        usage()
        return 0
    command = argv.pop(0)
    match command:
        case 'kpi':
            return cli.cmd_kpi(argv)
        case 'simulate':
            return cli.cmd_simulate(argv)
        case 'oracle-check':
            return cli.cmd_oracle(argv)
        case 'catalog':
            return cli.cmd_catalog(argv)
        case _:
            usage()
            return 0


if __name__ == '__main__':
    sys.exit(main())
