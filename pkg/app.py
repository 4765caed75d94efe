"""
Command-line entry point for the Vaccine Uptake Analyzer.

    python app.py cluster --county county_rates.csv --out-dir out/
    python app.py fit --survey survey.csv --chains 4 --seed 7
"""

import argparse
import logging
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from commands import COMMANDS  # noqa: E402
from config.loader import load_run_config  # noqa: E402
from config.settings import APP_INFO, EXIT_CODES  # noqa: E402
from utils.errors import (  # noqa: E402
    ConfigurationError,
    DegenerateChainError,
    InputDataError,
    ModelFitError,
)
from utils.helpers import timed_call  # noqa: E402

logger = logging.getLogger(__name__)

# argparse dest -> RunConfig field
OVERRIDE_FLAGS = {
    'seed': 'seed',
    'chains': 'chains',
    'iterations': 'iterations',
    'warmup_fraction': 'warmup_fraction',
    'linkage': 'linkage',
    'kmax': 'k_max',
    'out_dir': 'out_dir',
    'workers': 'workers',
    'survey': 'survey',
    'county': 'county',
    'truth': 'truth',
    'draws': 'draws',
    'n_records': 'n_records',
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='app.py',
        description=APP_INFO['description'],
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Simulate a survey, then fit it
  python app.py simulate --n-records 5000 --seed 1 --out-dir out/sim
  python app.py fit --survey out/sim/synthetic_survey.csv --iterations 2000 --out-dir out/fit

  # Cluster states from a county rate file, settings from a run file
  python app.py cluster --config run.cfg --county county_rates.csv
        """
    )
    parser.add_argument('--version', action='version', version=f"%(prog)s {APP_INFO['version']}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='Key-value run file (flags override it)')
    common.add_argument('--seed', type=int, help='Top-level random seed')
    common.add_argument('--chains', type=int, help='Number of HMC chains')
    common.add_argument('--iterations', type=int, help='Iterations per chain, warmup included')
    common.add_argument('--warmup-fraction', type=float, help='Share of iterations used for warmup')
    common.add_argument('--linkage', choices=['ward', 'complete', 'average'], help='Agglomeration linkage')
    common.add_argument('--kmax', type=int, help='Largest number of clusters considered')
    common.add_argument('--out-dir', type=Path, help='Directory for output files')
    common.add_argument('--workers', type=int, help='Parallel workers (default: all cores)')
    common.add_argument('--survey', type=Path, help='Survey microdata file')
    common.add_argument('--county', type=Path, help='County vaccination-rate file')
    common.add_argument('--truth', type=Path, help='Simulation truth file')
    common.add_argument('--draws', type=Path, help='draws.csv from an earlier fit')
    common.add_argument('--n-records', type=int, help='Records to simulate')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('--verbose', action='store_true', help='Debug logging')
    verbosity.add_argument('--quiet', action='store_true', help='Warnings and errors only')

    subparsers = parser.add_subparsers(dest='command', required=True)
    helps = {
        'cluster': 'Cluster states by county vaccination rates',
        'fit': 'Fit the multilevel logistic regression by HMC',
        'simulate': 'Write a synthetic survey from known parameters',
        'diagnose': 'Rebuild posterior reports from saved draws',
        'run': 'Cluster and fit in one reproducible run',
    }
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common], help=helps[name])
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        force=True,
    )


def main(argv=None) -> int:
    """Parse arguments, run one subcommand and map failures to exit codes."""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        overrides = {field: getattr(args, dest) for dest, field in OVERRIDE_FLAGS.items()}
        config = load_run_config(args.config, overrides)
        status, elapsed = timed_call(COMMANDS[args.command], config)
        logger.info(f"{args.command} finished in {elapsed:.1f} s")
        return status
    except (ConfigurationError, InputDataError, FileNotFoundError) as e:
        logger.error(str(e))
        return EXIT_CODES['input_failure']
    except (ModelFitError, DegenerateChainError, ArithmeticError) as e:
        logger.error(str(e))
        return EXIT_CODES['model_failure']
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_CODES['input_failure']


if __name__ == '__main__':
    sys.exit(main())
