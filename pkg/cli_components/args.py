"""Command line argument parsing"""
import argparse
import sys

from config.constants import DEFAULT_LP_GRID

USAGE_EXIT_CODE = 1

EXAMPLES = """
Examples:
  dltcodes simulate --config four_sources.cfg --out results/sim.csv --trials 20
  dltcodes de --config four_sources.cfg --out results/de.csv --target 0.01
  dltcodes optimize --omega omega.txt --mu 9.2 --dmax 4 --eps 0.01 --grid 100
  dltcodes optimize --omega omega.txt --mu 9.2 --dmax 4 --eps 0.01 --uep --q q.txt --alpha alpha.txt
  dltcodes bound --config dewlt.cfg --out results/bound.csv
"""


class UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1"""

    def error(self, message):
        print(f"❌ Error: {message}", file=sys.stderr)
        self.print_usage(sys.stderr)
        sys.exit(USAGE_EXIT_CODE)


def positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def open_unit(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return value


def mu_range(text):
    """`start:stop:step` (stop included) or comma-separated mu_bar values"""
    from config.experiment import parse_range

    try:
        return parse_range(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(str(error))


def build_parser():
    parser = UsageErrorParser(
        prog="dltcodes",
        description="Buffer-based distributed LT codes: simulation, density evolution and relay-distribution design",
        epilog=EXAMPLES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="only print errors")
    subparsers = parser.add_subparsers(dest="operation", parser_class=UsageErrorParser)

    simulate = subparsers.add_parser("simulate", help="Monte-Carlo erasure-rate curves")
    simulate.add_argument("--config", required=True, help="experiment config file")
    simulate.add_argument("--out", required=True, help="output CSV path")
    simulate.add_argument("--seed", type=int, help="master seed (overrides the config)")
    simulate.add_argument("--trials", type=positive_int, help="number of trials (overrides the config)")
    simulate.add_argument("--workers", type=int, help="parallel workers (default: DLT_WORKERS)")
    simulate.add_argument("--compare", action="store_true", help="also report crossing gaps against density evolution")

    de = subparsers.add_parser("de", help="density-evolution curves")
    de.add_argument("--config", required=True, help="experiment config file")
    de.add_argument("--out", required=True, help="output CSV path")
    de.add_argument("--target", type=open_unit, help="also report the overhead threshold for this erasure rate")

    optimize = subparsers.add_parser("optimize", help="design a relay-degree distribution (LP1/LP2)")
    optimize.add_argument("--omega", required=True, help="check-node distribution file")
    optimize.add_argument("--mu", type=float, help="average decoder variable degree mu_bar")
    optimize.add_argument("--sweep-mu", type=mu_range, help="scan mu_bar over start:stop:step and report the frontier")
    optimize.add_argument("--dmax", type=positive_int, required=True, help="maximum relay degree")
    optimize.add_argument("--eps", type=open_unit, required=True, help="target erasure rate")
    optimize.add_argument("--grid", type=positive_int, default=DEFAULT_LP_GRID, help="number of grid points")
    optimize.add_argument("--uep", action="store_true", help="solve LP2 with --q and --alpha")
    optimize.add_argument("--q", help="selection distribution file")
    optimize.add_argument("--alpha", help="source-size fraction file")
    optimize.add_argument("--lp2-literal", action="store_true", help="use the literal LP2 constraint form")
    optimize.add_argument("--allow-invalid", action="store_true", help="write the design even if DE validation fails")
    optimize.add_argument("--out", help="output path (default: print)")

    bound = subparsers.add_parser("bound", help="ML lower-bound curves for expanding windows")
    bound.add_argument("--config", required=True, help="experiment config file")
    bound.add_argument("--out", required=True, help="output CSV path")

    return parser


def parse_args(argv=None):
    """
    Parse command line arguments

    Returns:
        Dictionary with parsed arguments; `hasArgs` is False when no operation was given
    """
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    if args.get("operation") == "optimize":
        if args["mu"] is None and args["sweep_mu"] is None:
            parser.error("optimize needs --mu or --sweep-mu")
        if args["uep"] and not (args["q"] and args["alpha"]):
            parser.error("--uep needs --q and --alpha")
        if args["grid"] < 2:
            parser.error("--grid needs at least 2 points")
    args["hasArgs"] = args.get("operation") is not None
    return args
