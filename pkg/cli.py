"""Main CLI entry point"""
import dataclasses
import sys
import time

from cli_components.args import USAGE_EXIT_CODE, parse_args
from cli_components.banner import display_banner
from cli_components.prompts import prompt_experiment, prompt_operation, prompt_optimize
from config.environment import get_workers
from config.experiment import load_config
from services.bound_service import bound_rows
from services.comparison_service import compare_to_de, de_curve
from services.de_service import de_curve_for, de_thresholds
from services.export_service import emit_bound_csv, emit_csv, emit_de_csv, emit_sweep_csv
from services.optimize_service import design_text, run_optimize, run_sweep, write_design
from services.simulation_service import run_experiment
from utils.errors import ConfigInvalid, DltError, NoCrossing
from utils.validation_utils import validate_environment

CONFIG_EXIT_CODE = 2
RUNTIME_EXIT_CODE = 3


def display_config(cfg, operation):
    """Display configuration summary"""
    print("\n" + "─" * 60)
    print(f"📋 Configuration ({operation}):")
    if cfg.source_path:
        print(f"   File: {cfg.source_path}")
    for label, value in cfg.describe():
        print(f"   {label}: {value}")
    print("─" * 60 + "\n")


def display_simulation_summary(result):
    """Display delay and erasure-rate summary of a simulation"""
    print(f"\n{'═' * 60}")
    print("📊 Summary:")
    print(f"   K = {result.K}, scheme = {result.scheme}, trials = {result.trials}, seed = {result.seed}")
    fill_rounds = [round_ for trial in result.fill_rounds for round_ in trial.values()]
    if fill_rounds:
        print(f"   Buffer fill rounds: {min(fill_rounds)} .. {max(fill_rounds)}")
    stalls = sum(sum(trial.values()) for trial in result.stalls)
    if stalls:
        print(f"   Stalled relay transmissions: {stalls}")
    if result.payload_failures:
        print(f"   ⚠️  Decoded bits disagreed with the source data in {result.payload_failures} trials")
    last = {scope: curve[-1] for scope in result.scopes() for curve in [result.curve(scope)] if curve}
    for scope, (overhead, rate) in last.items():
        print(f"   {scope}: erasure rate {rate:.4g} at overhead {overhead:g}")


def display_comparison(report):
    """Display simulated vs. predicted crossing overheads"""
    print("\n📊 Simulation vs. density evolution:")
    for entry in report:
        print(
            f"   rate {entry['target']:g}: simulated {entry['simulated']:.4f}, "
            f"predicted {entry['predicted']:.4f}, gap {entry['gap']:+.4f}"
        )


def display_thresholds(thresholds, target):
    print(f"\n📊 Overhead at which each scope reaches {target:g}:")
    for scope, overhead in thresholds.items():
        value = "not reached" if overhead is None else f"{overhead:.6g}"
        print(f"   {scope}: {value}")


def display_completion(total_time, output_paths):
    """Display completion message"""
    print(f"\n{'═' * 60}")
    print("✅ Complete!")
    print(f"   Total time: {total_time}s")
    if output_paths:
        print("   Files saved:")
        for path in output_paths:
            print(f"     - {path}")
    print(f"{'═' * 60}\n")


def handle_simulate(args, verbose=True):
    """Handle simulate operation"""
    start_time = time.time()
    cfg = load_config(args["config"])
    overrides = {}
    if args.get("seed") is not None:
        overrides["seed"] = args["seed"]
    if args.get("trials") is not None:
        overrides["trials"] = args["trials"]
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    workers = args.get("workers") or get_workers()

    if verbose:
        display_config(cfg, "simulate")
    result = run_experiment(cfg, workers=workers, verbose=verbose)
    output_path = emit_csv(result, args["out"], verbose=verbose)

    if verbose:
        display_simulation_summary(result)
    if args.get("compare"):
        predicted = de_curve(de_curve_for(cfg))
        try:
            report = compare_to_de(result.curve(), predicted, cfg.targets)
        except NoCrossing as error:
            print(f"⚠️  {error}")
        else:
            display_comparison(report)

    if verbose:
        display_completion(f"{(time.time() - start_time):.2f}", [output_path])
    return 0


def handle_de(args, verbose=True):
    """Handle de operation"""
    start_time = time.time()
    cfg = load_config(args["config"])
    if verbose:
        display_config(cfg, "de")
        print(f"🔍 Running density evolution over {len(cfg.overheads)} overheads... ", end="", flush=True)
    rows = de_curve_for(cfg)
    if verbose:
        print(f"✓ ({(time.time() - start_time):.2f}s)")
    output_path = emit_de_csv(rows, args["out"], verbose=verbose)

    if args.get("target") is not None:
        display_thresholds(de_thresholds(cfg, args["target"]), args["target"])
    if verbose:
        display_completion(f"{(time.time() - start_time):.2f}", [output_path])
    return 0


def handle_bound(args, verbose=True):
    """Handle bound operation"""
    start_time = time.time()
    cfg = load_config(args["config"])
    if verbose:
        display_config(cfg, "bound")
    output_path = emit_bound_csv(bound_rows(cfg), args["out"], verbose=verbose)
    if verbose:
        display_completion(f"{(time.time() - start_time):.2f}", [output_path])
    return 0


def handle_optimize(args, verbose=True):
    """Handle optimize operation"""
    start_time = time.time()
    q_path, alpha_path = (args["q"], args["alpha"]) if args.get("uep") else (None, None)
    literal = args.get("lp2_literal", False)

    if args.get("sweep_mu") is not None:
        rows = run_sweep(args["omega"], args["sweep_mu"], args["dmax"], args["eps"], args["grid"], q_path, alpha_path, literal)
        if args.get("out"):
            output_path = emit_sweep_csv(rows, args["out"], verbose=verbose)
            if verbose:
                display_completion(f"{(time.time() - start_time):.2f}", [output_path])
        else:
            for row in rows:
                value = "-" if row["epsilon_r_star"] is None else f"{row['epsilon_r_star']:.10g}"
                print(f"{row['mu_bar']:g}\t{value}\t{row['status']}")
        return 0

    design = run_optimize(
        args["omega"],
        args["mu"],
        args["dmax"],
        args["eps"],
        args["grid"],
        q_path,
        alpha_path,
        literal,
        strict=not args.get("allow_invalid", False),
        verbose=verbose and bool(args.get("out")),
    )
    if not design.validated:
        print("⚠️  Design failed density-evolution validation; kept because --allow-invalid was given", file=sys.stderr)
    if args.get("out"):
        output_path = write_design(design, args["out"])
        if verbose:
            display_completion(f"{(time.time() - start_time):.2f}", [output_path])
    else:
        print(design_text(design), end="")
    return 0


HANDLERS = {
    "simulate": handle_simulate,
    "de": handle_de,
    "optimize": handle_optimize,
    "bound": handle_bound,
}


def run_operation(args):
    """
    Run one operation and map failures to exit codes

    Returns:
        0 on success, 2 for configuration errors, 3 for runtime errors
    """
    verbose = not args.get("quiet", False)
    try:
        validate_environment()
        return HANDLERS[args["operation"]](args, verbose=verbose)
    except (ConfigInvalid, FileNotFoundError) as error:
        print(f"❌ Error: {error}", file=sys.stderr)
        return CONFIG_EXIT_CODE
    except (DltError, OSError) as error:
        print(f"❌ Error: {error}", file=sys.stderr)
        return RUNTIME_EXIT_CODE
    except ValueError as error:
        print(f"❌ Error: {error}", file=sys.stderr)
        return CONFIG_EXIT_CODE


def main(argv=None):
    """Main function"""
    args = parse_args(argv)

    if not args["hasArgs"]:
        # Interactive mode: show banner and prompt user
        display_banner()
        try:
            operation = prompt_operation()
            args = prompt_optimize() if operation == "optimize" else prompt_experiment(operation)
        except KeyboardInterrupt:
            print("\n❌ Operation cancelled")
            return USAGE_EXIT_CODE

    return run_operation(args)


if __name__ == "__main__":
    sys.exit(main())
