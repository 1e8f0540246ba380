"""Interactive prompts for user input"""
import questionary

from config.constants import DEFAULT_LP_GRID
from config.environment import get_output_dir


def _positive_float(text):
    try:
        return float(text) > 0 or "Must be positive"
    except ValueError:
        return "Not a number"


def _unit_float(text):
    try:
        return 0.0 < float(text) < 1.0 or "Must be in (0, 1)"
    except ValueError:
        return "Not a number"


def _positive_int(text):
    return (text.isdigit() and int(text) > 0) or "Must be a positive integer"


def prompt_operation():
    """Prompt user for operation selection"""
    return questionary.select(
        "What would you like to do?",
        choices=[
            {"name": "Simulate erasure-rate curves", "value": "simulate"},
            {"name": "Density-evolution curves", "value": "de"},
            {"name": "Design a relay-degree distribution", "value": "optimize"},
            {"name": "ML lower bounds (expanding windows)", "value": "bound"},
        ],
    ).unsafe_ask()


def prompt_experiment(operation):
    """
    Prompt for the config file and output path of simulate, de or bound

    Returns:
        Dictionary shaped like the parsed command line arguments
    """
    config_path = questionary.path("Experiment config file:").unsafe_ask()
    out_path = questionary.path("Output CSV path:", default=f"{get_output_dir()}/{operation}.csv").unsafe_ask()
    args = {"operation": operation, "config": config_path, "out": out_path, "quiet": False}

    if operation == "simulate":
        args.update({"seed": None, "trials": None, "workers": None, "compare": False})
    elif operation == "de":
        target = None
        if questionary.confirm("Report the threshold for a target erasure rate?", default=False).unsafe_ask():
            target = float(questionary.text("Target erasure rate:", default="0.01", validate=_unit_float).unsafe_ask())
        args["target"] = target
    return args


def prompt_optimize():
    """
    Prompt for the inputs of an LP1/LP2 design

    Returns:
        Dictionary shaped like the parsed command line arguments
    """
    omega_path = questionary.path("Check-node distribution file (Omega):").unsafe_ask()
    mu_bar = float(questionary.text("Average decoder variable degree mu_bar:", validate=_positive_float).unsafe_ask())
    d_max = int(questionary.text("Maximum relay degree:", default="4", validate=_positive_int).unsafe_ask())
    eps = float(questionary.text("Target erasure rate:", default="0.01", validate=_unit_float).unsafe_ask())
    grid = int(questionary.text("Grid points:", default=str(DEFAULT_LP_GRID), validate=_positive_int).unsafe_ask())

    uep = questionary.confirm("Unequal error protection (LP2)?", default=False).unsafe_ask()
    q_path = alpha_path = None
    if uep:
        q_path = questionary.path("Selection distribution file (q):").unsafe_ask()
        alpha_path = questionary.path("Source-size fraction file (alpha):").unsafe_ask()

    out_path = questionary.text("Output path (empty to print):", default="").unsafe_ask()
    return {
        "operation": "optimize",
        "omega": omega_path,
        "mu": mu_bar,
        "sweep_mu": None,
        "dmax": d_max,
        "eps": eps,
        "grid": grid,
        "uep": uep,
        "q": q_path,
        "alpha": alpha_path,
        "lp2_literal": False,
        "allow_invalid": False,
        "out": out_path or None,
        "quiet": False,
    }
