"""Service for designing relay-degree distributions"""
from pathlib import Path

from analysis.optimizer import optimize_relay_distribution, sweep_mu
from codes.dist import DistKind, load_distribution


def load_selection(q_path, alpha_path):
    """
    Load q and alpha vectors from distribution text files

    Returns:
        (q, alpha) as tuples, or (None, None) when no paths are given
    """
    if q_path is None and alpha_path is None:
        return None, None
    if q_path is None or alpha_path is None:
        raise ValueError("UEP design needs both --q and --alpha")
    q = load_distribution(q_path, kind=DistKind.SELECTION)
    alpha = load_distribution(alpha_path, kind=DistKind.IMPORTANCE)
    if q.d_max != alpha.d_max:
        raise ValueError(f"q has {q.d_max} sources, alpha has {alpha.d_max}")
    return q.coefficients, alpha.coefficients


def design_text(design):
    """Node-perspective distribution text plus the optimum as a comment line"""
    lines = [f"# epsilon_r_star = {design.epsilon_r_star:.10g}"]
    if not design.validated:
        lines.append(f"# validated = false (fixed point {', '.join(f'{p:.3g}' for p in design.validation_fixed_point)})")
    return "\n".join(lines) + "\n" + design.gamma.to_text()


def run_optimize(omega_path, mu_bar, d_max, eps, grid, q_path=None, alpha_path=None, literal=False, strict=True, verbose=False):
    """
    Solve LP1 (or LP2 when q and alpha are given) for one mu_bar

    Returns:
        RelayDesign
    """
    omega = load_distribution(omega_path, kind=DistKind.CHECK)
    q, alpha = load_selection(q_path, alpha_path)
    if verbose:
        program = "LP1 (EEP)" if q is None else "LP2 (UEP)"
        print(f"🔍 Solving {program} with d_max = {d_max}, {grid} grid points... ", end="", flush=True)
    design = optimize_relay_distribution(omega, mu_bar, d_max, eps, grid, q, alpha, literal, strict)
    if verbose:
        print(f"✓ eps_r* = {design.epsilon_r_star:.6g}")
    return design


def run_sweep(omega_path, mus, d_max, eps, grid, q_path=None, alpha_path=None, literal=False):
    """
    Optimum eps_r* for every mu_bar

    Returns:
        Rows with mu_bar, epsilon_r_star (None when not optimal) and status
    """
    omega = load_distribution(omega_path, kind=DistKind.CHECK)
    q, alpha = load_selection(q_path, alpha_path)
    return [
        {"mu_bar": mu, "epsilon_r_star": value, "status": status.value}
        for mu, value, status in sweep_mu(omega, mus, d_max, eps, grid, q, alpha, literal)
    ]


def write_design(design, path):
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", encoding="utf-8", newline="") as handle:
        handle.write(design_text(design))
    return str(output_path)
