"""Lower bound on ML decoding failure for expanding-window codes"""
from __future__ import annotations

from codes.decoder import class_scope
from codes.dist import DegreeDistribution
from codes.relay import WindowSpec
from utils.errors import ArgumentOutOfRange, InvalidParameter


def ml_lower_bound(theta, rho, kappa_w, K: int, epsilon_r: float, class_index: int) -> float:
    """
    Probability that a class-i bit has no relay check at all

    (1 - sum_{j>=i} theta_j rho_j / kappa_wj) ^ (K eps_r)

    Args:
        theta: Window-assignment probabilities theta_1..theta_I
        rho: Mean relay-check edges per window, rho_j = Gamma_jW'(1) Omega'(1)
        kappa_w: Window sizes kappa_wj = sum_{t<=j} kappa_t (in bits)
        K: Total information bits
        epsilon_r: Reception overhead
        class_index: Importance class i (1-based)

    Raises:
        ArgumentOutOfRange: If the inner sum leaves [0, 1]
    """
    if not len(theta) == len(rho) == len(kappa_w):
        raise InvalidParameter("theta, rho and kappa_w must have one entry per window")
    if not 1 <= class_index <= len(theta):
        raise InvalidParameter(f"Class index {class_index} outside 1..{len(theta)}")
    inner = sum(theta[j] * rho[j] / kappa_w[j] for j in range(class_index - 1, len(theta)))
    if not 0.0 <= inner <= 1.0:
        raise ArgumentOutOfRange(f"Connection probability {inner} per check is outside [0, 1]")
    return (1.0 - inner) ** (K * epsilon_r)


def window_statistics(windows: WindowSpec, omega: DegreeDistribution, block_sizes) -> tuple:
    """(theta, rho, kappa_w) for a window configuration and per-source block sizes"""
    theta = [windows.theta[j] for j in range(1, windows.num_windows + 1)]
    rho = [gamma.mean_degree() * omega.mean_degree() for gamma in windows.gammas]
    kappa_w = [
        sum(block_sizes[s] for s in windows.sources_in(j))
        for j in range(1, windows.num_windows + 1)
    ]
    return theta, rho, kappa_w


def ml_bound_curve(windows: WindowSpec, omega: DegreeDistribution, block_sizes, overheads) -> dict:
    """
    Bound per class over a grid of reception overheads

    Returns:
        {"class:<i>": [bound at each overhead]}
    """
    theta, rho, kappa_w = window_statistics(windows, omega, block_sizes)
    K = sum(block_sizes)
    return {
        class_scope(i): [ml_lower_bound(theta, rho, kappa_w, K, eps, i) for eps in overheads]
        for i in range(1, windows.num_windows + 1)
    }
