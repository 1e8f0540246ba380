"""Service for density-evolution curves of an experiment configuration"""
from __future__ import annotations

from functools import partial

from analysis.density_evolution import (
    DEParams,
    de_dewlt,
    de_eep,
    de_multirelay,
    de_threshold,
    de_uep_weighted,
    relay_overheads,
)
from config.experiment import DeAxis, ExperimentConfig
from services.simulation_service import scope_sort_key
from utils.errors import ConfigInvalid, NoCrossing


def reception_factor(cfg: ExperimentConfig) -> float:
    """
    eps_r / eps for the configured relay-destination links

    Every scheduling policy gives each relay the same share of transmissions.
    """
    return sum(relay_overheads(1.0, cfg.relay_deltas))


def de_params(cfg: ExperimentConfig, epsilon: float) -> tuple:
    """
    DEParams and the matching recursion for one grid value

    Args:
        cfg: Experiment configuration
        epsilon: Grid value on the configured axis (transmission or reception overhead)

    Returns:
        (DEParams, runner) where runner(DEParams) -> DEResult
    """
    if cfg.de_axis is DeAxis.TRANSMISSION:
        per_relay = relay_overheads(epsilon, cfg.relay_deltas)
    else:
        per_relay = tuple(epsilon / cfg.num_relays for _ in cfg.relays)

    first = cfg.relays[0]
    if any(relay.q != first.q for relay in cfg.relays):
        raise ConfigInvalid("Density evolution needs the same selection q at every relay")
    q = tuple(first.q.coefficients)
    alpha = cfg.alpha

    if cfg.num_relays > 1:
        params = DEParams(
            omega=cfg.omega,
            gamma=first.gamma,
            q=q,
            alpha=alpha,
            windows=cfg.windows,
            relay_overheads=per_relay,
            relay_gammas=tuple(relay.gamma for relay in cfg.relays),
            window_drive=cfg.window_drive,
        )
        return params, partial(de_multirelay, mode=cfg.de_mode)

    epsilon_r = per_relay[0]
    if cfg.windows is not None:
        params = DEParams(
            omega=cfg.omega, epsilon_r=epsilon_r, q=q, alpha=alpha, windows=cfg.windows, window_drive=cfg.window_drive
        )
        return params, de_dewlt
    if cfg.num_sources == 1:
        return DEParams(omega=cfg.omega, gamma=first.gamma, epsilon_r=epsilon_r), de_eep
    return DEParams(omega=cfg.omega, gamma=first.gamma, epsilon_r=epsilon_r, q=q, alpha=alpha), de_uep_weighted


def de_curve_for(cfg: ExperimentConfig, overheads=None) -> list:
    """
    DE rows `epsilon_r,scope,P_fixed,iterations,converged` over a grid

    The epsilon_r column holds the grid value on the configured axis, so curves
    on the transmission axis line up with simulated curves.
    """
    overheads = cfg.overheads if overheads is None else overheads
    rows = []
    for epsilon in overheads:
        params, runner = de_params(cfg, epsilon)
        result = runner(params)
        for scope, value in result.scope_values().items():
            rows.append({
                "epsilon_r": float(epsilon),
                "scope": scope,
                "P_fixed": float(value),
                "iterations": result.iterations,
                "converged": result.converged,
            })
    rows.sort(key=lambda row: (scope_sort_key(row["scope"]), row["epsilon_r"]))
    return rows


def de_thresholds(cfg: ExperimentConfig, target: float, scopes=None) -> dict:
    """
    Smallest grid-axis overhead at which each scope's fixed point reaches `target`

    Returns:
        {scope: overhead}; scopes that never reach the target map to None
    """
    params, runner = de_params(cfg, cfg.overheads[-1])
    if scopes is None:
        scopes = list(runner(params).scope_values())
    factor = reception_factor(cfg) if cfg.de_axis is DeAxis.TRANSMISSION else 1.0
    hi = params.overhead * 4.0
    thresholds = {}
    for scope in scopes:
        try:
            thresholds[scope] = de_threshold(params, target, runner, scope, hi=hi) / factor
        except NoCrossing:
            thresholds[scope] = None
    return thresholds
