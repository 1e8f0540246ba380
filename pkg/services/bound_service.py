"""Service for ML lower-bound curves of expanding-window configurations"""
from analysis.bounds import ml_bound_curve
from config.experiment import DeAxis, ExperimentConfig
from services.de_service import reception_factor
from utils.errors import ConfigInvalid


def bound_rows(cfg: ExperimentConfig, overheads=None):
    """
    Rows `epsilon_r,scope,bound`, one per class and grid value

    Grid values on the transmission axis are converted to reception overhead
    before the bound is evaluated; the epsilon_r column keeps the grid value.

    Raises:
        ConfigInvalid: If the configuration has no expanding windows
    """
    if cfg.windows is None:
        raise ConfigInvalid("ML bounds need an expanding-window configuration (windows, theta, gamma_window.<j>)")
    overheads = list(cfg.overheads if overheads is None else overheads)
    factor = reception_factor(cfg) if cfg.de_axis is DeAxis.TRANSMISSION else 1.0
    curves = ml_bound_curve(cfg.windows, cfg.omega, cfg.block_lengths, [eps * factor for eps in overheads])
    return [
        {"epsilon_r": float(eps), "scope": scope, "bound": float(value)}
        for scope, values in curves.items()
        for eps, value in zip(overheads, values)
    ]
