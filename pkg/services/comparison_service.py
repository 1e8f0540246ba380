"""Service for comparing simulated curves against density evolution"""
import math

from config.constants import COMPARISON_TARGETS
from utils.errors import NoCrossing


def crossing_overhead(curve, target):
    """
    Overhead at which an erasure-rate curve first drops to `target`

    Interpolates log(rate) linearly between the last point above the target and
    the first point at or below it (linearly in rate when that point is 0).

    Args:
        curve: (overhead, rate) pairs sorted by overhead
        target: Erasure rate in (0, 1)

    Raises:
        NoCrossing: If no point of the curve reaches the target
    """
    previous = None
    for overhead, rate in curve:
        if rate <= target:
            if previous is None:
                return float(overhead)
            x0, y0 = previous
            if rate > 0.0:
                fraction = (math.log(y0) - math.log(target)) / (math.log(y0) - math.log(rate))
            else:
                fraction = (y0 - target) / y0
            return float(x0 + fraction * (overhead - x0))
        previous = (overhead, rate)
    raise NoCrossing(f"Curve never reaches erasure rate {target}")


def compare_to_de(simulated, predicted, targets=COMPARISON_TARGETS):
    """
    Crossing overheads of both curves at each target rate

    Args:
        simulated: (overhead, rate) pairs from simulation
        predicted: (overhead, rate) pairs from density evolution
        targets: Target erasure rates

    Returns:
        List of dicts with target, simulated, predicted and gap (simulated - predicted)

    Raises:
        NoCrossing: If either curve never reaches a target
    """
    report = []
    for target in targets:
        sim = crossing_overhead(simulated, target)
        de = crossing_overhead(predicted, target)
        report.append({"target": target, "simulated": sim, "predicted": de, "gap": sim - de})
    return report


def de_curve(rows, scope="overall"):
    """(overhead, P_fixed) pairs of one scope from DE rows"""
    return sorted((row["epsilon_r"], row["P_fixed"]) for row in rows if row["scope"] == scope)
