"""Validation utilities"""
import math
import os

from config.constants import NORMALIZATION_TOLERANCE


def validate_probability(value, name="value"):
    """
    Validate a probability in [0, 1]

    Args:
        value: Number or numeric string
        name: Parameter name for the error message

    Returns:
        The value as float

    Raises:
        ValueError: If value is not a number in [0, 1]
    """
    number = float(value)
    if not 0.0 <= number <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return number


def validate_probability_vector(values, name="vector"):
    """
    Validate a non-negative vector summing to one

    Raises:
        ValueError: If an entry is negative or the sum is off by more than the tolerance
    """
    numbers = [float(v) for v in values]
    if not numbers:
        raise ValueError(f"{name} is empty")
    if any(v < 0 for v in numbers):
        raise ValueError(f"{name} has negative entries: {numbers}")
    total = math.fsum(numbers)
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise ValueError(f"{name} sums to {total}, expected 1")
    return numbers


def validate_increasing(values, name="grid"):
    """
    Validate a strictly increasing sequence

    Raises:
        ValueError: If the sequence is empty or not strictly increasing
    """
    numbers = [float(v) for v in values]
    if not numbers:
        raise ValueError(f"{name} is empty")
    if any(b <= a for a, b in zip(numbers, numbers[1:])):
        raise ValueError(f"{name} must be strictly increasing: {numbers}")
    return numbers


def validate_environment():
    """
    Validate environment variables

    Raises:
        ValueError: If DLT_WORKERS or DLT_SEED is malformed
    """
    workers = os.getenv("DLT_WORKERS")
    if workers is not None:
        if not workers.lstrip("-").isdigit() or int(workers) == 0:
            raise ValueError(f"DLT_WORKERS must be a non-zero integer (-1 uses every core), got {workers!r}")

    seed = os.getenv("DLT_SEED")
    if seed is not None and not seed.isdigit():
        raise ValueError(f"DLT_SEED must be a non-negative integer, got {seed!r}")
