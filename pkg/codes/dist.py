"""Degree distributions

One representation serves every polynomial of the scheme: source check-node
distributions, relay distributions, selection, window-assignment and
importance distributions. Coefficients are stored dense for degrees 1..d_max.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import stats

from config.constants import NORMALIZATION_TOLERANCE
from utils.errors import (
    DomainError,
    InvalidParameter,
    NegativeMass,
    NotNormalized,
    WrongPerspective,
)

# Slack for polynomial arguments produced by floating sums such as sum(q_m * Omega(.))
_DOMAIN_SLACK = 1e-12


class Perspective(str, Enum):
    NODE = "node"
    EDGE = "edge"


class DistKind(str, Enum):
    CHECK = "check"
    RELAY = "relay"
    SELECTION = "selection"
    WINDOW_ASSIGNMENT = "window_assignment"
    IMPORTANCE = "importance"


@dataclass(frozen=True)
class DegreeDistribution:
    """
    Probability mass over degrees 1..d_max

    Use the constructors (`from_coefficients`, `from_weights`, `robust_soliton`,
    `point_mass`) rather than the raw dataclass; they validate and normalize.
    """

    coefficients: tuple
    perspective: Perspective = Perspective.NODE
    kind: DistKind = DistKind.CHECK

    @property
    def d_max(self) -> int:
        return len(self.coefficients)

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=float)

    @cached_property
    def _cdf(self) -> np.ndarray:
        return np.cumsum(self.array)

    @cached_property
    def _last_positive(self) -> int:
        return int(np.flatnonzero(self.array > 0)[-1]) + 1

    def __getitem__(self, degree: int) -> float:
        """Mass at `degree` (1-based); zero outside 1..d_max"""
        if 1 <= degree <= self.d_max:
            return self.coefficients[degree - 1]
        return 0.0

    def support(self) -> list:
        return [j for j, c in enumerate(self.coefficients, start=1) if c > 0]

    def evaluate(self, x: float) -> float:
        """
        Polynomial value at x

        Node perspective evaluates sum d_j x^j, edge perspective sum d_j x^(j-1).

        Raises:
            DomainError: If x lies outside [0, 1]
        """
        x = _check_domain(x)
        value = P.polyval(x, self._power_coefficients())
        return float(value)

    def derivative(self, x: float) -> float:
        """First derivative of the polynomial at x"""
        x = _check_domain(x)
        return float(P.polyval(x, P.polyder(self._power_coefficients())))

    def mean_degree(self) -> float:
        """
        Average node degree

        For a node-perspective distribution this is Omega'(1). For an edge
        distribution the matching node mean 1 / sum(gamma_j / j) is returned.
        """
        degrees = np.arange(1, self.d_max + 1)
        if self.perspective is Perspective.NODE:
            return float(np.dot(degrees, self.array))
        return float(1.0 / np.dot(self.array, 1.0 / degrees))

    def sample(self, rng: np.random.Generator) -> int:
        """Draw one degree by inverse CDF over the stored order"""
        index = int(np.searchsorted(self._cdf, rng.random(), side="right")) + 1
        return min(index, self._last_positive)

    def to_edge_perspective(self) -> DegreeDistribution:
        """
        Convert node coefficients to edge coefficients w_j = j * W_j / W'(1)

        Raises:
            WrongPerspective: If the distribution is already edge perspective
        """
        if self.perspective is not Perspective.NODE:
            raise WrongPerspective("to_edge_perspective expects a node-perspective distribution")
        weighted = self.array * np.arange(1, self.d_max + 1)
        return DegreeDistribution(
            tuple(float(c) for c in weighted / weighted.sum()),
            Perspective.EDGE,
            self.kind,
        )

    def to_node_perspective(self) -> DegreeDistribution:
        """
        Convert edge coefficients back to node coefficients W_j ~ w_j / j

        Raises:
            WrongPerspective: If the distribution is already node perspective
        """
        if self.perspective is not Perspective.EDGE:
            raise WrongPerspective("to_node_perspective expects an edge-perspective distribution")
        weighted = self.array / np.arange(1, self.d_max + 1)
        return DegreeDistribution(
            tuple(float(c) for c in weighted / weighted.sum()),
            Perspective.NODE,
            self.kind,
        )

    def to_text(self) -> str:
        """Serialize as `degree:probability` lines, zero-mass degrees omitted"""
        lines = [f"{j}:{c:.12g}" for j, c in enumerate(self.coefficients, start=1) if c > 0]
        return "\n".join(lines) + "\n"

    def _power_coefficients(self) -> np.ndarray:
        # index k holds the coefficient of x^k
        if self.perspective is Perspective.NODE:
            return np.concatenate(([0.0], self.array))
        return self.array


def _check_domain(x):
    if x < -_DOMAIN_SLACK or x > 1.0 + _DOMAIN_SLACK:
        raise DomainError(f"Polynomial argument must lie in [0, 1], got {x}")
    return min(max(float(x), 0.0), 1.0)


def from_coefficients(
    coeffs,
    perspective=Perspective.NODE,
    kind=DistKind.CHECK,
    allow_trailing_zero=False,
) -> DegreeDistribution:
    """
    Validate a probability list and build a distribution

    The vector is renormalized once when its sum is within tolerance of one.

    Args:
        coeffs: Mass per degree, index 0 is degree 1
        perspective: Node or edge perspective
        kind: Role of the distribution
        allow_trailing_zero: Permit zero mass at d_max (selection vectors)

    Returns:
        Validated DegreeDistribution

    Raises:
        InvalidParameter: If the list is empty or d_max carries no mass
        NegativeMass: If any coefficient is negative
        NotNormalized: If the sum differs from one by more than 1e-9
    """
    values = [float(c) for c in coeffs]
    if not values:
        raise InvalidParameter("A degree distribution needs at least one coefficient")
    if any(c < 0 for c in values):
        raise NegativeMass(f"Negative probability mass in {values}")
    total = math.fsum(values)
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise NotNormalized(f"Coefficients sum to {total}, expected 1")
    if values[-1] == 0.0 and not allow_trailing_zero:
        raise InvalidParameter("Coefficient at d_max is zero; trim the vector or allow trailing zeros")
    return DegreeDistribution(
        tuple(c / total for c in values),
        Perspective(perspective),
        DistKind(kind),
    )


def from_weights(weights, perspective=Perspective.NODE, kind=DistKind.CHECK) -> DegreeDistribution:
    """Normalize arbitrary non-negative weights (e.g. rounded published tables)"""
    values = np.asarray([float(w) for w in weights], dtype=float)
    if values.size == 0 or values.sum() <= 0:
        raise InvalidParameter("Weights must contain positive mass")
    if (values < 0).any():
        raise NegativeMass(f"Negative weight in {values.tolist()}")
    return from_coefficients(values / values.sum(), perspective, kind, allow_trailing_zero=True)


def point_mass(degree: int, kind=DistKind.CHECK) -> DegreeDistribution:
    if degree < 1:
        raise InvalidParameter(f"Degree must be >= 1, got {degree}")
    coeffs = [0.0] * degree
    coeffs[-1] = 1.0
    return from_coefficients(coeffs, Perspective.NODE, kind)


def robust_soliton(K: int, c: float, delta_rsd: float) -> DegreeDistribution:
    """
    Robust Soliton distribution over degrees 1..K

    Ideal Soliton plus the tau term with spike at floor(K/R), R = c ln(K/delta) sqrt(K).
    The spike index is capped at K and negative spike mass (R < delta) is dropped.

    Raises:
        InvalidParameter: If K < 1, c <= 0 or delta_rsd not in (0, 1)
    """
    if K < 1:
        raise InvalidParameter(f"K must be >= 1, got {K}")
    if c <= 0:
        raise InvalidParameter(f"c must be positive, got {c}")
    if not 0 < delta_rsd < 1:
        raise InvalidParameter(f"delta_rsd must lie in (0, 1), got {delta_rsd}")
    if K == 1:
        return from_coefficients([1.0])

    degrees = np.arange(1, K + 1, dtype=float)
    rho = np.empty(K)
    rho[0] = 1.0 / K
    rho[1:] = 1.0 / (degrees[1:] * (degrees[1:] - 1.0))

    R = c * math.log(K / delta_rsd) * math.sqrt(K)
    spike = min(max(int(math.floor(K / R)), 1), K)
    tau = np.zeros(K)
    tau[: spike - 1] = R / (degrees[: spike - 1] * K)
    tau[spike - 1] = max(R * math.log(R / delta_rsd) / K, 0.0)

    mass = rho + tau
    return from_coefficients(mass / mass.sum(), Perspective.NODE, DistKind.CHECK)


def from_text(text: str, perspective=Perspective.NODE, kind=DistKind.CHECK) -> DegreeDistribution:
    """
    Parse `degree:probability` lines

    Blank lines and `#` comments are skipped; missing degrees get zero mass.
    """
    masses = {}
    for raw_line in text.splitlines():
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            degree_str, prob_str = line.split(":", 1)
            degree = int(degree_str)
            prob = float(prob_str)
        except ValueError:
            raise InvalidParameter(f"Malformed distribution line: {raw_line!r}")
        if degree < 1:
            raise InvalidParameter(f"Degrees start at 1, got {degree}")
        masses[degree] = masses.get(degree, 0.0) + prob
    if not masses:
        raise InvalidParameter("Distribution text holds no entries")
    coeffs = [masses.get(j, 0.0) for j in range(1, max(masses) + 1)]
    return from_coefficients(coeffs, perspective, kind)


def load_distribution(path, perspective=Perspective.NODE, kind=DistKind.CHECK) -> DegreeDistribution:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Distribution file not found: {path}")
    return from_text(path.read_text(encoding="utf-8"), perspective, kind)


def poisson_parameter(mean_check_degree: float, received: int, K: int) -> float:
    """Poisson parameter mu = Omega_avg * N_hat / K of the decoder variable degrees"""
    if K < 1:
        raise InvalidParameter(f"K must be >= 1, got {K}")
    return mean_check_degree * received / K


def variable_degree_pmf(mu: float, d_max: int) -> np.ndarray:
    """Poisson(mu) masses for variable degrees 0..d_max"""
    if mu < 0:
        raise InvalidParameter(f"mu must be non-negative, got {mu}")
    return stats.poisson.pmf(np.arange(d_max + 1), mu)
