"""Density evolution for distributed LT codes

All recursions start from P_0 = 1 and iterate until the largest componentwise
change drops below `tol` or `max_iters` is reached.

With mu_bar = Gamma'(1) Omega'(1) eps_r the single-relay EEP update reads

    P_l = exp(-mu_bar * omega(1 - P_{l-1}) * gamma(Omega(1 - P_{l-1})))

Every other recursion is a sum of relay "terms". A term is a set of sources
(a window, or all of them), a node relay distribution Gamma_t and an overhead
weight e_t, with

    Phi_t = sum_m q_m^t Omega(1 - P_m)

where q^t is q restricted to the term's sources and renormalized. Under
weighted selection, source s inside the term picks up

    e_t * Omega'(1) * omega(1 - P_s) * (q_s^t / alpha_s) * Gamma_t'(Phi_t)

in the exponent. Window recursions (DEWLT) use the window-share drive instead:
every source in window t picks up

    e_t / Pi_t * Gamma_t'(Phi_t),    Pi_t = sum of alpha over the window

so for two classes P_M = exp(-eps_r (theta_1/Pi_1 Gamma_1W'(Omega(1 - P_M))
+ theta_2 Gamma_2W'(q_M Omega(1 - P_M) + q_L Omega(1 - P_L)))). The edge drive
stays available for windows through `WindowDrive.EDGE`; both agree when
Omega(x) = x and q = alpha inside every window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from codes.decoder import OVERALL, class_scope, source_scope
from codes.dist import DegreeDistribution
from codes.relay import WindowSpec
from config.constants import DE_MAX_ITERS, DE_TOLERANCE, NORMALIZATION_TOLERANCE
from utils.errors import InvalidParameter, NoCrossing


class MultiRelayMode(str, Enum):
    WEIGHTED = "weighted"
    DEWLT = "dewlt"
    WINDOW_PER_RELAY = "window_per_relay"


class WindowDrive(str, Enum):
    """How a window term feeds the exponent of its member sources"""

    SHARE = "share"
    EDGE = "edge"


@dataclass(frozen=True)
class DEParams:
    """
    Inputs of every recursion

    Exactly one of `epsilon_r` and `mu_bar` is given for single-relay runs; the
    other follows from mu_bar = Gamma'(1) Omega'(1) eps_r. Multi-relay runs give
    `relay_overheads` instead. `window_drive` only affects window recursions.
    """

    omega: DegreeDistribution
    gamma: DegreeDistribution | None = None
    epsilon_r: float | None = None
    mu_bar: float | None = None
    q: tuple | None = None
    alpha: tuple | None = None
    windows: WindowSpec | None = None
    relay_overheads: tuple | None = None
    relay_gammas: tuple | None = None
    relay_windows: tuple | None = None
    window_drive: WindowDrive = WindowDrive.SHARE
    max_iters: int = DE_MAX_ITERS
    tol: float = DE_TOLERANCE

    def __post_init__(self):
        if self.relay_overheads is None and (self.epsilon_r is None) == (self.mu_bar is None):
            raise InvalidParameter("Give exactly one of epsilon_r and mu_bar")
        if self.mu_bar is not None and self.gamma is None:
            raise InvalidParameter("mu_bar needs the relay distribution gamma to derive epsilon_r")
        for name in ("q", "alpha"):
            values = getattr(self, name)
            if values is not None and abs(math.fsum(values) - 1.0) > NORMALIZATION_TOLERANCE:
                raise InvalidParameter(f"{name} must sum to 1, got {math.fsum(values)}")
        if (self.q is None) != (self.alpha is None):
            raise InvalidParameter("q and alpha are given together")
        if self.q is not None and len(self.q) != len(self.alpha):
            raise InvalidParameter(f"q has {len(self.q)} entries, alpha has {len(self.alpha)}")
        if self.relay_overheads is not None and any(e < 0 for e in self.relay_overheads):
            raise InvalidParameter("Relay overheads must be non-negative")
        try:
            object.__setattr__(self, "window_drive", WindowDrive(self.window_drive))
        except ValueError as e:
            raise InvalidParameter(f"Unknown window drive {self.window_drive!r}") from e

    @property
    def overhead(self) -> float:
        """Reception overhead eps_r"""
        if self.relay_overheads is not None:
            return math.fsum(self.relay_overheads)
        if self.epsilon_r is not None:
            return float(self.epsilon_r)
        return self.mu_bar / (self.gamma.mean_degree() * self.omega.mean_degree())

    @property
    def mean_decoder_degree(self) -> float:
        """mu_bar, the average variable-node degree at the decoder"""
        if self.mu_bar is not None:
            return float(self.mu_bar)
        return self.gamma.mean_degree() * self.omega.mean_degree() * self.overhead

    @property
    def num_sources(self) -> int:
        return len(self.q) if self.q is not None else 1

    @property
    def bias(self) -> np.ndarray:
        """w_i = q_i / alpha_i"""
        return np.asarray(self.q, dtype=float) / np.asarray(self.alpha, dtype=float)

    def at_overhead(self, epsilon_r: float) -> DEParams:
        """Same parameters at reception overhead eps_r; relay splits keep their proportions"""
        if self.relay_overheads is not None:
            total = self.overhead
            shares = [e / total for e in self.relay_overheads] if total > 0 else [1.0 / len(self.relay_overheads)] * len(self.relay_overheads)
            return replace(self, relay_overheads=tuple(float(epsilon_r) * s for s in shares))
        return replace(self, epsilon_r=float(epsilon_r), mu_bar=None)


@dataclass(frozen=True)
class DEResult:
    """
    Trajectory rows are iterations (row 0 is P_0 = 1), columns follow `scopes`
    """

    trajectory: np.ndarray = field(repr=False)
    fixed_point: tuple
    converged: bool
    iterations: int
    scopes: tuple
    weights: tuple = ()
    class_fixed_points: dict = field(default_factory=dict)

    def value(self, scope: str = OVERALL) -> float:
        """Fixed-point erasure probability for a scope; overall is alpha-weighted"""
        if scope in self.scopes:
            return self.fixed_point[self.scopes.index(scope)]
        if scope == OVERALL:
            return float(np.dot(self.weights, self.fixed_point))
        if scope in self.class_fixed_points:
            return self.class_fixed_points[scope]
        raise KeyError(scope)

    def scope_values(self) -> dict:
        values = {OVERALL: self.value(OVERALL)}
        values.update({s: self.value(s) for s in self.scopes if s != OVERALL})
        values.update(self.class_fixed_points)
        return values


@dataclass(frozen=True)
class _Term:
    weight: float
    members: tuple
    gamma: DegreeDistribution


def _iterate(update, start: np.ndarray, max_iters: int, tol: float):
    rows = [start]
    current = start
    converged = False
    for _ in range(max_iters):
        nxt = np.clip(update(current), 0.0, 1.0)
        rows.append(nxt)
        change = float(np.max(np.abs(nxt - current)))
        current = nxt
        if change < tol:
            converged = True
            break
    return np.vstack(rows), converged


def _run_terms(p: DEParams, terms, membership=None, drive=WindowDrive.EDGE) -> DEResult:
    """Iterate the per-source recursion defined by `terms` under the given drive"""
    S = p.num_sources
    q = np.asarray(p.q if p.q is not None else (1.0,), dtype=float)
    alpha = np.asarray(p.alpha if p.alpha is not None else (1.0,), dtype=float)
    omega = p.omega
    omega_edge = omega.to_edge_perspective()
    omega_mean = omega.mean_degree()
    edge_drive = WindowDrive(drive) is WindowDrive.EDGE

    prepared = []
    for term in terms:
        members = np.asarray(term.members, dtype=int)
        local_q = np.zeros(S)
        local_q[members] = q[members]
        total = local_q.sum()
        if total <= 0 or term.weight == 0:
            continue
        local_q /= total
        if edge_drive:
            coverage = local_q / alpha
        else:
            coverage = np.zeros(S)
            coverage[members] = 1.0 / alpha[members].sum()
        prepared.append((term.weight, local_q, coverage, term.gamma))

    def update(P):
        omega_at = np.array([omega.evaluate(1.0 - x) for x in P])
        exponent = np.zeros(S)
        for weight, local_q, coverage, gamma in prepared:
            phi = float(np.dot(local_q, omega_at))
            exponent += weight * coverage * gamma.derivative(phi)
        if edge_drive:
            exponent *= omega_mean * np.array([omega_edge.evaluate(1.0 - x) for x in P])
        return np.exp(-exponent)

    trajectory, converged = _iterate(update, np.ones(S), p.max_iters, p.tol)
    fixed = tuple(float(v) for v in trajectory[-1])
    scopes = tuple(source_scope(s) for s in range(1, S + 1)) if p.q is not None else (OVERALL,)
    class_points = {}
    if membership is not None:
        for c in sorted(set(membership)):
            idx = [s for s, m in enumerate(membership) if m == c]
            class_points[class_scope(c)] = float(np.dot(alpha[idx], trajectory[-1][idx]) / alpha[idx].sum())
    return DEResult(
        trajectory=trajectory,
        fixed_point=fixed,
        converged=converged,
        iterations=len(trajectory) - 1,
        scopes=scopes,
        weights=tuple(float(a) for a in alpha),
        class_fixed_points=class_points,
    )


def de_eep(p: DEParams) -> DEResult:
    """Single-class EEP recursion on the edge-perspective polynomials"""
    omega_edge = p.omega.to_edge_perspective()
    gamma_edge = p.gamma.to_edge_perspective()
    mu_bar = p.mean_decoder_degree

    def update(P):
        x = 1.0 - float(P[0])
        return np.array([math.exp(-mu_bar * omega_edge.evaluate(x) * gamma_edge.evaluate(p.omega.evaluate(x)))])

    trajectory, converged = _iterate(update, np.ones(1), p.max_iters, p.tol)
    return DEResult(
        trajectory=trajectory,
        fixed_point=(float(trajectory[-1][0]),),
        converged=converged,
        iterations=len(trajectory) - 1,
        scopes=(OVERALL,),
        weights=(1.0,),
    )


def de_uep_weighted(p: DEParams) -> DEResult:
    """Per-source recursion under weighted source selection"""
    if p.q is None:
        raise InvalidParameter("Weighted UEP needs q and alpha")
    all_sources = tuple(range(p.num_sources))
    return _run_terms(p, [_Term(p.overhead, all_sources, p.gamma)])


def _window_terms(windows: WindowSpec, overhead: float) -> list:
    return [
        _Term(overhead * windows.theta[j], tuple(windows.sources_in(j)), windows.gammas[j - 1])
        for j in range(1, windows.num_windows + 1)
    ]


def de_dewlt(p: DEParams) -> DEResult:
    """
    Expanding-window recursion

    Window j contributes theta_j / Pi_j * Gamma_jW'(Phi_j) to every source of
    class <= j, with Pi_j the alpha mass of the window. `p.window_drive = EDGE`
    switches to the weighted-selection drive restricted to each window.
    Results carry per-source and per-class (`class:<i>`) fixed points.
    """
    if p.windows is None:
        raise InvalidParameter("DEWLT density evolution needs a window spec")
    if p.q is None:
        raise InvalidParameter("DEWLT density evolution needs q and alpha")
    return _run_terms(p, _window_terms(p.windows, p.overhead), p.windows.membership, p.window_drive)


def de_multirelay(p: DEParams, mode=MultiRelayMode.WEIGHTED) -> DEResult:
    """
    Multi-relay recursions driven by per-relay overheads eps_{r,j}

    Every relay adds its own terms; relays are never folded together.

    Modes:
        weighted: relay j uses Gamma_j (default gamma) over every source
        dewlt: every relay applies its window spec (default p.windows)
        window_per_relay: relay j carries window j only; needs R == I
    """
    mode = MultiRelayMode(mode)
    if p.relay_overheads is None:
        raise InvalidParameter("Multi-relay density evolution needs relay_overheads")
    R = len(p.relay_overheads)
    if p.q is None:
        p = replace(p, q=(1.0,), alpha=(1.0,))
    all_sources = tuple(range(p.num_sources))

    if mode is MultiRelayMode.WEIGHTED:
        gammas = p.relay_gammas or (p.gamma,) * R
        terms = [_Term(eps, all_sources, gamma) for eps, gamma in zip(p.relay_overheads, gammas)]
        return _run_terms(p, terms)

    if mode is MultiRelayMode.DEWLT:
        specs = p.relay_windows or (p.windows,) * R
        if any(spec is None for spec in specs):
            raise InvalidParameter("dewlt mode needs a window spec for every relay")
        terms = [t for eps, spec in zip(p.relay_overheads, specs) for t in _window_terms(spec, eps)]
        return _run_terms(p, terms, specs[0].membership, p.window_drive)

    windows = p.windows
    if windows is None or windows.num_windows != R:
        raise InvalidParameter(f"window_per_relay needs one window per relay, got R={R}")
    terms = [
        _Term(p.relay_overheads[j - 1], tuple(windows.sources_in(j)), windows.gammas[j - 1])
        for j in range(1, R + 1)
    ]
    return _run_terms(p, terms, windows.membership, p.window_drive)


def de_threshold(p: DEParams, target: float, runner=de_eep, scope: str = OVERALL, lo=0.0, hi=10.0, tol=1e-6) -> float:
    """
    Smallest eps_r whose fixed point in `scope` is <= target, by bisection

    Raises:
        NoCrossing: If even eps_r = hi stays above the target
    """
    def fixed(eps):
        return runner(p.at_overhead(eps)).value(scope)

    if fixed(hi) > target:
        raise NoCrossing(f"Fixed point stays above {target} up to eps_r = {hi}")
    if fixed(lo) <= target:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fixed(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def unconnected_fraction(mu: float) -> float:
    """Asymptotic fraction of degree-0 variables, exp(-mu)"""
    if mu < 0:
        raise InvalidParameter(f"mu must be non-negative, got {mu}")
    return math.exp(-mu)


def transmission_to_reception(epsilon: float, delta: float) -> float:
    """Received checks per bit when a fraction delta of transmissions is erased"""
    if not 0.0 <= delta <= 1.0:
        raise InvalidParameter(f"delta must lie in [0, 1], got {delta}")
    return (1.0 - delta) * epsilon


def relay_overheads(epsilon: float, deltas, shares=None) -> tuple:
    """
    Split a transmission overhead into per-relay reception overheads

    Args:
        epsilon: Transmission overhead N/K
        deltas: Relay-destination erasure probability per relay
        shares: Fraction of transmissions per relay (uniform when omitted)
    """
    R = len(deltas)
    shares = shares if shares is not None else [1.0 / R] * R
    return tuple(transmission_to_reception(epsilon * share, delta) for share, delta in zip(shares, deltas))
