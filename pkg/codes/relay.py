"""Relay buffering and combining

Schemes:
    conventional  - bufferless; XOR of at most one current symbol per source
    shift_buffer  - D-entry FIFO per link, newest entries combined first
    slot_buffer   - D slots per link indexed by the round's class, for lossy links
    one_bit       - last received symbol per link
Expanding-window selection layers on top of any buffered scheme.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from operator import xor

import numpy as np

from codes.channel import ERASED
from codes.dist import DegreeDistribution, DistKind, from_coefficients
from codes.source import SourceCodedSymbol, class_of_round
from utils.errors import (
    BuffersNotFull,
    InvalidParameter,
    ModeMismatch,
    WindowsNotConfigured,
)


class RelayScheme(str, Enum):
    CONVENTIONAL = "conventional"
    SHIFT_BUFFER = "shift_buffer"
    SLOT_BUFFER = "slot_buffer"
    ONE_BIT = "one_bit"

    @property
    def buffered(self) -> bool:
        return self is not RelayScheme.CONVENTIONAL

    @property
    def partitioned_sources(self) -> bool:
        """Whether sources must use class-partitioned encoding"""
        return self in (RelayScheme.SHIFT_BUFFER, RelayScheme.SLOT_BUFFER)


class BufferMode(str, Enum):
    SHIFT = "shift"
    SLOT = "slot"
    ONE_BIT = "one_bit"


class BufferSelection(str, Enum):
    NEWEST = "newest"
    RANDOM = "random"
    OLDEST = "oldest"


class ErasurePolicy(str, Enum):
    STALL = "stall"
    RESELECT = "reselect"


_SCHEME_BUFFER_MODES = {
    RelayScheme.SHIFT_BUFFER: BufferMode.SHIFT,
    RelayScheme.SLOT_BUFFER: BufferMode.SLOT,
    RelayScheme.ONE_BIT: BufferMode.ONE_BIT,
}


def _arrived(symbol) -> bool:
    return symbol is not None and symbol is not ERASED


class LinkBuffer:
    """
    Per-link buffer at a relay

    Slot positions are 1-based in the public API. In shift mode slot m holds
    the symbol received m-1 arrivals ago; in slot mode slot p holds the latest
    symbol whose round maps to class p.
    """

    def __init__(self, source_id: int, depth: int, mode: BufferMode):
        mode = BufferMode(mode)
        if mode is BufferMode.ONE_BIT:
            depth = 1
        if depth < 1:
            raise InvalidParameter(f"Buffer depth must be >= 1, got {depth}")
        self.source_id = source_id
        self.depth = depth
        self.mode = mode
        self.slots = [None] * depth

    def __repr__(self):
        return f"LinkBuffer(source_id={self.source_id}, depth={self.depth}, mode={self.mode.value}, fill={self.fill_count})"

    @property
    def fill_count(self) -> int:
        return sum(1 for s in self.slots if s is not None)

    @property
    def is_full(self) -> bool:
        return all(s is not None for s in self.slots)

    def push_shift(self, symbol: SourceCodedSymbol):
        """
        Right-shift the buffer and store `symbol` at slot 1

        Returns:
            The symbol shifted out of slot D, or None
        """
        self._require(BufferMode.SHIFT)
        evicted = self.slots[-1]
        self.slots = [symbol] + self.slots[:-1]
        return evicted

    def store_slot(self, symbol, n: int):
        """
        Overwrite slot mod(n-1, D)+1 with `symbol`

        An erased arrival (None or ERASED) leaves the buffer untouched.

        Returns:
            The overwritten symbol, or None
        """
        self._require(BufferMode.SLOT)
        if not _arrived(symbol):
            return None
        if symbol.round != n:
            raise InvalidParameter(f"Symbol of round {symbol.round} stored in round {n}")
        position = class_of_round(n, self.depth) - 1
        previous = self.slots[position]
        self.slots[position] = symbol
        return previous

    def store_latest(self, symbol):
        """Keep the newest arrival; erasures keep the previous one"""
        self._require(BufferMode.ONE_BIT)
        if not _arrived(symbol):
            return None
        previous = self.slots[0]
        self.slots[0] = symbol
        return previous

    def receive(self, symbol, n: int):
        """Apply this round's arrival according to the buffer mode"""
        if self.mode is BufferMode.SHIFT:
            # erasures never shift; only received symbols enter the FIFO
            if _arrived(symbol):
                return self.push_shift(symbol)
            return None
        if self.mode is BufferMode.SLOT:
            return self.store_slot(symbol, n)
        return self.store_latest(symbol)

    def slot_positions(self, count: int, n: int, selection: BufferSelection, rng) -> list:
        """
        1-based slot positions of the `count` entries to combine in round n

        Slot mode walks u_m = mod(v_l - m + D, D) + 1 back from the round's slot
        v_l for NEWEST, and forward from the slot after v_l for OLDEST.
        """
        count = min(count, self.depth)
        if selection is BufferSelection.RANDOM:
            return [int(p) + 1 for p in rng.choice(self.depth, size=count, replace=False)]
        if self.mode is BufferMode.SLOT:
            v_l = class_of_round(n, self.depth)
            if selection is BufferSelection.NEWEST:
                return [(v_l - m + self.depth) % self.depth + 1 for m in range(1, count + 1)]
            return [(v_l + m - 1) % self.depth + 1 for m in range(1, count + 1)]
        if selection is BufferSelection.NEWEST:
            return list(range(1, count + 1))
        return list(range(self.depth, self.depth - count, -1))

    def _require(self, mode):
        if self.mode is not mode:
            raise ModeMismatch(f"Operation needs a {mode.value} buffer, this one is {self.mode.value}")


@dataclass(frozen=True)
class WindowSpec:
    """
    Expanding-window configuration

    membership[s] is the importance class of the source at position s; window j
    holds every source whose class is <= j.
    """

    membership: tuple
    theta: DegreeDistribution
    gammas: tuple

    def __post_init__(self):
        classes = self.num_windows
        if sorted(set(self.membership)) != list(range(1, classes + 1)):
            raise InvalidParameter(
                f"Window membership {self.membership} must use every class 1..{classes}"
            )
        if self.theta.d_max != classes:
            raise InvalidParameter(f"theta has {self.theta.d_max} entries for {classes} windows")
        if len(self.gammas) != classes:
            raise InvalidParameter(f"{len(self.gammas)} window relay distributions for {classes} windows")

    @property
    def num_windows(self) -> int:
        return max(self.membership)

    def sources_in(self, window: int) -> list:
        """0-based source positions inside window `window`"""
        return [s for s, c in enumerate(self.membership) if c <= window]

    def class_sources(self, class_index: int) -> list:
        return [s for s, c in enumerate(self.membership) if c == class_index]


@dataclass(frozen=True)
class RelayConfig:
    relay_id: int
    gamma: DegreeDistribution
    q: DegreeDistribution
    scheme: RelayScheme = RelayScheme.SHIFT_BUFFER
    depth: int = 1
    windows: WindowSpec | None = None
    policy: ErasurePolicy = ErasurePolicy.STALL
    selection: BufferSelection = BufferSelection.NEWEST

    def __post_init__(self):
        scheme = RelayScheme(self.scheme)
        S = self.num_sources
        limit = self.depth * S if scheme in (RelayScheme.SHIFT_BUFFER, RelayScheme.SLOT_BUFFER) else S
        gammas = [self.gamma] + (list(self.windows.gammas) if self.windows else [])
        for gamma in gammas:
            if gamma.d_max > limit:
                raise InvalidParameter(
                    f"Relay {self.relay_id}: d_max={gamma.d_max} exceeds {limit} for scheme {scheme.value}"
                )
        if self.depth < 1:
            raise InvalidParameter(f"Relay {self.relay_id}: depth must be >= 1")
        if self.windows is not None:
            if not scheme.buffered:
                raise InvalidParameter("Expanding windows need a buffered relay scheme")
            if len(self.windows.membership) != S:
                raise InvalidParameter(f"Window membership covers {len(self.windows.membership)} of {S} sources")
            for window in range(1, self.windows.num_windows + 1):
                if sum(self.q.array[self.windows.sources_in(window)]) <= 0:
                    raise InvalidParameter(f"Window {window} has no selection mass")

    @property
    def num_sources(self) -> int:
        return self.q.d_max

    @property
    def buffer_mode(self) -> BufferMode | None:
        return _SCHEME_BUFFER_MODES.get(RelayScheme(self.scheme))


@dataclass(frozen=True)
class RelayCodedSymbol:
    relay_id: int
    round: int
    neighbors_by_source: dict = field(hash=False)
    provenance: tuple = ()
    payload: int | None = None
    window: int | None = None

    @property
    def degree(self) -> int:
        return len(self.provenance)

    @property
    def neighbors(self) -> frozenset:
        # global id spaces of distinct sources are disjoint
        return frozenset().union(*self.neighbors_by_source.values())


@dataclass(frozen=True)
class Stall:
    """Relay deferred its transmission this round"""

    relay_id: int
    round: int


def eep_selection(alpha) -> DegreeDistribution:
    """Selection q_i = alpha_i, i.e. every bias factor w_i = 1"""
    return from_coefficients(alpha, kind=DistKind.SELECTION, allow_trailing_zero=True)


def sample_source_counts(q, d: int, rng: np.random.Generator, capacity=None) -> np.ndarray:
    """
    Sample q d times and count picks per source

    Args:
        q: Selection distribution (or weight vector) over the S sources
        d: Total degree
        rng: Relay random stream
        capacity: Optional per-source cap; excess picks are redrawn from q
            restricted to sources with spare capacity, dropped when none is left

    Returns:
        Integer array of per-source counts
    """
    if d < 1:
        raise InvalidParameter(f"Total degree must be >= 1, got {d}")
    weights = q.array if isinstance(q, DegreeDistribution) else np.asarray(q, dtype=float)
    probs = weights / weights.sum()
    counts = rng.multinomial(d, probs)
    if capacity is None:
        return counts

    capacity = np.asarray(capacity, dtype=int)
    excess = int(np.maximum(counts - capacity, 0).sum())
    counts = np.minimum(counts, capacity)
    while excess > 0:
        eligible = np.flatnonzero((counts < capacity) & (probs > 0))
        if eligible.size == 0:
            break
        pick = rng.choice(eligible, p=probs[eligible] / probs[eligible].sum())
        counts[pick] += 1
        excess -= 1
    return counts


def _require_full(relay, buffers):
    mode = relay.buffer_mode
    for buf in buffers:
        if buf.mode is not mode:
            raise ModeMismatch(f"Relay {relay.relay_id} expects {mode.value} buffers, got {buf.mode.value}")
        if not buf.is_full:
            raise BuffersNotFull(f"Relay {relay.relay_id}: buffer of source {buf.source_id} holds {buf.fill_count}/{buf.depth}")


def _build_symbol(relay, n, picks, window=None) -> RelayCodedSymbol:
    """picks: list of (source_id, [SourceCodedSymbol, ...]) in source order"""
    neighbors_by_source = {}
    provenance = []
    payloads = []
    for source_id, symbols in picks:
        if not symbols:
            continue
        neighbors_by_source[source_id] = reduce(xor, (s.global_neighbors for s in symbols), frozenset())
        provenance.extend((s.source_id, s.round) for s in symbols)
        payloads.extend(s.payload for s in symbols)
    payload = None
    if payloads and all(p is not None for p in payloads):
        payload = reduce(xor, payloads, 0)
    return RelayCodedSymbol(
        relay_id=relay.relay_id,
        round=n,
        neighbors_by_source=neighbors_by_source,
        provenance=tuple(provenance),
        payload=payload,
        window=window,
    )


def _combine_buffered(relay, buffers, n, d, probs, rng, window=None):
    counts = sample_source_counts(probs, d, rng, capacity=[buf.depth for buf in buffers])
    picks = []
    for buf, count in zip(buffers, counts):
        if count == 0:
            continue
        positions = buf.slot_positions(int(count), n, BufferSelection(relay.selection), rng)
        picks.append((buf.source_id, [buf.slots[p - 1] for p in positions]))
    return _build_symbol(relay, n, picks, window)


def _combine_distinct(relay, buffers, n, d, probs, rng, window=None):
    """At most one entry per buffer, sources drawn from probs without replacement"""
    nonzero = int(np.count_nonzero(probs))
    d = min(d, nonzero)
    chosen = sorted(int(i) for i in rng.choice(len(buffers), size=d, replace=False, p=probs / probs.sum()))
    picks = [(buffers[i].source_id, [buffers[i].slots[0]]) for i in chosen]
    return _build_symbol(relay, n, picks, window)


def combine_shift(relay: RelayConfig, buffers, rng, n: int = 0) -> RelayCodedSymbol:
    """
    Combine the newest entries of full FIFO buffers

    Raises:
        BuffersNotFull: If any buffer still has empty slots
    """
    _require_full(relay, buffers)
    d = relay.gamma.sample(rng)
    return _combine_buffered(relay, buffers, n, d, relay.q.array, rng)


def combine_slot(relay: RelayConfig, buffers, n: int, rng) -> RelayCodedSymbol:
    """
    Combine slot-buffer entries walking back from the slot of round n

    Raises:
        BuffersNotFull: If any buffer still has empty slots
    """
    _require_full(relay, buffers)
    d = relay.gamma.sample(rng)
    return _combine_buffered(relay, buffers, n, d, relay.q.array, rng)


def combine_one_bit(relay: RelayConfig, buffers, rng, n: int = 0) -> RelayCodedSymbol:
    _require_full(relay, buffers)
    d = relay.gamma.sample(rng)
    return _combine_distinct(relay, buffers, n, d, relay.q.array, rng)


def combine_conventional(relay: RelayConfig, received, rng, n: int = 0):
    """
    XOR d distinct current arrivals, sources chosen uniformly

    Args:
        relay: Relay configuration
        received: This round's arrival per source (symbol, None or ERASED)
        rng: Relay random stream
        n: Current round

    Returns:
        RelayCodedSymbol, or Stall when a selected symbol was erased under the
        stall policy (or nothing arrived at all)
    """
    S = len(received)
    d = min(relay.gamma.sample(rng), S)
    chosen = [int(i) for i in rng.choice(S, size=d, replace=False)]
    if not all(_arrived(received[i]) for i in chosen):
        if ErasurePolicy(relay.policy) is ErasurePolicy.STALL:
            return Stall(relay.relay_id, n)
        available = [i for i in range(S) if _arrived(received[i])]
        if not available:
            return Stall(relay.relay_id, n)
        chosen = [int(i) for i in rng.choice(available, size=min(d, len(available)), replace=False)]
    picks = [(received[i].source_id, [received[i]]) for i in sorted(chosen)]
    return _build_symbol(relay, n, picks)


def combine_expanding_window(relay: RelayConfig, buffers, rng, n: int = 0) -> RelayCodedSymbol:
    """
    Draw a window from theta, then combine within it using its own distribution

    Selection mass outside the window is dropped and q renormalized.

    Raises:
        WindowsNotConfigured: If the relay has no window spec
        BuffersNotFull: If any buffer still has empty slots
    """
    windows = relay.windows
    if windows is None:
        raise WindowsNotConfigured(f"Relay {relay.relay_id} has no expanding-window spec")
    _require_full(relay, buffers)
    window = windows.theta.sample(rng)
    d = windows.gammas[window - 1].sample(rng)
    probs = np.zeros(relay.num_sources)
    members = windows.sources_in(window)
    probs[members] = relay.q.array[members]
    if relay.buffer_mode is BufferMode.ONE_BIT:
        return _combine_distinct(relay, buffers, n, d, probs, rng, window)
    return _combine_buffered(relay, buffers, n, d, probs, rng, window)


class RelayNode:
    """
    A relay in a running network

    Buffered relays stay silent until the round after their buffers are first
    full; that round is recorded as `fill_round`.
    """

    def __init__(self, config: RelayConfig, source_ids, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.stalls = 0
        self.transmissions = 0
        self.first_transmission = None
        self._arrivals = []
        mode = config.buffer_mode
        if mode is None:
            self.buffers = []
            self.fill_round = 0
        else:
            self.buffers = [LinkBuffer(source_id, config.depth, mode) for source_id in source_ids]
            self.fill_round = None

    @property
    def relay_id(self) -> int:
        return self.config.relay_id

    def receive(self, n: int, arrivals):
        if not self.buffers:
            self._arrivals = list(arrivals)
            return
        for buf, symbol in zip(self.buffers, arrivals):
            buf.receive(symbol, n)
        if self.fill_round is None and all(buf.is_full for buf in self.buffers):
            self.fill_round = n

    def is_ready(self, n: int) -> bool:
        return self.fill_round is not None and n > self.fill_round

    def transmit(self, n: int):
        """
        Produce this round's relay symbol

        Returns:
            RelayCodedSymbol, Stall, or None while the buffers are still filling
        """
        if not self.is_ready(n):
            return None
        scheme = RelayScheme(self.config.scheme)
        if scheme is RelayScheme.CONVENTIONAL:
            out = combine_conventional(self.config, self._arrivals, self.rng, n)
        elif self.config.windows is not None:
            out = combine_expanding_window(self.config, self.buffers, self.rng, n)
        elif scheme is RelayScheme.SHIFT_BUFFER:
            out = combine_shift(self.config, self.buffers, self.rng, n)
        elif scheme is RelayScheme.SLOT_BUFFER:
            out = combine_slot(self.config, self.buffers, n, self.rng)
        else:
            out = combine_one_bit(self.config, self.buffers, self.rng, n)
        if isinstance(out, Stall):
            self.stalls += 1
        else:
            self.transmissions += 1
            if self.first_transmission is None:
                self.first_transmission = n
        return out
