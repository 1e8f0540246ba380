"""Destination decoding graph and peeling decoder"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from utils.errors import InvalidParameter, PayloadDisabled, UnknownScope

OVERALL = "overall"


def source_scope(source_id: int) -> str:
    return f"source:{source_id}"


def class_scope(class_index: int) -> str:
    return f"class:{class_index}"


def parse_scope(scope: str) -> tuple:
    """
    Split a scope string into (kind, index)

    Raises:
        UnknownScope: For anything other than `overall`, `source:<i>`, `class:<i>`
    """
    if scope == OVERALL:
        return (OVERALL, None)
    kind, _, index = str(scope).partition(":")
    if kind in ("source", "class") and index.isdigit():
        return (kind, int(index))
    raise UnknownScope(f"Unknown scope: {scope!r}")


@dataclass(frozen=True)
class DecodeReport:
    K: int
    unrecovered_by_source: dict
    source_sizes: dict
    unrecovered_by_class: dict = field(default_factory=dict)
    class_sizes: dict = field(default_factory=dict)
    unconnected_by_source: dict = field(default_factory=dict)
    unconnected_by_class: dict = field(default_factory=dict)
    iterations: int = 0
    received: int = 0

    @property
    def unrecovered(self) -> int:
        return sum(self.unrecovered_by_source.values())

    @property
    def overall_rate(self) -> float:
        return self.unrecovered / self.K

    def scopes(self) -> list:
        """Every scope this report can answer, overall first"""
        return (
            [OVERALL]
            + [source_scope(s) for s in sorted(self.source_sizes)]
            + [class_scope(c) for c in sorted(self.class_sizes)]
        )


def erasure_rate(report: DecodeReport, scope: str = OVERALL) -> float:
    """
    Fraction of unrecovered variables in `scope`

    Raises:
        UnknownScope: If the scope is malformed or not tracked by the report
    """
    kind, index = parse_scope(scope)
    if kind == OVERALL:
        return report.overall_rate
    unrecovered, sizes = (
        (report.unrecovered_by_source, report.source_sizes)
        if kind == "source"
        else (report.unrecovered_by_class, report.class_sizes)
    )
    if index not in sizes:
        raise UnknownScope(f"Scope {scope!r} is not tracked by this report")
    return unrecovered[index] / sizes[index]


class DecodingGraph:
    """
    Bipartite graph over K = sum K_i variables and the received checks

    Checks keep their residual degree and the sum of their unrecovered neighbor
    ids, so a degree-1 check names its last variable directly. Peeling is
    incremental: add checks, peel, add more, peel again.
    """

    def __init__(self, sources, importance=None, track_payload=False):
        """
        Args:
            sources: SourceConfig per source; offsets must tile 0..K-1
            importance: Optional {source_id: importance class} for class scopes
            track_payload: Reconstruct bit values alongside recovery
        """
        sources = sorted(sources, key=lambda cfg: cfg.offset)
        self.K = sum(cfg.block_length for cfg in sources)
        self.track_payload = track_payload
        self._var_source = np.empty(self.K, dtype=np.int64)
        self._var_class = np.zeros(self.K, dtype=np.int64)
        expected = 0
        for cfg in sources:
            if cfg.offset != expected:
                raise InvalidParameter(
                    f"Source {cfg.source_id} starts at global id {cfg.offset}, expected {expected}"
                )
            block = slice(cfg.offset, cfg.offset + cfg.block_length)
            self._var_source[block] = cfg.source_id
            if importance is not None:
                self._var_class[block] = importance[cfg.source_id]
            expected += cfg.block_length
        self.source_ids = [cfg.source_id for cfg in sources]
        self.classes = sorted(set(importance.values())) if importance else []

        self.recovered = np.zeros(self.K, dtype=bool)
        self.values = np.zeros(self.K, dtype=np.uint8)
        self._var_degree = np.zeros(self.K, dtype=np.int64)
        self._var_checks = [[] for _ in range(self.K)]
        self._residual = []
        self._id_sum = []
        self._check_value = []
        self._queue = deque()
        self.iterations = 0

    @property
    def received(self) -> int:
        return len(self._residual)

    def add_check(self, symbol) -> int:
        """Insert a received relay symbol; returns its residual degree"""
        return self.add_neighbors(symbol.neighbors, getattr(symbol, "payload", None))

    def add_neighbors(self, neighbors, payload=None) -> int:
        """
        Insert a check over global variable ids

        Edges to already-recovered variables are peeled on insertion.
        """
        check = len(self._residual)
        residual = 0
        id_sum = 0
        value = int(payload or 0)
        for v in {int(u) for u in neighbors}:
            if not 0 <= v < self.K:
                raise InvalidParameter(f"Variable id {v} outside 0..{self.K - 1}")
            self._var_degree[v] += 1
            if self.recovered[v]:
                value ^= int(self.values[v])
                continue
            residual += 1
            id_sum += v
            self._var_checks[v].append(check)
        self._residual.append(residual)
        self._id_sum.append(id_sum)
        self._check_value.append(value)
        if residual == 1:
            self._queue.append(check)
        return residual

    def peel(self, rng: np.random.Generator | None = None) -> DecodeReport:
        """
        Release degree-1 checks until none is left

        Args:
            rng: When given, degree-1 checks are taken in random order instead of FIFO
        """
        pending = self._queue if rng is None else list(self._queue)
        while pending:
            if rng is None:
                check = pending.popleft()
            else:
                pick = int(rng.integers(len(pending)))
                pending[pick], pending[-1] = pending[-1], pending[pick]
                check = pending.pop()
            if self._residual[check] != 1:
                continue
            v = self._id_sum[check]
            self.recovered[v] = True
            self.values[v] = self._check_value[check]
            self.iterations += 1
            for other in self._var_checks[v]:
                self._residual[other] -= 1
                self._id_sum[other] -= v
                self._check_value[other] ^= int(self.values[v])
                if self._residual[other] == 1:
                    pending.append(other)
            self._var_checks[v] = []
        if rng is not None:
            self._queue.clear()
        return self.report()

    def recovered_set(self) -> frozenset:
        return frozenset(int(v) for v in np.flatnonzero(self.recovered))

    def unconnected_count(self, scope: str = OVERALL) -> int:
        """Variables of `scope` with no edge in the decoding graph"""
        return int((self._mask(scope) & (self._var_degree == 0)).sum())

    def report(self) -> DecodeReport:
        unrecovered = ~self.recovered
        unconnected = self._var_degree == 0
        by_source = {}
        sizes = {}
        unconnected_by_source = {}
        for source_id in self.source_ids:
            mask = self._var_source == source_id
            sizes[source_id] = int(mask.sum())
            by_source[source_id] = int((mask & unrecovered).sum())
            unconnected_by_source[source_id] = int((mask & unconnected).sum())
        by_class = {}
        class_sizes = {}
        unconnected_by_class = {}
        for class_index in self.classes:
            mask = self._var_class == class_index
            class_sizes[class_index] = int(mask.sum())
            by_class[class_index] = int((mask & unrecovered).sum())
            unconnected_by_class[class_index] = int((mask & unconnected).sum())
        return DecodeReport(
            K=self.K,
            unrecovered_by_source=by_source,
            source_sizes=sizes,
            unrecovered_by_class=by_class,
            class_sizes=class_sizes,
            unconnected_by_source=unconnected_by_source,
            unconnected_by_class=unconnected_by_class,
            iterations=self.iterations,
            received=self.received,
        )

    def _mask(self, scope):
        kind, index = parse_scope(scope)
        if kind == OVERALL:
            return np.ones(self.K, dtype=bool)
        if kind == "source" and index in self.source_ids:
            return self._var_source == index
        if kind == "class" and index in self.classes:
            return self._var_class == index
        raise UnknownScope(f"Scope {scope!r} is not tracked by this graph")


def verify_payload(graph: DecodingGraph, truth) -> bool:
    """
    Check every recovered variable against the true bits

    Args:
        graph: A graph built with track_payload=True
        truth: Bits indexed by global id, or {source_id: bits} in offset order

    Raises:
        PayloadDisabled: If the graph does not track payloads
    """
    if not graph.track_payload:
        raise PayloadDisabled("Graph was built without payload tracking")
    if isinstance(truth, dict):
        truth = np.concatenate([np.asarray(truth[s], dtype=np.uint8) for s in graph.source_ids])
    truth = np.asarray(truth, dtype=np.uint8)
    mask = graph.recovered
    return bool(np.array_equal(graph.values[mask], truth[mask]))
