import numpy as np
import pytest

from codes.decoder import (
    OVERALL,
    DecodingGraph,
    class_scope,
    erasure_rate,
    parse_scope,
    source_scope,
    verify_payload,
)
from codes.dist import point_mass
from codes.source import SourceConfig
from utils.errors import InvalidParameter, PayloadDisabled, UnknownScope


def block(source_id, K, offset):
    return SourceConfig(source_id, K, 1, point_mass(1), offset)


def gf2_rank(rows, K):
    matrix = np.zeros((len(rows), K), dtype=np.uint8)
    for r, row in enumerate(rows):
        matrix[r, list(row)] = 1
    rank = 0
    for col in range(K):
        pivots = np.flatnonzero(matrix[rank:, col]) + rank
        if pivots.size == 0:
            continue
        matrix[[rank, pivots[0]]] = matrix[[pivots[0], rank]]
        for r in np.flatnonzero(matrix[:, col]):
            if r != rank:
                matrix[r] ^= matrix[rank]
        rank += 1
        if rank == len(rows):
            break
    return rank


def random_checks(rng, K, count, max_degree=3):
    checks = []
    for _ in range(count):
        degree = int(rng.integers(1, max_degree + 1))
        checks.append(frozenset(int(v) for v in rng.choice(K, size=degree, replace=False)))
    return checks


def test_scopes():
    assert parse_scope(OVERALL) == (OVERALL, None)
    assert parse_scope(source_scope(3)) == ("source", 3)
    assert parse_scope(class_scope(2)) == ("class", 2)
    with pytest.raises(UnknownScope):
        parse_scope("relay:1")


def test_chain_peels_completely():
    graph = DecodingGraph([block(1, 3, 0)])
    for check in ({0}, {0, 1}, {1, 2}):
        graph.add_neighbors(check)
    report = graph.peel()
    assert report.unrecovered == 0
    assert report.iterations == 3
    assert erasure_rate(report) == 0.0


def test_stopping_set_stays_unrecovered():
    graph = DecodingGraph([block(1, 3, 0)])
    graph.add_neighbors({0, 1})
    graph.add_neighbors({1, 2})
    report = graph.peel()
    assert report.unrecovered == 3
    assert report.received == 2


def test_incremental_peeling():
    graph = DecodingGraph([block(1, 4, 0)])
    graph.add_neighbors({0, 1})
    assert graph.peel().unrecovered == 4
    # a check over a recovered variable is reduced on insertion
    graph.add_neighbors({1})
    assert graph.peel().unrecovered == 2
    assert graph.add_neighbors({0, 2}) == 1
    assert graph.peel().unrecovered == 1


def test_duplicate_neighbors_are_merged():
    graph = DecodingGraph([block(1, 2, 0)])
    assert graph.add_neighbors([1, 1]) == 1
    assert graph.peel().unrecovered == 1


def test_peeled_variables_are_gf2_recoverable(rng):
    # recoverable by elimination <=> the unit vector e_v lies in the row space
    for _ in range(200):
        K = int(rng.integers(2, 17))
        checks = random_checks(rng, K, int(rng.integers(1, 2 * K + 1)), max_degree=min(K, 4))
        rank = gf2_rank(checks, K)
        recoverable = {v for v in range(K) if gf2_rank(checks + [frozenset({v})], K) == rank}

        outcomes = []
        for order in [None, *(np.random.default_rng(seed) for seed in rng.integers(0, 2**32, size=4))]:
            graph = DecodingGraph([block(1, K, 0)])
            for check in checks:
                graph.add_neighbors(check)
            graph.peel(order)
            outcomes.append(graph.recovered_set())
        assert outcomes[0] <= recoverable
        assert all(outcome == outcomes[0] for outcome in outcomes)


def test_payload_reconstruction(rng):
    K = 50
    bits = rng.integers(0, 2, size=K, dtype=np.uint8)
    graph = DecodingGraph([block(1, 20, 0), block(2, 30, 20)], track_payload=True)
    for check in random_checks(rng, K, 120):
        payload = int(np.bitwise_xor.reduce(bits[list(check)]))
        graph.add_neighbors(check, payload)
    graph.peel()
    assert graph.recovered.any()
    assert verify_payload(graph, bits)
    assert verify_payload(graph, {1: bits[:20], 2: bits[20:]})


def test_payload_disabled():
    graph = DecodingGraph([block(1, 2, 0)])
    with pytest.raises(PayloadDisabled):
        verify_payload(graph, np.zeros(2, dtype=np.uint8))


def test_offsets_must_tile():
    with pytest.raises(InvalidParameter):
        DecodingGraph([block(1, 10, 0), block(2, 10, 12)])
    graph = DecodingGraph([block(1, 2, 0)])
    with pytest.raises(InvalidParameter):
        graph.add_neighbors({5})


def test_per_source_and_class_rates():
    graph = DecodingGraph([block(1, 2, 0), block(2, 4, 2)], importance={1: 1, 2: 2})
    graph.add_neighbors({0})
    graph.add_neighbors({1})
    graph.add_neighbors({2})
    report = graph.peel()
    assert report.scopes() == [OVERALL, "source:1", "source:2", "class:1", "class:2"]
    assert erasure_rate(report, "source:1") == 0.0
    assert erasure_rate(report, "source:2") == pytest.approx(0.75)
    assert erasure_rate(report, "class:2") == pytest.approx(0.75)
    assert erasure_rate(report) == pytest.approx(0.5)
    assert report.unconnected_by_source == {1: 0, 2: 3}
    assert graph.unconnected_count("class:2") == 3
    with pytest.raises(UnknownScope):
        erasure_rate(report, "source:9")
