from functools import reduce
from operator import xor

import pytest

from codes.dist import point_mass
from codes.source import (
    UNPARTITIONED,
    SourceConfig,
    class_of_round,
    encode_conventional,
    encode_round,
    information_bits,
)
from utils.errors import DegreeExceedsClass, InvalidParameter


def test_block_must_split_into_classes(rsd):
    with pytest.raises(InvalidParameter):
        SourceConfig(1, 10, 4, rsd)


def test_class_of_round():
    assert [class_of_round(n, 4) for n in range(1, 10)] == [1, 2, 3, 4, 1, 2, 3, 4, 1]
    with pytest.raises(InvalidParameter):
        class_of_round(0, 4)


def test_neighbors_stay_in_round_class(rsd, rng):
    cfg = SourceConfig(1, 40, 4, rsd)
    for n in range(1, 25):
        symbol = encode_round(cfg, n, rng)
        assert symbol.class_index == class_of_round(n, 4)
        assert symbol.neighbors <= set(cfg.class_range(symbol.class_index))
        assert 1 <= symbol.degree <= cfg.class_size


def test_consecutive_rounds_are_disjoint(rsd, rng):
    cfg = SourceConfig(1, 40, 4, rsd)
    window = [encode_round(cfg, n, rng) for n in range(5, 9)]
    for i, a in enumerate(window):
        for b in window[i + 1:]:
            assert not a.neighbors & b.neighbors


def test_degree_clamped_to_class(rng):
    cfg = SourceConfig(1, 8, 4, point_mass(5))
    assert encode_round(cfg, 1, rng).degree == 2
    strict = SourceConfig(1, 8, 4, point_mass(5), clamp_degree=False)
    with pytest.raises(DegreeExceedsClass):
        encode_round(strict, 1, rng)


def test_payload_is_xor_of_neighbors(rsd, rng):
    cfg = SourceConfig(2, 40, 4, rsd, offset=100)
    bits = information_bits(cfg, rng)
    assert len(bits) == 40
    symbol = encode_round(cfg, 3, rng, bits)
    assert symbol.payload == reduce(xor, (int(bits[v]) for v in symbol.neighbors), 0)
    assert symbol.global_neighbors == frozenset(v + 100 for v in symbol.neighbors)


def test_conventional_encoder(rsd, rng):
    cfg = SourceConfig(1, 40, 4, rsd)
    symbol = encode_conventional(cfg, rng, n=7)
    assert symbol.class_index == UNPARTITIONED
    assert symbol.round == 7
    assert symbol.neighbors <= set(range(40))
