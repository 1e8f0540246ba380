"""LT encoding at the sources

Two encoders: the class-partitioned encoder, which draws round n's neighbors
from class mod(n-1, D)+1 only so that D consecutive symbols never share bits,
and the unrestricted conventional encoder.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from operator import xor

import numpy as np

from codes.dist import DegreeDistribution
from utils.errors import DegreeExceedsClass, InvalidParameter

# class_index of symbols drawn from the whole block
UNPARTITIONED = 0


@dataclass(frozen=True)
class SourceConfig:
    """
    One source's block and encoding parameters

    Class l owns the contiguous local ids [(l-1)*xi, l*xi), xi = K_i / D.
    """

    source_id: int
    block_length: int
    depth: int
    omega: DegreeDistribution
    offset: int = 0
    clamp_degree: bool = True

    def __post_init__(self):
        if self.source_id < 1:
            raise InvalidParameter(f"source_id must be >= 1, got {self.source_id}")
        if self.depth < 1:
            raise InvalidParameter(f"Depth D must be >= 1, got {self.depth}")
        if self.block_length < 1:
            raise InvalidParameter(f"Block length must be >= 1, got {self.block_length}")
        if self.block_length % self.depth != 0:
            raise InvalidParameter(
                f"Block length {self.block_length} of source {self.source_id} is not divisible by D={self.depth}"
            )

    @property
    def class_size(self) -> int:
        return self.block_length // self.depth

    def class_range(self, class_index: int) -> range:
        start = (class_index - 1) * self.class_size
        return range(start, start + self.class_size)


@dataclass(frozen=True)
class SourceCodedSymbol:
    source_id: int
    round: int
    class_index: int
    neighbors: frozenset
    offset: int = 0
    payload: int | None = None

    @property
    def degree(self) -> int:
        return len(self.neighbors)

    @property
    def global_neighbors(self) -> frozenset:
        if self.offset == 0:
            return self.neighbors
        return frozenset(self.offset + v for v in self.neighbors)


def class_of_round(n: int, depth: int) -> int:
    """Class used in round n: mod(n-1, D) + 1"""
    if n < 1 or depth < 1:
        raise InvalidParameter(f"Round and depth must be >= 1, got n={n}, D={depth}")
    return (n - 1) % depth + 1


def information_bits(cfg: SourceConfig, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random information bits for payload tracking"""
    return rng.integers(0, 2, size=cfg.block_length, dtype=np.uint8)


def encode_round(cfg: SourceConfig, n: int, rng: np.random.Generator, bits=None) -> SourceCodedSymbol:
    """
    Encode the round-n symbol from class mod(n-1, D)+1

    Args:
        cfg: Source configuration
        n: Transmission round (1-based)
        rng: The source's random stream
        bits: Optional information bits; when given the payload is their XOR

    Returns:
        SourceCodedSymbol whose neighbors lie inside the round's class

    Raises:
        DegreeExceedsClass: If the sampled degree exceeds the class size and clamping is off
    """
    class_index = class_of_round(n, cfg.depth)
    degree = cfg.omega.sample(rng)
    if degree > cfg.class_size:
        if not cfg.clamp_degree:
            raise DegreeExceedsClass(
                f"Degree {degree} exceeds class size {cfg.class_size} of source {cfg.source_id}"
            )
        degree = cfg.class_size
    start = (class_index - 1) * cfg.class_size
    picks = rng.choice(cfg.class_size, size=degree, replace=False) + start
    return _symbol(cfg, n, class_index, picks, bits)


def encode_conventional(cfg: SourceConfig, rng: np.random.Generator, n: int = 0, bits=None) -> SourceCodedSymbol:
    """Plain LT encoding over all K_i bits; class_index is UNPARTITIONED"""
    degree = min(cfg.omega.sample(rng), cfg.block_length)
    picks = rng.choice(cfg.block_length, size=degree, replace=False)
    return _symbol(cfg, n, UNPARTITIONED, picks, bits)


def _symbol(cfg, n, class_index, picks, bits):
    neighbors = frozenset(int(v) for v in picks)
    payload = None
    if bits is not None:
        payload = reduce(xor, (int(bits[v]) for v in neighbors), 0)
    return SourceCodedSymbol(
        source_id=cfg.source_id,
        round=n,
        class_index=class_index,
        neighbors=neighbors,
        offset=cfg.offset,
        payload=payload,
    )
