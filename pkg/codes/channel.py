"""Memoryless erasure links and seeded random streams"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from utils.errors import InvalidParameter

DESTINATION = "destination"

# Stable integer codes for node kinds, used when deriving per-link seeds
_NODE_KIND_CODES = {"source": 1, "relay": 2, "destination": 3}


class Erasure(Enum):
    ERASED = "erased"


ERASED = Erasure.ERASED


def source_node(index: int) -> str:
    return f"source:{index}"


def relay_node(index: int) -> str:
    return f"relay:{index}"


def node_key(node_id: str) -> tuple:
    """Map a node id such as `relay:2` to integers usable as seed material"""
    kind, _, index = node_id.partition(":")
    if kind not in _NODE_KIND_CODES:
        raise InvalidParameter(f"Unknown node id: {node_id}")
    return (_NODE_KIND_CODES[kind], int(index) if index else 0)


def stream_for(master_seed: int, *key) -> np.random.Generator:
    """
    Independent random stream derived from (master seed, key)

    The same key always yields the same stream, whatever order streams are
    created in.
    """
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *[int(k) for k in key]]))


@dataclass
class ErasureLink:
    """BEC link between two nodes; owns its random stream"""

    from_node: str
    to_node: str
    delta: float
    rng: np.random.Generator = field(repr=False)

    def __post_init__(self):
        if not 0.0 <= self.delta <= 1.0:
            raise InvalidParameter(
                f"Erasure probability for {self.from_node}->{self.to_node} must lie in [0, 1], got {self.delta}"
            )

    @classmethod
    def seeded(cls, from_node: str, to_node: str, delta: float, master_seed: int) -> ErasureLink:
        rng = stream_for(master_seed, *node_key(from_node), *node_key(to_node))
        return cls(from_node, to_node, delta, rng)

    def transmit(self, symbol):
        """Deliver `symbol` unchanged with probability 1 - delta, else ERASED"""
        if self.rng.random() < self.delta:
            return ERASED
        return symbol
