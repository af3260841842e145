"""Seeded construction of the three synthetic topologies.

All generators return unit-weight graphs with every last-active time at 0,
so the initial total weight equals the edge count. The RNG is counter-based
(Philox) so that a given seed yields a bit-identical graph on any platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .graph import WeightedGraph

SPARSE_ER = "sparse_er"
CONVEX = "convex"
MODULAR_SBM = "modular_sbm"
TOPOLOGY_KINDS = (SPARSE_ER, CONVEX, MODULAR_SBM)


@dataclass
class TopologySpec:
    kind: str = SPARSE_ER
    n: int = 200
    er_p: float = 0.02
    sbm_blocks: int = 4
    sbm_p_in: float = 0.25
    sbm_p_out: float = 0.01
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in TOPOLOGY_KINDS:
            raise ValueError(f"topology.kind must be one of {TOPOLOGY_KINDS}, got {self.kind!r}")
        if self.n < 2:
            raise ValueError(f"topology.n must be at least 2, got {self.n}")
        for name, p in (("topology.er_p", self.er_p),
                        ("topology.sbm_p_in", self.sbm_p_in),
                        ("topology.sbm_p_out", self.sbm_p_out)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.kind == MODULAR_SBM:
            if self.sbm_blocks < 1:
                raise ValueError(f"topology.sbm_blocks must be positive, got {self.sbm_blocks}")
            if self.n % self.sbm_blocks != 0:
                raise ValueError(
                    f"topology.n ({self.n}) must be divisible by sbm_blocks ({self.sbm_blocks})")


def rng_from_seed(seed: int) -> Generator:
    return Generator(Philox(SeedSequence(seed)))


def generate(spec: TopologySpec, rng: Generator | None = None) -> WeightedGraph:
    """Sample a graph for the spec; weights start at 1.0, last_active at 0."""
    spec.validate()
    if rng is None:
        rng = rng_from_seed(spec.seed)
    n = spec.n

    if spec.kind == CONVEX:
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    elif spec.kind == SPARSE_ER:
        draws = rng.random((n, n))
        upper = np.triu(draws < spec.er_p, k=1)
    else:
        block = np.arange(n) // (n // spec.sbm_blocks)
        same = block[:, None] == block[None, :]
        probs = np.where(same, spec.sbm_p_in, spec.sbm_p_out)
        draws = rng.random((n, n))
        upper = np.triu(draws < probs, k=1)

    weights = np.where(upper, 1.0, 0.0)
    times = np.zeros((n, n), dtype=np.int64)
    return WeightedGraph.from_arrays(upper, weights, times)
