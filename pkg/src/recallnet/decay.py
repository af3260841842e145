"""Memory-decay kernels and recall-weighted similarity.

The retention factor delta is the weight an interaction keeps after one
time unit; the equivalent rate is -ln(delta), so the kernel is both
delta**dt and exp(-rate*dt). delta=1 (or family "none") is perfect recall,
delta=0 immediate forgetting. Optional per-node retention overrides let
some agents forget faster; an edge decays at the faster of its endpoints'
rates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import WeightedGraph

EXPONENTIAL = "exponential"
NONE = "none"
DECAY_FAMILIES = (EXPONENTIAL, NONE)

# Edges whose weight falls below this are dropped from the edge set.
PRUNE_EPSILON = 1e-6


@dataclass
class DecaySpec:
    family: str = EXPONENTIAL
    delta: float = 0.8
    node_overrides: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in DECAY_FAMILIES:
            raise ValueError(f"decay.family must be one of {DECAY_FAMILIES}, got {self.family!r}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"decay.delta must lie in [0, 1], got {self.delta}")
        for node, d in self.node_overrides.items():
            if not 0.0 <= d <= 1.0:
                raise ValueError(f"decay override for node {node} must lie in [0, 1], got {d}")

    @property
    def rate(self) -> float:
        """Decay rate -ln(delta); 0 for perfect recall, inf for delta=0."""
        if self.family == NONE or self.delta == 1.0:
            return 0.0
        if self.delta == 0.0:
            return math.inf
        return -math.log(self.delta)

    def delta_for(self, node: int) -> float:
        if self.family == NONE:
            return 1.0
        return self.node_overrides.get(node, self.delta)

    def pairwise_deltas(self, n: int) -> np.ndarray:
        """(n, n) matrix of effective per-edge retention: min of endpoint deltas."""
        if self.family == NONE:
            return np.ones((n, n))
        per_node = np.full(n, self.delta)
        for node, d in self.node_overrides.items():
            if 0 <= node < n:
                per_node[node] = d
        return np.minimum(per_node[:, None], per_node[None, :])


def decay_factor(spec: DecaySpec, dt: float) -> float:
    """Retention after dt time units: delta**dt (1.0 when dt=0 or family none)."""
    if dt < 0:
        raise ValueError(f"elapsed time must be nonnegative, got {dt}")
    if spec.family == NONE or dt == 0:
        return 1.0
    return spec.delta ** dt


def apply_decay(g: WeightedGraph, spec: DecaySpec, now: int) -> WeightedGraph:
    """Decay every edge by its age: weight *= delta_eff**(now - last_active).

    Last-active times are untouched -- decaying is not an interaction.
    The graph is mutated in place and returned.
    """
    if g.edge_count == 0 or spec.family == NONE:
        return g
    ages = now - g.last_active_matrix
    if np.any(ages[g.adjacency] < 0):
        raise ValueError(f"graph has edges newer than now={now}")
    deltas = spec.pairwise_deltas(g.node_count)
    with np.errstate(invalid="ignore"):
        factors = deltas ** ages
    # 0**0 -> 1 keeps fresh edges intact even under total forgetting
    factors = np.where(ages == 0, 1.0, factors)
    g.scale_weights(factors)
    return g


def decay_one_step(g: WeightedGraph, spec: DecaySpec) -> WeightedGraph:
    """Apply one time unit of decay to every edge (the per-cycle engine form).

    Repeating this T times multiplies an untouched edge by delta**T, exactly
    matching apply_decay over the same span.
    """
    if g.edge_count == 0 or spec.family == NONE:
        return g
    if spec.node_overrides:
        g.scale_weights(spec.pairwise_deltas(g.node_count))
    else:
        g.scale_weights(spec.delta)
    return g


def recall_modulated_similarity(x: float, spec: DecaySpec, t_i: float, t_k: float) -> float:
    """Similarity discounted by the recall kernel over elapsed time |t_i - t_k|."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"similarity must lie in [0, 1], got {x}")
    return x * decay_factor(spec, abs(t_i - t_k))
