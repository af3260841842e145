"""Probabilistic similarity-gated edge formation.

Non-adjacent pairs whose current similarity is strictly above a threshold
become candidates; each candidate independently forms an edge with
probability rho, with the similarity value as the starting weight.
Candidates are visited in ascending (i, j) order and consume exactly one
RNG draw each, so a fixed seed reproduces the same graph bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .graph import WeightedGraph
from .similarity import SimilarityMatrix

FIXED = "fixed"
PERCENTILE75 = "percentile75"
THETA_RULES = (FIXED, PERCENTILE75)

ALL_NON_EDGES = "all_non_edges"
TOP_M_PER_NODE = "top_m_per_node"
CANDIDATE_RULES = (ALL_NON_EDGES, TOP_M_PER_NODE)


@dataclass
class ReconnectPolicy:
    rho: float = 0.1
    theta: float = 0.5
    theta_rule: str = PERCENTILE75
    candidate_rule: str = ALL_NON_EDGES
    m: int = 5  # per-node candidate budget for top_m_per_node

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"reconnect.rho must lie in [0, 1], got {self.rho}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"reconnect.theta must lie in [0, 1], got {self.theta}")
        if self.theta_rule not in THETA_RULES:
            raise ValueError(f"reconnect.theta_rule must be one of {THETA_RULES}, got {self.theta_rule!r}")
        if self.candidate_rule not in CANDIDATE_RULES:
            raise ValueError(
                f"reconnect.candidate_rule must be one of {CANDIDATE_RULES}, got {self.candidate_rule!r}")
        if self.m < 1:
            raise ValueError(f"reconnect.m must be positive, got {self.m}")


def compute_threshold(x0: SimilarityMatrix, policy: ReconnectPolicy) -> float:
    """Similarity gate derived from the initial matrix.

    percentile75 takes the nearest-rank 75th percentile of the off-diagonal
    upper-triangle values; fixed returns the configured theta unchanged.
    """
    if policy.theta_rule == FIXED:
        return policy.theta
    values = x0.upper_values()
    if values.size == 0:
        raise ValueError("cannot take a percentile of an empty similarity matrix")
    ordered = np.sort(values)
    rank = int(math.ceil(0.75 * ordered.size))  # nearest-rank, 1-based
    return float(ordered[rank - 1])


def candidate_pairs(g: WeightedGraph, x: SimilarityMatrix, policy: ReconnectPolicy,
                    threshold: float) -> tuple[np.ndarray, np.ndarray]:
    """Qualifying non-edges (sim strictly above threshold) in ascending (i, j) order."""
    gated = (x.values > threshold) & ~g.adjacency
    if policy.candidate_rule == TOP_M_PER_NODE:
        chosen = np.zeros_like(gated)
        sims = np.where(~g.adjacency, x.values, -1.0)
        np.fill_diagonal(sims, -1.0)
        m = min(policy.m, g.node_count - 1)
        # argsort ascending; the last m columns are each row's most similar non-neighbors
        top = np.argsort(sims, axis=1, kind="stable")[:, -m:]
        rows = np.repeat(np.arange(g.node_count), m)
        chosen[rows, top.ravel()] = True
        gated &= chosen | chosen.T
    mask = np.triu(gated, k=1)
    ii, jj = np.nonzero(mask)
    return ii, jj


def reconnect(g: WeightedGraph, x: SimilarityMatrix, policy: ReconnectPolicy,
              threshold: float, rng: Generator, now: int) -> WeightedGraph:
    """Add each qualifying candidate with probability rho; weight = similarity.

    Existing edges are never touched. One uniform draw is consumed per
    qualifying candidate even for those not added. Mutates and returns g.
    """
    ii, jj = candidate_pairs(g, x, policy, threshold)
    if ii.size == 0:
        return g
    draws = rng.random(ii.size)
    take = draws < policy.rho
    if np.any(take):
        g.add_edges(ii[take], jj[take], x.values[ii[take], jj[take]], now)
    return g
