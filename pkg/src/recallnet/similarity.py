"""Pairwise structural similarity from graph state.

Three metrics are supported:
  - cosine: angle between the weighted adjacency rows of the two nodes,
    so it sees tie strength, not just structure;
  - jaccard: overlap of the unweighted neighbor sets;
  - baseline: normalized degree product, blind to who the neighbors are.

All three are symmetric, take values in [0, 1], and give 0 for isolated
nodes. The self-similarity diagonal is fixed at 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph

COSINE = "cosine"
JACCARD = "jaccard"
BASELINE = "baseline"
METRICS = (COSINE, JACCARD, BASELINE)


@dataclass
class SimilarityMatrix:
    metric: str
    values: np.ndarray  # (n, n) symmetric, zero diagonal, entries in [0, 1]

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def upper_values(self) -> np.ndarray:
        """Off-diagonal upper-triangle entries in ascending (i, j) order."""
        iu = np.triu_indices(self.n, k=1)
        return self.values[iu]


def normalize_metric(name: str) -> str:
    key = name.strip().lower()
    if key not in METRICS:
        raise ValueError(f"similarity metric must be one of {METRICS}, got {name!r}")
    return key


def cosine_similarity(g: WeightedGraph, i: int, j: int) -> float:
    """Cosine of the weighted adjacency rows of i and j (0 for zero rows)."""
    _check_pair(g, i, j)
    wi = g.weights[i]
    wj = g.weights[j]
    ni = float(np.sqrt(np.dot(wi, wi)))
    nj = float(np.sqrt(np.dot(wj, wj)))
    if ni == 0.0 or nj == 0.0:
        return 0.0
    return float(min(1.0, max(0.0, np.dot(wi, wj) / (ni * nj))))


def jaccard_similarity(g: WeightedGraph, i: int, j: int) -> float:
    """|Nbr(i) & Nbr(j)| / |Nbr(i) | Nbr(j)|; 0 when the union is empty."""
    _check_pair(g, i, j)
    ni = set(g.neighbors(i))
    nj = set(g.neighbors(j))
    union = len(ni | nj)
    if union == 0:
        return 0.0
    return len(ni & nj) / union


def baseline_similarity(g: WeightedGraph, i: int, j: int) -> float:
    """deg(i) * deg(j) / (n - 1)^2 -- a structure-blind degree product."""
    _check_pair(g, i, j)
    n = g.node_count
    return g.degree(i) * g.degree(j) / float((n - 1) ** 2)


def similarity_matrix(g: WeightedGraph, metric: str) -> SimilarityMatrix:
    """Evaluate the chosen metric for every node pair at once."""
    metric = normalize_metric(metric)
    n = g.node_count
    if metric == COSINE:
        w = g.weights
        dots = w @ w
        norms = np.sqrt(np.einsum("ij,ij->i", w, w))
        den = np.outer(norms, norms)
        with np.errstate(invalid="ignore", divide="ignore"):
            values = np.where(den > 0.0, dots / den, 0.0)
    elif metric == JACCARD:
        a = g.adjacency.astype(np.float64)
        common = a @ a
        deg = a.sum(axis=1)
        union = deg[:, None] + deg[None, :] - common
        with np.errstate(invalid="ignore", divide="ignore"):
            values = np.where(union > 0.0, common / union, 0.0)
    else:
        deg = g.degrees().astype(np.float64)
        values = np.outer(deg, deg) / float((n - 1) ** 2)
    np.fill_diagonal(values, 0.0)
    np.clip(values, 0.0, 1.0, out=values)
    return SimilarityMatrix(metric=metric, values=values)


def _check_pair(g: WeightedGraph, i: int, j: int) -> None:
    if i == j:
        raise ValueError("similarity of a node with itself is not defined")
    if not (0 <= i < g.node_count and 0 <= j < g.node_count):
        raise ValueError(f"node pair ({i}, {j}) out of range")
