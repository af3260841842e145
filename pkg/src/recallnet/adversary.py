"""Ranking and deletion of predictable edges.

Three selection criteria are provided:
  - max_weight: heaviest ties first (the best-established links);
  - composite: rank-sum of high betweenness and low weight, so structurally
    load-bearing but weakly reinforced edges come first;
  - staleness: longest-inactive edges first.

An attack removes the top-k edges sequentially and reports, per removal,
the weight lost and whether that single removal split a component --
the inputs to the attack success rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.sparse import csgraph, csr_matrix
from scipy.stats import rankdata

from .graph import WeightedGraph, _csr_arrays

MAX_WEIGHT = "max_weight"
COMPOSITE = "composite"
STALENESS = "staleness"
CRITERIA = (MAX_WEIGHT, COMPOSITE, STALENESS)


@dataclass
class AdversaryPolicy:
    criterion: str = MAX_WEIGHT
    fraction: float = 0.10
    k: int | None = None  # absolute override; fraction of current edges otherwise

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"adversary.criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"adversary.fraction must lie in [0, 1], got {self.fraction}")
        if self.k is not None and self.k < 0:
            raise ValueError(f"adversary.k must be nonnegative, got {self.k}")

    def batch_size(self, edge_count: int) -> int:
        if self.k is not None:
            return min(self.k, edge_count)
        return min(int(math.ceil(self.fraction * edge_count)), edge_count)


@dataclass
class EdgeRemoval:
    edge: tuple[int, int]
    weight_lost: float
    disconnected: bool  # removal raised the component count


@dataclass
class AttackReport:
    removals: list[EdgeRemoval]
    utility_before: float

    @property
    def attempted(self) -> int:
        return len(self.removals)

    @property
    def total_loss(self) -> float:
        return sum(r.weight_lost for r in self.removals)


@njit(cache=True)
def _brandes_edge_betweenness(indptr, indices, n):  # pragma: no cover - jitted
    eb = np.zeros((n, n))
    dist = np.empty(n, np.int64)
    sigma = np.empty(n, np.float64)
    delta = np.empty(n, np.float64)
    order = np.empty(n, np.int64)
    for s in range(n):
        dist[:] = -1
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head, tail = 0, 1
        while head < tail:
            v = order[head]
            head += 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        # dependency accumulation back toward s; predecessors of w are the
        # neighbors one BFS level closer to s
        for q in range(tail - 1, 0, -1):
            w = order[q]
            coeff = (1.0 + delta[w]) / sigma[w]
            for p in range(indptr[w], indptr[w + 1]):
                v = indices[p]
                if dist[v] == dist[w] - 1:
                    c = sigma[v] * coeff
                    eb[v, w] += c
                    eb[w, v] += c
                    delta[v] += c
    return eb


def edge_betweenness(g: WeightedGraph) -> np.ndarray:
    """Unweighted edge betweenness: sum over unordered node pairs {s, t} of the
    fraction of shortest s-t paths crossing each edge. Returns a symmetric
    (n, n) matrix, zero off the edge set. Brandes accumulation.
    """
    indptr, indices = _csr_arrays(g.adjacency)
    # accumulation counts each unordered pair from both endpoints
    return _brandes_edge_betweenness(indptr, indices, g.node_count) / 2.0


def select_top_k(g: WeightedGraph, policy: AdversaryPolicy, now: int) -> list[tuple[int, int]]:
    """The k most predictable edges under the policy's criterion, most first.

    Ties break toward the lexicographically smallest (i, j). Deterministic:
    no randomness is involved.
    """
    ii, jj = g.edge_arrays()
    m = ii.shape[0]
    if m == 0:
        return []
    k = policy.batch_size(m)
    if k == 0:
        return []
    if policy.criterion == MAX_WEIGHT:
        key = -g.weights[ii, jj]
    elif policy.criterion == STALENESS:
        key = -(now - g.last_active_matrix[ii, jj]).astype(np.float64)
    else:
        eb = edge_betweenness(g)[ii, jj]
        w = g.weights[ii, jj]
        rank_bt = rankdata(-eb, method="min")  # 1 = highest betweenness
        rank_lw = rankdata(w, method="min")  # 1 = lowest weight
        key = (rank_bt + rank_lw).astype(np.float64)
    order = np.lexsort((jj, ii, key))[:k]
    return [(int(ii[p]), int(jj[p])) for p in order]


def attack(g: WeightedGraph, policy: AdversaryPolicy, now: int) -> tuple[WeightedGraph, AttackReport]:
    """Remove the selected edges from g (mutating it) and account per removal.

    Each removal's weight loss and disconnection effect are measured against
    the graph state just before that removal, in batch order.
    """
    u_before = g.total_weight()
    targets = select_top_k(g, policy, now)
    if not targets:
        return g, AttackReport(removals=[], utility_before=u_before)

    ii = np.fromiter((e[0] for e in targets), dtype=np.int64, count=len(targets))
    jj = np.fromiter((e[1] for e in targets), dtype=np.int64, count=len(targets))
    losses = g.weights[ii, jj].tolist()
    g.remove_edges(targets)

    # Removal r disconnects iff its endpoints sit in different components of
    # the graph with removals r..k already gone. Seed a union-find with the
    # post-batch component labels and replay the batch in reverse instead of
    # re-running a component pass per removal.
    _, labels = csgraph.connected_components(csr_matrix(g.adjacency), directed=False)
    dsu = _DisjointSet(int(labels.max()) + 1)
    disconnected = [False] * len(targets)
    for r in range(len(targets) - 1, -1, -1):
        a, b = labels[ii[r]], labels[jj[r]]
        disconnected[r] = dsu.find(a) != dsu.find(b)
        dsu.union(a, b)

    removals = [
        EdgeRemoval(edge=e, weight_lost=L, disconnected=d)
        for e, L, d in zip(targets, losses, disconnected)
    ]
    return g, AttackReport(removals=removals, utility_before=u_before)


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
