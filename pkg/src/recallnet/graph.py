"""Weighted undirected graph with per-edge interaction timestamps.

The graph is the mutable state of a simulation run: every edge carries a
nonnegative tie strength and the time step at which it was created or last
reinforced. Storage is dense (numpy matrices), which keeps every bulk
operation -- decay, attack scoring, reconnection scans -- vectorizable for
the node counts this simulator targets (hundreds to low thousands).
"""

from __future__ import annotations

from typing import Iterator

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse import csgraph


class WeightedGraph:
    """Undirected weighted graph over nodes 0..node_count-1.

    Invariants maintained by every mutator:
      - no self-loops; each edge stored onceregardless of endpoint order
        (internally mirrored into both triangles);
      - weight >= 0 and a last-active time exist exactly for present edges.
    """

    def __init__(self, node_count: int):
        if node_count < 1:
            raise ValueError(f"node_count must be positive, got {node_count}")
        self.node_count = int(node_count)
        n = self.node_count
        self._adj = np.zeros((n, n), dtype=bool)
        self._w = np.zeros((n, n), dtype=np.float64)
        self._t = np.zeros((n, n), dtype=np.int64)
        self._upper = np.triu(np.ones((n, n), dtype=bool), k=1)

    # -- construction ------------------------------------------------------

    @classmethod
    def from_arrays(cls, adj: np.ndarray, weights: np.ndarray, last_active: np.ndarray) -> "WeightedGraph":
        """Build a graph from dense matrices (upper triangle is authoritative)."""
        n = adj.shape[0]
        g = cls(n)
        upper = np.triu(adj, k=1).astype(bool)
        g._adj = upper | upper.T
        g._w = np.where(g._adj, np.triu(weights, k=1) + np.triu(weights, k=1).T, 0.0)
        g._t = np.where(g._adj, np.triu(last_active, k=1) + np.triu(last_active, k=1).T, 0)
        if np.any(g._w < 0):
            raise ValueError("edge weights must be nonnegative")
        return g

    def copy(self) -> "WeightedGraph":
        g = WeightedGraph(self.node_count)
        g._adj = self._adj.copy()
        g._w = self._w.copy()
        g._t = self._t.copy()
        g._upper = self._upper  # never mutated, safe to share
        return g

    # -- validation helpers ------------------------------------------------

    def _check_pair(self, i: int, j: int) -> tuple[int, int]:
        if i == j:
            raise ValueError(f"self-loop ({i}, {j}) not allowed")
        if not (0 <= i < self.node_count and 0 <= j < self.node_count):
            raise ValueError(f"node pair ({i}, {j}) out of range for {self.node_count} nodes")
        return (i, j) if i < j else (j, i)

    # -- single-edge operations --------------------------------------------

    def add_edge(self, i: int, j: int, weight: float, t: int) -> None:
        """Insert or refresh edge (i, j). Re-adding overwrites weight and time."""
        i, j = self._check_pair(i, j)
        if weight < 0:
            raise ValueError(f"edge weight must be nonnegative, got {weight}")
        if t < 0:
            raise ValueError(f"last-active time must be nonnegative, got {t}")
        self._adj[i, j] = self._adj[j, i] = True
        self._w[i, j] = self._w[j, i] = weight
        self._t[i, j] = self._t[j, i] = t

    def remove_edge(self, i: int, j: int) -> None:
        i, j = self._check_pair(i, j)
        if not self._adj[i, j]:
            raise ValueError(f"edge ({i}, {j}) not present")
        self._adj[i, j] = self._adj[j, i] = False
        self._w[i, j] = self._w[j, i] = 0.0
        self._t[i, j] = self._t[j, i] = 0

    def has_edge(self, i: int, j: int) -> bool:
        i, j = self._check_pair(i, j)
        return bool(self._adj[i, j])

    def weight(self, i: int, j: int) -> float:
        i, j = self._check_pair(i, j)
        if not self._adj[i, j]:
            raise ValueError(f"edge ({i}, {j}) not present")
        return float(self._w[i, j])

    def last_active(self, i: int, j: int) -> int:
        i, j = self._check_pair(i, j)
        if not self._adj[i, j]:
            raise ValueError(f"edge ({i}, {j}) not present")
        return int(self._t[i, j])

    # -- bulk accessors ------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return int(self._adj.sum()) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges as (i, j) pairs with i < j, in ascending order."""
        ii, jj = self.edge_arrays()
        return zip(ii.tolist(), jj.tolist())

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint index arrays of the upper-triangle edge list."""
        return np.nonzero(self._adj & self._upper)

    def total_weight(self) -> float:
        return float(self._w[self._adj & self._upper].sum())

    def degree(self, i: int) -> int:
        if not (0 <= i < self.node_count):
            raise ValueError(f"node {i} out of range")
        return int(np.count_nonzero(self._adj[i]))

    def degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1)

    def neighbors(self, i: int) -> list[int]:
        if not (0 <= i < self.node_count):
            raise ValueError(f"node {i} out of range")
        return np.nonzero(self._adj[i])[0].tolist()

    @property
    def adjacency(self) -> np.ndarray:
        """Boolean adjacency matrix (read-only view)."""
        v = self._adj.view()
        v.setflags(write=False)
        return v

    @property
    def weights(self) -> np.ndarray:
        """Symmetric weight matrix, zero off the edge set (read-only view)."""
        v = self._w.view()
        v.setflags(write=False)
        return v

    @property
    def last_active_matrix(self) -> np.ndarray:
        v = self._t.view()
        v.setflags(write=False)
        return v

    # -- bulk mutators (used by the per-cycle phases) ------------------------

    def scale_weights(self, factor: float | np.ndarray) -> None:
        """Multiply every existing edge weight by a scalar or per-pair factor.

        Non-edge entries are zero, so a whole-matrix multiply touches only
        edge weights.
        """
        if np.ndim(factor) == 0:
            f = float(factor)
            if f < 0:
                raise ValueError("weight factor must be nonnegative")
            self._w *= f
        else:
            factor = np.asarray(factor, dtype=np.float64)
            if factor.min() < 0:
                raise ValueError("weight factors must be nonnegative")
            self._w *= factor

    def prune_below(self, eps: float) -> int:
        """Drop edges whose weight fell under eps; returns how many were removed."""
        dead = self._adj & (self._w < eps)
        removed = int(np.count_nonzero(dead & self._upper))
        if removed:
            self._adj[dead] = False
            self._w[dead] = 0.0
            self._t[dead] = 0
        return removed

    def remove_edges(self, pairs: list[tuple[int, int]]) -> None:
        """Batch removal; every pair must be a present edge."""
        if not pairs:
            return
        ii = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=len(pairs))
        jj = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=len(pairs))
        if np.any(ii == jj) or ii.min() < 0 or jj.min() < 0 or \
                max(ii.max(), jj.max()) >= self.node_count:
            raise ValueError("invalid node pair in batch removal")
        if not np.all(self._adj[ii, jj]):
            missing = np.nonzero(~self._adj[ii, jj])[0][0]
            raise ValueError(f"edge ({ii[missing]}, {jj[missing]}) not present")
        lo, hi = np.minimum(ii, jj), np.maximum(ii, jj)
        if np.unique(lo * self.node_count + hi).size != len(pairs):
            raise ValueError("duplicate edge in batch removal")
        for a, b in ((ii, jj), (jj, ii)):
            self._adj[a, b] = False
            self._w[a, b] = 0.0
            self._t[a, b] = 0

    def add_edges(self, ii: np.ndarray, jj: np.ndarray, ww: np.ndarray, t: int) -> None:
        """Batch insert; same contract as repeated add_edge calls."""
        ii = np.asarray(ii, dtype=np.int64)
        jj = np.asarray(jj, dtype=np.int64)
        ww = np.asarray(ww, dtype=np.float64)
        if ii.size == 0:
            return
        if np.any(ii == jj):
            raise ValueError("self-loop in batch insert")
        if min(ii.min(), jj.min()) < 0 or max(ii.max(), jj.max()) >= self.node_count:
            raise ValueError(f"node pair out of range for {self.node_count} nodes")
        if ww.min() < 0:
            raise ValueError("edge weights must be nonnegative")
        if t < 0:
            raise ValueError(f"last-active time must be nonnegative, got {t}")
        for a, b in ((ii, jj), (jj, ii)):
            self._adj[a, b] = True
            self._w[a, b] = ww
            self._t[a, b] = t

    def _csr(self) -> csr_matrix:
        return csr_matrix(self._adj)


# -- whole-graph structural queries ---------------------------------------


def connected_components(g: WeightedGraph) -> list[list[int]]:
    """Partition the nodes into connected components.

    Components are returned as sorted node lists, ordered by their smallest
    node id; isolated nodes form singleton components.
    """
    n_comp, labels = csgraph.connected_components(g._csr(), directed=False)
    comps: list[list[int]] = [[] for _ in range(n_comp)]
    for node, lab in enumerate(labels.tolist()):
        comps[lab].append(node)
    comps.sort(key=lambda c: c[0])
    return comps


def component_count(g: WeightedGraph) -> int:
    n_comp, _ = csgraph.connected_components(g._csr(), directed=False)
    return int(n_comp)


def largest_component(g: WeightedGraph) -> list[int]:
    """Largest component's nodes; size ties broken by lowest contained node id."""
    comps = connected_components(g)
    return max(comps, key=lambda c: (len(c), -c[0]))


@njit(cache=True)
def _bfs_distance_total(indptr, indices, sources):  # pragma: no cover - jitted
    n = indptr.shape[0] - 1
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    total = 0
    for s in sources:
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            v = queue[head]
            head += 1
            for p in range(indptr[v], indptr[v + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
        for q in range(tail):
            total += dist[queue[q]]
    return total


def _csr_arrays(adj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rows, cols = np.nonzero(adj)
    n = adj.shape[0]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, cols.astype(np.int64)


def average_path_length(g: WeightedGraph) -> float:
    """Mean hop-count distance over ordered node pairs of the largest component.

    Raises ValueError when the largest component is a single node (the mean
    over zero pairs is undefined).
    """
    nodes = largest_component(g)
    m = len(nodes)
    if m < 2:
        raise ValueError("average path length undefined: largest component has a single node")
    indptr, indices = _csr_arrays(g._adj)
    # BFS never leaves a component, so summing from each member counts
    # exactly the ordered intra-component pairs.
    total = _bfs_distance_total(indptr, indices, np.asarray(nodes, dtype=np.int64))
    return float(total) / (m * (m - 1))


# -- snapshot text format ---------------------------------------------------


def snapshot_text(g: WeightedGraph, time: int) -> str:
    """Edge-list text: header `# nodes=N time=t`, then `i j weight last_active` lines."""
    lines = [f"# nodes={g.node_count} time={time}"]
    for i, j in g.edges():
        lines.append(f"{i} {j} {g._w[i, j]!r} {g._t[i, j]}")
    return "\n".join(lines) + "\n"


def write_snapshot(g: WeightedGraph, time: int, path) -> None:
    """Write the edge list as text: header line, then `i j weight last_active`."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(snapshot_text(g, time))


def read_snapshot(path) -> tuple[WeightedGraph, int]:
    """Parse a snapshot written by write_snapshot; returns (graph, time)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# nodes="):
            raise ValueError(f"malformed snapshot header: {header!r}")
        fields = dict(part.split("=", 1) for part in header[2:].split())
        g = WeightedGraph(int(fields["nodes"]))
        time = int(fields["time"])
        for line in fh:
            line = line.strip()
            if not line:
                continue
            i, j, w, t = line.split()
            g.add_edge(int(i), int(j), float(w), int(t))
    return g, time


# -- two-mode incidence ------------------------------------------------------


class BipartiteIncidence:
    """Dense two-mode incidence counts with one observation time per mode-1 node.

    Entry (i, j) is the interaction count/strength between mode-1 node i and
    mode-2 node j; absent entries are zero.
    """

    def __init__(self, mode1_count: int, mode2_count: int):
        if mode1_count < 1 or mode2_count < 1:
            raise ValueError("both mode sizes must be positive")
        self.mode1_count = int(mode1_count)
        self.mode2_count = int(mode2_count)
        self.incidence = np.zeros((self.mode1_count, self.mode2_count), dtype=np.float64)
        self.timestamps = np.zeros(self.mode1_count, dtype=np.float64)

    def set_entry(self, i: int, j: int, value: float) -> None:
        if not (0 <= i < self.mode1_count and 0 <= j < self.mode2_count):
            raise ValueError(f"entry ({i}, {j}) out of range")
        if value < 0:
            raise ValueError(f"incidence values must be nonnegative, got {value}")
        self.incidence[i, j] = value

    def set_timestamp(self, i: int, t: float) -> None:
        if not 0 <= i < self.mode1_count:
            raise ValueError(f"mode-1 node {i} out of range")
        self.timestamps[i] = t

    def transposed(self, mode1_timestamps: np.ndarray) -> "BipartiteIncidence":
        """Swap the two modes; the caller supplies times for the new first mode."""
        out = BipartiteIncidence(self.mode2_count, self.mode1_count)
        out.incidence = self.incidence.T.copy()
        ts = np.asarray(mode1_timestamps, dtype=np.float64)
        if ts.shape != (self.mode2_count,):
            raise ValueError("timestamp vector must match the new first mode's size")
        out.timestamps = ts.copy()
        return out


def read_bipartite(path) -> BipartiteIncidence:
    """Parse a bipartite edge list: lines `i j value t_i`, optional size header.

    A header line `# mode1=N mode2=M` fixes the mode sizes; otherwise they are
    inferred from the largest indices seen.
    """
    entries = []
    mode1 = mode2 = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                fields = dict(part.split("=", 1) for part in line[1:].split())
                if "mode1" in fields and "mode2" in fields:
                    mode1, mode2 = int(fields["mode1"]), int(fields["mode2"])
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValueError(f"expected `i j value t_i`, got {line!r}")
            entries.append((int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])))
    if not entries and mode1 is None:
        raise ValueError("empty bipartite edge list and no size header")
    if mode1 is None:
        mode1 = max(e[0] for e in entries) + 1
        mode2 = max(e[1] for e in entries) + 1
    b = BipartiteIncidence(mode1, mode2)
    for i, j, value, t_i in entries:
        b.set_entry(i, j, value)
        b.set_timestamp(i, t_i)
    return b
