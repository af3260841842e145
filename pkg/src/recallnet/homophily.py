"""Two-mode homophily statistics under recall-weighted similarity.

Both statistics accumulate shared-neighbor products over ordered pairs of
one mode, discounted by each pair's similarity and by the recall kernel
over the elapsed time between the pair's observation times. The kernel
uses the retention of the pair's FIRST index (per-node overrides apply),
so the two orders of a pair can contribute differently.
"""

from __future__ import annotations

import numpy as np

from .decay import DecaySpec
from .graph import BipartiteIncidence
from .similarity import SimilarityMatrix


def _recall_factors(spec: DecaySpec, timestamps: np.ndarray) -> np.ndarray:
    """factors[i, k] = delta_i ** |t_i - t_k| for every ordered pair (i, k)."""
    m = timestamps.shape[0]
    dt = np.abs(timestamps[:, None] - timestamps[None, :])
    if spec.family == "none":
        return np.ones((m, m))
    per_node = np.array([spec.delta_for(i) for i in range(m)])
    with np.errstate(invalid="ignore"):
        factors = per_node[:, None] ** dt
    return np.where(dt == 0.0, 1.0, factors)


def first_mode_homophily(b: BipartiteIncidence, x: SimilarityMatrix, spec: DecaySpec) -> float:
    """Sum over ordered mode-1 pairs i != k of (N N^T)_ik * X_ik * recall(i, k)."""
    if x.n != b.mode1_count:
        raise ValueError(
            f"similarity matrix is {x.n}x{x.n} but mode 1 has {b.mode1_count} nodes")
    shared = b.incidence @ b.incidence.T
    factors = _recall_factors(spec, b.timestamps)
    contrib = shared * x.values * factors
    np.fill_diagonal(contrib, 0.0)
    return float(contrib.sum())


def second_mode_homophily(
    b: BipartiteIncidence,
    x: SimilarityMatrix,
    spec: DecaySpec,
    mode2_timestamps: np.ndarray | None = None,
) -> float:
    """Same statistic from the second mode's viewpoint: pairs (i, k) of mode-2
    columns linked through shared mode-1 rows j.

    The incidence format carries observation times only for mode-1 nodes, so
    the caller chooses the time binding for mode-2 pairs via
    mode2_timestamps; the default (all equal) leaves similarities
    undiscounted.
    """
    if x.n != b.mode2_count:
        raise ValueError(
            f"similarity matrix is {x.n}x{x.n} but mode 2 has {b.mode2_count} nodes")
    if mode2_timestamps is None:
        mode2_timestamps = np.zeros(b.mode2_count)
    ts = np.asarray(mode2_timestamps, dtype=np.float64)
    if ts.shape != (b.mode2_count,):
        raise ValueError(f"mode2_timestamps must have length {b.mode2_count}")
    shared = b.incidence.T @ b.incidence
    factors = _recall_factors(spec, ts)
    contrib = shared * x.values * factors
    np.fill_diagonal(contrib, 0.0)
    return float(contrib.sum())
