"""Simulation engine: the per-cycle loop, progressive modes, and parameter sweeps.

Each cycle executes, in order: memory decay (one time unit), adversarial
deletion, and similarity-gated reconnection. The four modes switch phases
on progressively: static records metrics only, decay adds the memory
phase, dynamic adds reconnection, adversarial adds the attacks (including
an initial deletion before the first cycle).

Every run also yields a recall-value report against two references that
share its seed: the static baseline (ties frozen at their initial
strengths, so its end-of-horizon utility is the initial utility) and a
perfect-recall run (the identical configuration with retention 1).
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from numpy.random import Generator, Philox, SeedSequence

from .adversary import AdversaryPolicy, attack
from .decay import EXPONENTIAL, NONE, PRUNE_EPSILON, DecaySpec, decay_one_step
from .generators import TopologySpec, generate
from .graph import WeightedGraph, average_path_length, component_count
from .metrics import (CycleRecord, VorReport, adversarial_success,
                      build_vor_report, utility)
from .reconnect import ReconnectPolicy, compute_threshold, reconnect
from .similarity import normalize_metric, similarity_matrix

STATIC = "static"
DECAY_ONLY = "decay"
DYNAMIC = "dynamic"
ADVERSARIAL = "adversarial"
MODES = (STATIC, DECAY_ONLY, DYNAMIC, ADVERSARIAL)

DEFAULT_DELTAS = (0.6, 0.7, 0.8, 0.9)
DEFAULT_RHOS = (0.0, 0.1, 0.3, 0.5)


@dataclass
class ExperimentConfig:
    topology: TopologySpec = field(default_factory=TopologySpec)
    metric: str = "cosine"
    decay: DecaySpec = field(default_factory=DecaySpec)
    adversary: AdversaryPolicy = field(default_factory=AdversaryPolicy)
    reconnect: ReconnectPolicy = field(default_factory=ReconnectPolicy)
    mode: str = ADVERSARIAL
    steps: int = 25
    runs: int = 30
    initial_attack_fraction: float = 0.10
    deltas: tuple[float, ...] | None = None  # sweep grid; None outside sweeps
    rhos: tuple[float, ...] | None = None
    base_seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        self.topology.validate()
        self.metric = normalize_metric(self.metric)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be at least 1, got {self.steps}")
        if self.runs < 1:
            raise ValueError(f"runs must be at least 1, got {self.runs}")
        if not 0.0 <= self.initial_attack_fraction <= 1.0:
            raise ValueError(
                f"adversary.initial_fraction must lie in [0, 1], got {self.initial_attack_fraction}")
        for name, grid in (("sweep.deltas", self.deltas), ("sweep.rhos", self.rhos)):
            if grid is not None:
                if len(grid) == 0:
                    raise ValueError(f"{name} must be a nonempty list")
                for v in grid:
                    if not 0.0 <= v <= 1.0:
                        raise ValueError(f"{name} entries must lie in [0, 1], got {v}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")


@dataclass
class RunResult:
    config: ExperimentConfig
    run_seed: int
    records: list[CycleRecord]
    vor: VorReport | None
    duration_s: float
    final_graph: WeightedGraph | None = None  # kept only on request

    @property
    def final_utility(self) -> float:
        return self.records[-1].utility


@dataclass
class CellStats:
    delta: float
    rho: float
    metric: str
    topology: str
    runs: int
    u_mean: float
    u_sd: float
    vor_ratio_mean: float
    vor_ratio_sd: float
    vor_norm_mean: float
    vor_norm_sd: float
    u_zero: float
    u_one: float


@dataclass
class SweepResult:
    config: ExperimentConfig
    deltas: tuple[float, ...]
    rhos: tuple[float, ...]
    results: list[RunResult]  # ordered by (delta index, rho index, run index)
    cells: list[CellStats]
    run_seeds: list[int]
    reference_runs: int


def derive_run_seed(base_seed: int, delta_idx: int, rho_idx: int, run_idx: int) -> int:
    """Stable 64-bit run seed from the sweep coordinates."""
    text = f"{base_seed}:{delta_idx}:{rho_idx}:{run_idx}".encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "big")


def _purpose_rngs(seed: int) -> tuple[Generator, Generator, Generator]:
    """Independent counter-based streams for generation, adversary, reconnection.

    Separate streams keep one phase's draws stable when another phase is
    toggled, which is what makes ablations comparable. The adversary stream
    is reserved (selection is deterministic today).
    """
    gen_ss, adv_ss, rec_ss = SeedSequence(seed).spawn(3)
    return (Generator(Philox(gen_ss)), Generator(Philox(adv_ss)), Generator(Philox(rec_ss)))


def _observe(t: int, g: WeightedGraph, adv_success: float) -> CycleRecord:
    try:
        apl = average_path_length(g)
    except ValueError:
        apl = None
    return CycleRecord(t=t, utility=utility(g), adv_success=adv_success,
                       avg_path_len=apl, edges=g.edge_count,
                       components=component_count(g))


def _simulate(cfg: ExperimentConfig, seed: int) -> tuple[list[CycleRecord], WeightedGraph]:
    """One trajectory: T+1 records (the t=0 baseline plus one per cycle)."""
    gen_rng, _adv_rng, rec_rng = _purpose_rngs(seed)
    g = generate(cfg.topology, rng=gen_rng)

    do_decay = cfg.mode in (DECAY_ONLY, DYNAMIC, ADVERSARIAL)
    do_attack = cfg.mode == ADVERSARIAL
    do_reconnect = cfg.mode in (DYNAMIC, ADVERSARIAL) and cfg.reconnect.rho > 0.0

    threshold = 0.0
    if do_reconnect:
        threshold = compute_threshold(similarity_matrix(g, cfg.metric), cfg.reconnect)

    # The baseline record reflects the freshly generated graph; the initial
    # deletion happens at t=0 right after, so its success rate (and nothing
    # else) lands in this record and the utility drop shows at t=1.
    baseline = _observe(0, g, 0.0)
    if do_attack and cfg.initial_attack_fraction > 0.0:
        first_policy = AdversaryPolicy(criterion=cfg.adversary.criterion,
                                       fraction=cfg.initial_attack_fraction)
        u_before = utility(g)
        g, report = attack(g, first_policy, now=0)
        if report.attempted and u_before > 0.0:
            baseline.adv_success = adversarial_success(report, u_before)
    records = [baseline]

    for t in range(1, cfg.steps + 1):
        if do_decay:
            decay_one_step(g, cfg.decay)
            g.prune_below(PRUNE_EPSILON)
        step_success = 0.0
        if do_attack:
            u_before = utility(g)
            g, report = attack(g, cfg.adversary, now=t)
            if report.attempted and u_before > 0.0:
                step_success = adversarial_success(report, u_before)
        if do_reconnect:
            x = similarity_matrix(g, cfg.metric)
            reconnect(g, x, cfg.reconnect, threshold, rec_rng, now=t)
        records.append(_observe(t, g, step_success))
    return records, g


def reference_utilities(cfg: ExperimentConfig, seed: int) -> tuple[float, float]:
    """Final utilities of the no-recall and perfect-recall reference runs.

    Both references rerun the identical configuration and seed with only the
    memory policy replaced (retention 0 and retention 1), so the gap to the
    tested run is attributable to memory alone.
    """
    zero_cfg = replace(cfg, decay=DecaySpec(family=EXPONENTIAL, delta=0.0))
    one_cfg = replace(cfg, decay=DecaySpec(family=NONE, delta=1.0))
    zero_records, _ = _simulate(zero_cfg, seed)
    one_records, _ = _simulate(one_cfg, seed)
    return zero_records[-1].utility, one_records[-1].utility


def run_once(cfg: ExperimentConfig, seed: int | None = None,
             with_reference: bool = True, keep_graph: bool = False) -> RunResult:
    """Execute one seeded run; optionally attach the recall-value report."""
    cfg.validate()
    if seed is None:
        seed = cfg.base_seed
    started = time.perf_counter()
    records, final_graph = _simulate(cfg, seed)
    vor = None
    if with_reference:
        u_zero, u_one = reference_utilities(cfg, seed)
        vor = build_vor_report(records[-1].utility, u_zero, u_one)
    return RunResult(config=cfg, run_seed=seed, records=records, vor=vor,
                     duration_s=time.perf_counter() - started,
                     final_graph=final_graph if keep_graph else None)


def _sweep_job(args: tuple[ExperimentConfig, int]) -> RunResult:
    cfg, seed = args
    return run_once(cfg, seed, with_reference=False)


def _mean_sd(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var ** 0.5


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Cartesian delta x rho grid, `runs` Monte-Carlo replicates per cell.

    Per cell, one no-recall and one perfect-recall reference run (sharing the
    cell's first run seed) anchor the recall-value reports of all its runs.
    Results are ordered by (delta index, rho index, run index) regardless of
    worker count, so output files are byte-stable.
    """
    cfg.validate()
    if cfg.deltas is None or cfg.rhos is None:
        raise ValueError("sweep requires both sweep.deltas and sweep.rhos")

    jobs: list[tuple[ExperimentConfig, int]] = []
    cell_cfgs: list[ExperimentConfig] = []
    for di, d in enumerate(cfg.deltas):
        for ri, r in enumerate(cfg.rhos):
            cell_cfg = replace(
                cfg,
                decay=replace(cfg.decay, delta=d),
                reconnect=replace(cfg.reconnect, rho=r),
            )
            cell_cfgs.append(cell_cfg)
            for k in range(cfg.runs):
                jobs.append((cell_cfg, derive_run_seed(cfg.base_seed, di, ri, k)))

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_sweep_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    else:
        results = [_sweep_job(job) for job in jobs]

    cells: list[CellStats] = []
    reference_runs = 0
    for c, cell_cfg in enumerate(cell_cfgs):
        cell_results = results[c * cfg.runs:(c + 1) * cfg.runs]
        u_zero, u_one = reference_utilities(cell_cfg, cell_results[0].run_seed)
        reference_runs += 2
        for res in cell_results:
            res.vor = build_vor_report(res.final_utility, u_zero, u_one)
        u_mean, u_sd = _mean_sd([r.final_utility for r in cell_results])
        ratio_mean, ratio_sd = _mean_sd([r.vor.vor_ratio for r in cell_results])
        norm_mean, norm_sd = _mean_sd([r.vor.vor_normalized for r in cell_results])
        cells.append(CellStats(
            delta=cell_cfg.decay.delta, rho=cell_cfg.reconnect.rho,
            metric=cfg.metric, topology=cfg.topology.kind, runs=cfg.runs,
            u_mean=u_mean, u_sd=u_sd,
            vor_ratio_mean=ratio_mean, vor_ratio_sd=ratio_sd,
            vor_norm_mean=norm_mean, vor_norm_sd=norm_sd,
            u_zero=u_zero, u_one=u_one,
        ))

    return SweepResult(config=cfg, deltas=tuple(cfg.deltas), rhos=tuple(cfg.rhos),
                       results=results, cells=cells,
                       run_seeds=[seed for _, seed in jobs],
                       reference_runs=reference_runs)
