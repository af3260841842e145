"""Run metrics: utility, attack success rate, recall-value forms, per-cycle records.

Two recall-value definitions ship side by side because they answer different
questions and are not interchangeable:
  - vor_ratio: utility under perfect recall divided by utility under the
    tested retention (>1 means remembering everything would have paid off);
  - vor_normalized: where the tested retention lands inside the envelope
    spanned by the no-recall and perfect-recall references,
    (u_delta - u_zero) / (u_one - u_zero).
Raw values are stored; clamping to [0, 1] happens only in summary tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .adversary import AttackReport
from .graph import WeightedGraph

# Per-deletion damage threshold: a removal "succeeds" when it costs at least
# this share of pre-attack utility, or splits a component.
SUCCESS_LOSS_SHARE = 0.10

RECORD_HEADER = "run_seed,t,delta,rho,metric,topology,utility,adv_success,avg_path_len,edges,components"
VOR_HEADER = "delta,rho,metric,topology,u_delta,u_zero,u_one,vor_ratio,vor_normalized"


@dataclass
class CycleRecord:
    t: int
    utility: float
    adv_success: float
    avg_path_len: float | None  # None when the largest component is a single node
    edges: int
    components: int


@dataclass
class VorReport:
    u_delta: float
    u_zero: float
    u_one: float
    vor_ratio: float  # nan when u_delta == 0
    vor_normalized: float  # nan when the reference envelope is degenerate


def utility(g: WeightedGraph) -> float:
    """Total collaboration value: the sum of all edge weights."""
    return g.total_weight()


def adversarial_success(report: AttackReport, u_before: float) -> float:
    """Fraction of removals that cost >= 10% of pre-attack utility or split a component."""
    if report.attempted == 0:
        return 0.0
    if u_before <= 0.0:
        raise ValueError("adversarial success undefined: attack on zero pre-attack utility")
    hits = sum(
        1 for r in report.removals
        if r.disconnected or r.weight_lost >= SUCCESS_LOSS_SHARE * u_before
    )
    return hits / report.attempted


def vor_ratio(u_perfect: float, u_imperfect: float) -> float:
    if u_imperfect == 0.0:
        raise ValueError("recall-value ratio undefined: zero utility under imperfect recall")
    return u_perfect / u_imperfect


def vor_normalized(u_delta: float, u_zero: float, u_one: float) -> float:
    if u_one == u_zero:
        raise ValueError("normalized recall value undefined: degenerate reference envelope")
    return (u_delta - u_zero) / (u_one - u_zero)


def build_vor_report(u_delta: float, u_zero: float, u_one: float) -> VorReport:
    """Assemble both forms, mapping the degenerate cases to nan instead of raising."""
    try:
        ratio = vor_ratio(u_one, u_delta)
    except ValueError:
        ratio = math.nan
    try:
        norm = vor_normalized(u_delta, u_zero, u_one)
    except ValueError:
        norm = math.nan
    return VorReport(u_delta=u_delta, u_zero=u_zero, u_one=u_one,
                     vor_ratio=ratio, vor_normalized=norm)


def format_record_row(run_seed: int, record: CycleRecord, delta: float, rho: float,
                      metric: str, topology: str) -> str:
    apl = "" if record.avg_path_len is None else repr(record.avg_path_len)
    return (f"{run_seed},{record.t},{delta!r},{rho!r},{metric},{topology},"
            f"{record.utility!r},{record.adv_success!r},{apl},"
            f"{record.edges},{record.components}")


def format_vor_row(delta: float, rho: float, metric: str, topology: str,
                   report: VorReport) -> str:
    return (f"{delta!r},{rho!r},{metric},{topology},{report.u_delta!r},"
            f"{report.u_zero!r},{report.u_one!r},{report.vor_ratio!r},"
            f"{report.vor_normalized!r}")
