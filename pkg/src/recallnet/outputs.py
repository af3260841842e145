"""Artifact output: atomically written CSVs, the run manifest, summary tables.

Every file is written under a temporary name and renamed into place, so an
interrupted process never leaves a partial file under a final name. CSV
content is a pure function of (config, base_seed); timestamps and durations
live only in the manifest.
"""

from __future__ import annotations

import csv
import json
import os
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import serialize_config
from .engine import ExperimentConfig, RunResult, SweepResult
from .metrics import (RECORD_HEADER, VOR_HEADER, build_vor_report,
                      format_record_row, format_vor_row)

RECORDS_NAME = "records.csv"
VOR_NAME = "vor_summary.csv"
MANIFEST_NAME = "manifest.json"
SNAPSHOT_NAME = "final_graph.edgelist"


def write_text_atomic(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _records_csv(results: list[RunResult]) -> str:
    lines = [RECORD_HEADER]
    for res in results:
        cfg = res.config
        for record in res.records:
            lines.append(format_record_row(
                res.run_seed, record, cfg.decay.delta, cfg.reconnect.rho,
                cfg.metric, cfg.topology.kind))
    return "\n".join(lines) + "\n"


def _vor_csv(sweep: SweepResult) -> str:
    lines = [VOR_HEADER]
    for cell in sweep.cells:
        report = build_vor_report(cell.u_mean, cell.u_zero, cell.u_one)
        lines.append(format_vor_row(cell.delta, cell.rho, cell.metric,
                                    cell.topology, report))
    return "\n".join(lines) + "\n"


def _manifest(cfg: ExperimentConfig, seeds: list[int], outputs: list[str],
              started: str, finished: str, durations_s: list[float]) -> str:
    payload = {
        "tool": "recallnet",
        "version": __version__,
        "config": serialize_config(cfg),
        "base_seed": cfg.base_seed,
        "run_seeds": seeds,
        "outputs": outputs,
        "started": started,
        "finished": finished,
        "run_durations_s": durations_s,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_run_outputs(out_dir, result: RunResult, started: str,
                      final_snapshot_text: str | None = None) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    write_text_atomic(out / RECORDS_NAME, _records_csv([result]))
    files.append(out / RECORDS_NAME)
    if final_snapshot_text is not None:
        write_text_atomic(out / SNAPSHOT_NAME, final_snapshot_text)
        files.append(out / SNAPSHOT_NAME)
    manifest = _manifest(result.config, [result.run_seed],
                         [f.name for f in files] + [MANIFEST_NAME],
                         started, _utc_now(), [result.duration_s])
    write_text_atomic(out / MANIFEST_NAME, manifest)
    files.append(out / MANIFEST_NAME)
    return files


def write_sweep_outputs(out_dir, sweep: SweepResult, started: str) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_text_atomic(out / RECORDS_NAME, _records_csv(sweep.results))
    write_text_atomic(out / VOR_NAME, _vor_csv(sweep))
    files = [out / RECORDS_NAME, out / VOR_NAME]
    manifest = _manifest(sweep.config, sweep.run_seeds,
                         [f.name for f in files] + [MANIFEST_NAME],
                         started, _utc_now(),
                         [r.duration_s for r in sweep.results])
    write_text_atomic(out / MANIFEST_NAME, manifest)
    files.append(out / MANIFEST_NAME)
    return files


# -- summary tables -----------------------------------------------------------


def _read_csv_rows(path: Path) -> list[dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return list(reader)


def _final_utilities(rows: list[dict[str, str]]) -> list[dict]:
    """Final-cycle utility per run, keyed by the sweep coordinates."""
    last_t: dict[tuple, int] = {}
    for row in rows:
        key = (row["run_seed"], row["delta"], row["rho"], row["metric"], row["topology"])
        last_t[key] = max(last_t.get(key, -1), int(row["t"]))
    finals = []
    for row in rows:
        key = (row["run_seed"], row["delta"], row["rho"], row["metric"], row["topology"])
        if int(row["t"]) == last_t[key]:
            finals.append({
                "delta": float(row["delta"]), "rho": float(row["rho"]),
                "metric": row["metric"], "topology": row["topology"],
                "utility": float(row["utility"]),
            })
    return finals


def _mean_sd(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, var ** 0.5


def _group(rows: list[dict], keys: tuple[str, ...]) -> dict[tuple, list[dict]]:
    grouped: dict[tuple, list[dict]] = {}
    for row in rows:
        grouped.setdefault(tuple(row[k] for k in keys), []).append(row)
    return grouped


def write_tables(in_dir, out_dir=None) -> list[Path]:
    """Aggregate sweep CSVs into three summary tables.

    - utility_by_delta.csv: final utility per topology x delta x metric;
    - vor_by_delta.csv: utility and recall-value profiles along the delta
      grid (normalized values clamped to [0, 1] here, and only here);
    - recovery_by_rho.csv: utility gain over the rho=0 column, per metric.

    Reads every records*.csv / vor_summary*.csv in in_dir so several sweep
    outputs can be pooled.
    """
    in_path = Path(in_dir)
    out_path = Path(out_dir) if out_dir is not None else in_path
    out_path.mkdir(parents=True, exist_ok=True)

    record_rows: list[dict[str, str]] = []
    for path in sorted(in_path.glob("records*.csv")):
        record_rows.extend(_read_csv_rows(path))
    if not record_rows:
        raise ValueError(f"no records*.csv found under {in_path}")
    vor_rows: list[dict[str, str]] = []
    for path in sorted(in_path.glob("vor_summary*.csv")):
        vor_rows.extend(_read_csv_rows(path))

    finals = _final_utilities(record_rows)
    written = []

    lines = ["topology,delta,metric,utility_mean,utility_sd,runs"]
    for key in sorted(_group(finals, ("topology", "delta", "metric"))):
        rows = _group(finals, ("topology", "delta", "metric"))[key]
        mean, sd = _mean_sd([r["utility"] for r in rows])
        lines.append(f"{key[0]},{key[1]!r},{key[2]},{mean!r},{sd!r},{len(rows)}")
    write_text_atomic(out_path / "utility_by_delta.csv", "\n".join(lines) + "\n")
    written.append(out_path / "utility_by_delta.csv")

    lines = ["delta,utility_mean,utility_sd,vor_ratio_mean,vor_normalized_mean,cells"]
    by_delta = _group(finals, ("delta",))
    vor_by_delta = _group(
        [{"delta": float(r["delta"]), "ratio": float(r["vor_ratio"]),
          "norm": float(r["vor_normalized"])} for r in vor_rows], ("delta",))
    for key in sorted(by_delta):
        mean, sd = _mean_sd([r["utility"] for r in by_delta[key]])
        cells = vor_by_delta.get(key, [])
        if cells:
            ratio = sum(c["ratio"] for c in cells) / len(cells)
            norm = sum(min(1.0, max(0.0, c["norm"])) for c in cells) / len(cells)
            ratio_text, norm_text = repr(ratio), repr(norm)
        else:
            ratio_text = norm_text = ""
        lines.append(f"{key[0]!r},{mean!r},{sd!r},{ratio_text},{norm_text},{len(cells)}")
    write_text_atomic(out_path / "vor_by_delta.csv", "\n".join(lines) + "\n")
    written.append(out_path / "vor_by_delta.csv")

    deltas = sorted({r["delta"] for r in finals})
    pivot = 0.8 if 0.8 in deltas else deltas[-1]
    at_pivot = [r for r in finals if r["delta"] == pivot]
    lines = ["metric,rho,delta,utility_mean,recovery_pct_vs_rho0"]
    by_metric = _group(at_pivot, ("metric",))
    for metric_key in sorted(by_metric):
        rows = by_metric[metric_key]
        by_rho = _group(rows, ("rho",))
        rhos = sorted(by_rho)
        base_mean, _ = _mean_sd([r["utility"] for r in by_rho[rhos[0]]])
        for rho_key in rhos:
            mean, _ = _mean_sd([r["utility"] for r in by_rho[rho_key]])
            if base_mean > 0:
                recovery = 100.0 * (mean - base_mean) / base_mean
                rec_text = repr(recovery)
            else:
                rec_text = ""
            lines.append(f"{metric_key[0]},{rho_key[0]!r},{pivot!r},{mean!r},{rec_text}")
    write_text_atomic(out_path / "recovery_by_rho.csv", "\n".join(lines) + "\n")
    written.append(out_path / "recovery_by_rho.csv")
    return written
