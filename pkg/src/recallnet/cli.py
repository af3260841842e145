"""Command-line interface.

Subcommands:
  run        one configuration, one seeded run
  sweep      delta x rho grid with Monte-Carlo replication
  homophily  two-mode homophily statistics from a bipartite edge list
  tables     aggregate sweep CSVs into summary tables

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .config import parse_config
from .decay import DecaySpec
from .engine import MODES, run_once, run_sweep
from .graph import read_bipartite, snapshot_text
from .homophily import first_mode_homophily, second_mode_homophily
from .outputs import write_run_outputs, write_sweep_outputs, write_tables, write_text_atomic
from .similarity import SimilarityMatrix

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recallnet",
        description="Memory-decay / adversarial-deletion network simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override base seed")
        p.add_argument("--workers", type=int, default=None, help="parallel run workers")
        p.add_argument("--mode", choices=MODES, default=None, help="override engine mode")

    add_common(sub.add_parser("run", help="execute a single run"))
    add_common(sub.add_parser("sweep", help="execute the delta x rho sweep"))

    hp = sub.add_parser("homophily", help="two-mode homophily statistics")
    hp.add_argument("--input", required=True, help="bipartite edge list: `i j value t_i` lines")
    hp.add_argument("--delta", type=float, default=1.0, help="retention per time unit")
    hp.add_argument("--mode2-times", default=None,
                    help="optional file of `j t_j` lines binding observation times "
                         "to the second mode (default: undiscounted)")
    hp.add_argument("--out", default=None, help="write the JSON here instead of stdout")

    tp = sub.add_parser("tables", help="summarize sweep CSVs")
    tp.add_argument("--in", dest="in_dir", required=True, help="directory with sweep CSVs")
    tp.add_argument("--out", default=None, help="output directory (default: same as --in)")
    return parser


def _load_config(args):
    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    if args.mode is not None:
        cfg = replace(cfg, mode=args.mode)
    cfg.validate()
    return cfg


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    started = datetime.now(timezone.utc).isoformat()
    result = run_once(cfg, cfg.base_seed, keep_graph=True)
    write_run_outputs(args.out, result, started,
                      snapshot_text(result.final_graph, cfg.steps))
    print(f"run complete: seed={result.run_seed} final_utility={result.final_utility:.6g} "
          f"-> {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    started = datetime.now(timezone.utc).isoformat()
    sweep = run_sweep(cfg)
    write_sweep_outputs(args.out, sweep, started)
    print(f"sweep complete: {len(sweep.results)} runs + {sweep.reference_runs} reference runs, "
          f"{len(sweep.cells)} cells -> {args.out}")
    return EXIT_OK


def _cmd_homophily(args) -> int:
    b = read_bipartite(args.input)
    spec = DecaySpec(delta=args.delta)
    x1 = _structural_similarity(b.incidence)
    x2 = _structural_similarity(b.incidence.T)
    mode2_times = None
    if args.mode2_times is not None:
        mode2_times = np.zeros(b.mode2_count)
        with open(args.mode2_times, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                j_text, t_text = line.split()
                mode2_times[int(j_text)] = float(t_text)
    payload = {
        "mode1_count": b.mode1_count,
        "mode2_count": b.mode2_count,
        "delta": args.delta,
        "first_mode": first_mode_homophily(b, x1, spec),
        "second_mode": second_mode_homophily(b, x2, spec, mode2_times),
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out is not None:
        write_text_atomic(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _structural_similarity(incidence: np.ndarray) -> SimilarityMatrix:
    """Cosine similarity of incidence rows, for the homophily statistics."""
    dots = incidence @ incidence.T
    norms = np.sqrt(np.einsum("ij,ij->i", incidence, incidence))
    den = np.outer(norms, norms)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = np.where(den > 0.0, dots / den, 0.0)
    np.fill_diagonal(values, 0.0)
    np.clip(values, 0.0, 1.0, out=values)
    return SimilarityMatrix(metric="cosine", values=values)


def _cmd_tables(args) -> int:
    written = write_tables(args.in_dir, args.out)
    print("tables written: " + ", ".join(str(p) for p in written))
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "sweep": _cmd_sweep,
        "homophily": _cmd_homophily,
        "tables": _cmd_tables,
    }
    try:
        return handlers[args.command](args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
