"""Experiment configuration files: sectioned key/value text, strictly validated.

A minimal file needs only the topology kind; every other knob falls back to
the stock defaults (n=200, er_p=0.02, T=25, 30 runs, 10% deletion, delta
grid 0.6/0.7/0.8/0.9, rho grid 0/0.1/0.3/0.5). Unknown sections or keys are
rejected with the offending name, and parse -> serialize -> parse is the
identity.
"""

from __future__ import annotations

import configparser
import io

from .adversary import AdversaryPolicy
from .decay import DecaySpec
from .engine import DEFAULT_DELTAS, DEFAULT_RHOS, ExperimentConfig
from .generators import TopologySpec
from .reconnect import ReconnectPolicy

_SCHEMA: dict[str, tuple[str, ...]] = {
    "experiment": ("mode", "steps", "runs", "base_seed", "workers"),
    "topology": ("kind", "n", "er_p", "sbm_blocks", "sbm_p_in", "sbm_p_out", "seed"),
    "similarity": ("metric",),
    "decay": ("family", "delta", "node_overrides"),
    "adversary": ("criterion", "fraction", "k", "initial_fraction"),
    "reconnect": ("rho", "theta", "theta_rule", "candidate_rule", "m"),
    "sweep": ("deltas", "rhos"),
}


def _check_known(parser: configparser.ConfigParser) -> None:
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ValueError(f"unknown config section [{section}]; "
                             f"expected one of {sorted(_SCHEMA)}")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ValueError(f"unknown config key {section}.{key}; "
                                 f"valid keys: {', '.join(_SCHEMA[section])}")


def _get_int(parser, section, key, default):
    raw = parser.get(section, key, fallback=None)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{section}.{key} must be an integer, got {raw!r}") from None


def _get_float(parser, section, key, default):
    raw = parser.get(section, key, fallback=None)
    if raw is None:
        return default
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{section}.{key} must be a number, got {raw!r}") from None


def _get_str(parser, section, key, default):
    raw = parser.get(section, key, fallback=None)
    return default if raw is None else raw.strip()


def _get_float_list(parser, section, key, default):
    raw = parser.get(section, key, fallback=None)
    if raw is None:
        return tuple(default)
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ValueError(f"{section}.{key} must be a nonempty comma-separated list")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ValueError(f"{section}.{key} must list numbers, got {raw!r}") from None


def _get_overrides(parser, section, key):
    raw = parser.get(section, key, fallback=None)
    if raw is None or not raw.strip():
        return {}
    overrides = {}
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            node_text, delta_text = item.split(":")
            overrides[int(node_text)] = float(delta_text)
        except ValueError:
            raise ValueError(
                f"{section}.{key} entries must look like `node:delta`, got {item!r}") from None
    return overrides


def parse_config_text(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ValueError(f"malformed config file: {exc}") from None
    _check_known(parser)

    if not parser.has_option("topology", "kind"):
        raise ValueError("missing required key topology.kind "
                         "(sparse_er | convex | modular_sbm)")

    topology = TopologySpec(
        kind=_get_str(parser, "topology", "kind", "sparse_er").lower(),
        n=_get_int(parser, "topology", "n", 200),
        er_p=_get_float(parser, "topology", "er_p", 0.02),
        sbm_blocks=_get_int(parser, "topology", "sbm_blocks", 4),
        sbm_p_in=_get_float(parser, "topology", "sbm_p_in", 0.25),
        sbm_p_out=_get_float(parser, "topology", "sbm_p_out", 0.01),
        seed=_get_int(parser, "topology", "seed", 0),
    )
    decay = DecaySpec(
        family=_get_str(parser, "decay", "family", "exponential").lower(),
        delta=_get_float(parser, "decay", "delta", 0.8),
        node_overrides=_get_overrides(parser, "decay", "node_overrides"),
    )
    k_raw = parser.get("adversary", "k", fallback=None)
    adversary = AdversaryPolicy(
        criterion=_get_str(parser, "adversary", "criterion", "max_weight").lower(),
        fraction=_get_float(parser, "adversary", "fraction", 0.10),
        k=None if k_raw is None else _get_int(parser, "adversary", "k", None),
    )
    recon = ReconnectPolicy(
        rho=_get_float(parser, "reconnect", "rho", 0.1),
        theta=_get_float(parser, "reconnect", "theta", 0.5),
        theta_rule=_get_str(parser, "reconnect", "theta_rule", "percentile75").lower(),
        candidate_rule=_get_str(parser, "reconnect", "candidate_rule", "all_non_edges").lower(),
        m=_get_int(parser, "reconnect", "m", 5),
    )
    cfg = ExperimentConfig(
        topology=topology,
        metric=_get_str(parser, "similarity", "metric", "cosine").lower(),
        decay=decay,
        adversary=adversary,
        reconnect=recon,
        mode=_get_str(parser, "experiment", "mode", "adversarial").lower(),
        steps=_get_int(parser, "experiment", "steps", 25),
        runs=_get_int(parser, "experiment", "runs", 30),
        initial_attack_fraction=_get_float(parser, "adversary", "initial_fraction", 0.10),
        deltas=_get_float_list(parser, "sweep", "deltas", DEFAULT_DELTAS),
        rhos=_get_float_list(parser, "sweep", "rhos", DEFAULT_RHOS),
        base_seed=_get_int(parser, "experiment", "base_seed", 0),
        workers=_get_int(parser, "experiment", "workers", 1),
    )
    cfg.validate()
    return cfg


def parse_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def serialize_config(cfg: ExperimentConfig) -> str:
    parser = configparser.ConfigParser(interpolation=None)
    parser["experiment"] = {
        "mode": cfg.mode,
        "steps": str(cfg.steps),
        "runs": str(cfg.runs),
        "base_seed": str(cfg.base_seed),
        "workers": str(cfg.workers),
    }
    parser["topology"] = {
        "kind": cfg.topology.kind,
        "n": str(cfg.topology.n),
        "er_p": repr(cfg.topology.er_p),
        "sbm_blocks": str(cfg.topology.sbm_blocks),
        "sbm_p_in": repr(cfg.topology.sbm_p_in),
        "sbm_p_out": repr(cfg.topology.sbm_p_out),
        "seed": str(cfg.topology.seed),
    }
    parser["similarity"] = {"metric": cfg.metric}
    parser["decay"] = {"family": cfg.decay.family, "delta": repr(cfg.decay.delta)}
    if cfg.decay.node_overrides:
        parser["decay"]["node_overrides"] = ", ".join(
            f"{node}:{delta!r}" for node, delta in sorted(cfg.decay.node_overrides.items()))
    parser["adversary"] = {
        "criterion": cfg.adversary.criterion,
        "fraction": repr(cfg.adversary.fraction),
        "initial_fraction": repr(cfg.initial_attack_fraction),
    }
    if cfg.adversary.k is not None:
        parser["adversary"]["k"] = str(cfg.adversary.k)
    parser["reconnect"] = {
        "rho": repr(cfg.reconnect.rho),
        "theta": repr(cfg.reconnect.theta),
        "theta_rule": cfg.reconnect.theta_rule,
        "candidate_rule": cfg.reconnect.candidate_rule,
        "m": str(cfg.reconnect.m),
    }
    parser["sweep"] = {
        "deltas": ", ".join(repr(d) for d in (cfg.deltas or DEFAULT_DELTAS)),
        "rhos": ", ".join(repr(r) for r in (cfg.rhos or DEFAULT_RHOS)),
    }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()
