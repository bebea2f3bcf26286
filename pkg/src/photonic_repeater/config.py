"""Run configuration: loading, schema validation and conversion to model objects.

A configuration is one JSON document with the optional sections ``hardware``,
``link``, ``protocol``, ``search``, ``mc`` and ``output``.  Each subcommand
names the sections it needs; everything is validated against the bundled
schema before any computation starts.
"""
from __future__ import annotations

import json
import os
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Optional

import jsonschema

from .montecarlo import McSettings
from .optimize import Constraints, SearchSpace
from .prep import Polynomial
from .repeater import HardwareParams, LinkParams, ProtocolConfig
from .tree import TreeParams

CONFIG_SCHEMA = "config.schema.json"
OUTPUT_SCHEMA = "output.schema.json"

REQUIRED_SECTIONS = {
    "evaluate": ("hardware", "link", "protocol"),
    "optimize": ("hardware", "link", "search"),
    "sweep": ("hardware", "search"),
    "mc": ("mc",),
    "oracle": (),
}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` locates the offending field (``$`` is the root)."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@lru_cache(maxsize=None)
def _schema_text(name: str) -> str:
    return (resources.files(__package__) / "schemas" / name).read_text(encoding="utf-8")


def load_schema(name: str) -> dict:
    """A fresh copy of a bundled JSON schema."""
    return json.loads(_schema_text(name))


def preset_names() -> list[str]:
    folder = resources.files(__package__) / "presets"
    return sorted(p.name[: -len(".json")] for p in folder.iterdir() if p.name.endswith(".json"))


def preset_path(name: str):
    return resources.files(__package__) / "presets" / f"{name}.json"


def _json_path(parts: Iterable[Any]) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def validate_document(document: Any, schema_name: str = CONFIG_SCHEMA) -> None:
    """Raise :class:`ConfigError` for the first schema violation (in path order)."""
    validator = jsonschema.Draft202012Validator(load_schema(schema_name))
    errors = sorted(validator.iter_errors(document), key=lambda e: (_json_path(e.absolute_path), e.message))
    if errors:
        first = errors[0]
        raise ConfigError(_json_path(first.absolute_path), first.message)


def read_config(source: str) -> dict:
    """Parse a configuration from a file path or a preset name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif os.sep not in source and not source.endswith(".json") and preset_path(source).is_file():
        text = preset_path(source).read_text(encoding="utf-8")
    else:
        known = ", ".join(preset_names())
        raise ConfigError("$", f"no config file or preset named {source!r} (presets: {known})")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from exc


def check_config(document: Any, command: str) -> dict:
    """Schema validation plus the sections ``command`` needs."""
    validate_document(document, CONFIG_SCHEMA)
    for section in REQUIRED_SECTIONS[command]:
        if section not in document:
            raise ConfigError("$", f"{section!r} is a required property for {command}")
    if command == "sweep" and "grid" not in document["search"]:
        raise ConfigError("$.search", "'grid' is a required property for sweep")
    if command == "mc":
        mc = document["mc"]
        if not (mc.get("tree_cases") or mc.get("small_tree_suite") or mc.get("repeater")):
            raise ConfigError("$.mc", "nothing to run: set tree_cases, small_tree_suite or repeater")
        if mc.get("repeater"):
            for section in ("hardware", "link", "protocol"):
                if section not in document:
                    raise ConfigError("$", f"{section!r} is a required property when mc.repeater is true")
    return document


def _model(path: str, build, *args, **kwargs):
    """Run a model constructor, turning its ``ValueError`` into a located ``ConfigError``."""
    try:
        return build(*args, **kwargs)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc


def hardware_from(doc: dict) -> HardwareParams:
    h = doc["hardware"]
    keys = ("eta_s", "eta_d", "tau_a", "f", "c", "l_att")
    return _model("$.hardware", HardwareParams, **{k: float(h[k]) for k in keys if k in h})


def link_from(doc: dict) -> LinkParams:
    link = doc["link"]
    return _model("$.link", LinkParams, L=float(link["L"]), L0=float(link["L0"]), e_d=float(link.get("e_d", 0.0)))


def protocol_from(doc: dict) -> ProtocolConfig:
    p = doc["protocol"]
    tree = _model("$.protocol.branches", TreeParams, tuple(p["branches"]))
    return _model("$.protocol", ProtocolConfig, m=int(p["m"]), tree=tree, hardware=hardware_from(doc), link=link_from(doc))


def prep_poly_from(doc: dict) -> Polynomial:
    coefficients = doc.get("protocol", {}).get("prep_poly", [0.0, 1.0])
    return Polynomial(tuple(float(c) for c in coefficients))


def p_tau_a_override(doc: dict) -> Optional[float]:
    value = doc.get("hardware", {}).get("p_tau_a")
    return None if value is None else float(value)


def constraints_from(doc: dict) -> Constraints:
    c = doc["search"].get("constraints", {})
    return Constraints(
        min_fidelity=c.get("min_fidelity"),
        min_rate=c.get("min_rate"),
        max_epsilon0=c.get("max_epsilon0"),
    )


def search_space_from(doc: dict) -> SearchSpace:
    s = doc["search"]
    return _model(
        "$.search",
        SearchSpace,
        m_range=tuple(s["m_range"]),
        branch_ranges=tuple(tuple(r) for r in s["branch_ranges"]),
        constraints=constraints_from(doc),
    )


def frontier_size_from(doc: dict) -> int:
    return int(doc["search"].get("frontier_size", 25))


def sweep_grid_from(doc: dict) -> list[tuple[float, float, float]]:
    """Grid cells as ``(L, L0, e_d)``; a missing ``e_d`` falls back to ``link.e_d`` or 0."""
    default = float(doc.get("link", {}).get("e_d", 0.0))
    return [(float(c["L"]), float(c["L0"]), float(c.get("e_d", default))) for c in doc["search"]["grid"]]


def resolve_threads(threads: int) -> int:
    """``0`` means one worker per available CPU."""
    if threads == 0:
        return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
    return threads


def mc_settings_from(doc: dict, trials_key: str = "trials") -> McSettings:
    mc = doc.get("mc", {})
    trials = mc.get(trials_key, mc.get("trials", 100_000))
    return _model(
        "$.mc",
        McSettings,
        trials=int(trials),
        seed=int(mc.get("seed", 0)),
        confidence_sigma=float(mc.get("confidence_sigma", 3.0)),
        threads=resolve_threads(int(mc.get("threads", 1))),
        backend=str(mc.get("backend", "auto")),
    )
