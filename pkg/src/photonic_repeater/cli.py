"""Command-line front end.

Subcommands ``evaluate``, ``optimize``, ``sweep``, ``mc`` and ``oracle`` read
one JSON configuration (a file or a shipped preset name), validate it, run
the corresponding computation and write a JSON document or a flat CSV table.

Exit codes: 0 success, 1 computation failure, 2 configuration or schema
failure, 3 a Monte Carlo or oracle verdict failed.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Any, Optional, Sequence

from . import config as cfg
from .montecarlo import SMALL_TREE_SUITE, Comparison, repeater_comparisons, tree_comparisons
from .optimize import SearchResult, optimize, sweep
from .prep import prep_estimate
from .repeater import HardwareParams, LinkParams, ProtocolConfig, RepeaterMetrics, StageError, evaluate, source_detector_params
from .stabilizer import run_all
from .tree import TreeMetrics

EXIT_OK = 0
EXIT_COMPUTATION = 1
EXIT_CONFIG = 2
EXIT_VERDICT = 3

#: Frozen column order of the CSV written by ``evaluate``, ``optimize`` and ``sweep``.
EVALUATION_COLUMNS = (
    "row",
    "status",
    "L",
    "L0",
    "e_d",
    "n",
    "m",
    "branches",
    "q_l",
    "epsilon0",
    "p_b",
    "p_z",
    "p_x",
    "e_z_meas",
    "e_x_meas",
    "p",
    "rate",
    "q_bar",
    "photons_per_trial",
    "e_x",
    "e_y",
    "e_z",
    "fidelity",
    "t_max",
    "t_mem_a",
    "t_mem_b",
    "tau_s",
    "tau_c",
    "error",
)
#: Frozen column order of the CSV written by ``mc``.
MC_COLUMNS = ("case", "quantity", "analytic", "mean", "std_error", "trials", "z_score", "verdict")
#: Frozen column order of the CSV written by ``oracle``.
ORACLE_COLUMNS = ("check", "passed", "cases", "crosschecked", "failures")

_PREP_NOTE = "q_s_bound and q_c_bound are upper bounds under the configured polynomial"


class ComputationError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage


# -- value encoding -------------------------------------------------------
def _num(value: Optional[float]) -> Optional[float]:
    """Finite floats pass through; ``None``, inf and nan become ``None`` (JSON null)."""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


def _cell(value: Any) -> str:
    """CSV text: shortest round-trip repr for floats, empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _branches_text(branches: Sequence[int]) -> str:
    return "-".join(str(b) for b in branches)


def hardware_dict(hw: HardwareParams) -> dict:
    return {"eta_s": hw.eta_s, "eta_d": hw.eta_d, "tau_a": hw.tau_a, "f": hw.f, "c": hw.c, "l_att": hw.l_att}


def link_dict(link: LinkParams, n: int) -> dict:
    return {"L": link.L, "L0": link.L0, "e_d": link.e_d, "n": n}


def tree_dict(t: TreeMetrics) -> dict:
    return {
        "q_l": t.q_l,
        "r_profile": [_num(v) for v in t.r_profile],
        "p_general": _num(t.p_general),
        "p_z": _num(t.p_z),
        "p_x": _num(t.p_x),
        "err_profile": [_num(v) for v in t.err_profile],
        "e_z": _num(t.e_z),
        "e_x": _num(t.e_x),
        "fail_z": _num(t.fail_z),
        "fail_x": _num(t.fail_x),
        "fail_general": _num(t.fail_general),
    }


def metrics_dict(r: RepeaterMetrics) -> dict:
    keys = ("epsilon0", "p_b", "p", "rate", "q_bar")
    out = {k: _num(getattr(r, k)) for k in keys}
    out["photons_per_trial"] = r.photons_per_trial
    for k in ("e_m", "e_x", "e_y", "e_z", "fidelity", "t_max", "t_mem_a", "t_mem_b", "tau_s", "tau_c"):
        out[k] = _num(getattr(r, k))
    return out


def evaluation_dict(config: ProtocolConfig, r: RepeaterMetrics) -> dict:
    return {
        "protocol": {"m": config.m, "branches": list(config.tree.branches)},
        "link": link_dict(config.link, r.n),
        "metrics": metrics_dict(r),
        "tree": tree_dict(r.tree),
    }


def evaluation_row(
    index: int, status: str, config: Optional[ProtocolConfig], r: Optional[RepeaterMetrics], link=None, error: str = ""
) -> dict:
    """One flat CSV row; ``link`` supplies the geometry when there is no config."""
    row = dict.fromkeys(EVALUATION_COLUMNS)
    row.update(row=index, status=status, error=error)
    if config is not None:
        link = config.link
    if isinstance(link, LinkParams):
        link = (link.L, link.L0, link.e_d)
    if link is not None:
        row.update(L=link[0], L0=link[1], e_d=link[2])
    if config is not None:
        row.update(m=config.m, branches=_branches_text(config.tree.branches))
    if r is not None:
        t = r.tree
        row.update(n=r.n, q_l=t.q_l, p_z=t.p_z, p_x=t.p_x, e_z_meas=t.e_z, e_x_meas=t.e_x)
        row.update({k: v for k, v in metrics_dict(r).items() if k in row})
    return row


def search_result_dict(result: SearchResult) -> dict:
    best = None
    if result.best_config is not None and result.best_metrics is not None:
        best = evaluation_dict(result.best_config, result.best_metrics)
    return {
        "feasible": result.feasible,
        "message": result.message,
        "candidates": result.candidates,
        "evaluated": result.evaluated,
        "best": best,
        "frontier": [evaluation_dict(c, m) for c, m in result.frontier],
    }


def comparison_dict(case: str, c: Comparison) -> dict:
    return {
        "case": case,
        "quantity": c.quantity_tag,
        "analytic": _num(c.analytic),
        "mean": _num(c.mean),
        "std_error": _num(c.std_error),
        "trials": c.trials,
        "z_score": _num(c.z_score),
        "verdict": c.verdict,
    }


# -- rendering -------------------------------------------------------------
def render_json(document: dict) -> str:
    cfg.validate_document(document, cfg.OUTPUT_SCHEMA)
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def render_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buf.getvalue()


# -- subcommands --------------------------------------------------------------
def _guarded(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError as exc:
        raise ComputationError(exc.stage, str(exc)) from exc
    except (ValueError, ArithmeticError) as exc:
        raise ComputationError(stage, str(exc)) from exc


def cmd_evaluate(doc: dict, fmt: str, threads: int) -> tuple[str, int]:
    config = cfg.protocol_from(doc)
    metrics = _guarded("evaluate", evaluate, config)
    if fmt == "csv":
        return render_csv(EVALUATION_COLUMNS, [evaluation_row(0, "ok", config, metrics)]), EXIT_OK
    params = source_detector_params(config.hardware)
    override = cfg.p_tau_a_override(doc)
    if override is not None:
        params = type(params)(params.eta_s, params.eta_d, params.tau_a, override)
    poly = cfg.prep_poly_from(doc)
    prep = _guarded("prep", prep_estimate, config.m, config.tree, params, poly)
    document = {
        "command": "evaluate",
        "hardware": hardware_dict(config.hardware),
        "evaluation": evaluation_dict(config, metrics),
        "prep": {
            "tau_s": _num(prep.tau_s),
            "tau_c": _num(prep.tau_c),
            "p2_lower": _num(prep.p2_lower),
            "p2_upper": _num(prep.p2_upper),
            "q_s_bound": _num(prep.q_s_bound),
            "q_c_bound": _num(prep.q_c_bound),
            "ghz_success": _num(prep.ghz_success),
            "ghz_effective_loss": _num(prep.ghz_effective_loss),
            "p_tau_a": _num(params.p_tau_a),
            "poly": list(poly.coefficients),
            "note": _PREP_NOTE,
        },
    }
    return render_json(document), EXIT_OK


def _search_rows(result: SearchResult, start: int = 0, link=None) -> list[dict]:
    """The best candidate (or the diagnostic infeasible one) followed by the frontier."""
    head = "optimal" if result.feasible else "infeasible"
    rows = [evaluation_row(start, head, result.best_config, result.best_metrics, link=link, error="" if result.feasible else result.message)]
    for i, (c, m) in enumerate(result.frontier, start=start + 1):
        rows.append(evaluation_row(i, "frontier", c, m))
    return rows


def cmd_optimize(doc: dict, fmt: str, threads: int) -> tuple[str, int]:
    hw, link = cfg.hardware_from(doc), cfg.link_from(doc)
    space = cfg.search_space_from(doc)
    result = _guarded("optimize", optimize, space, hw, link, threads=threads, frontier_size=cfg.frontier_size_from(doc))
    if fmt == "csv":
        return render_csv(EVALUATION_COLUMNS, _search_rows(result, link=link)), EXIT_OK
    document = {"command": "optimize", "hardware": hardware_dict(hw), "result": search_result_dict(result)}
    return render_json(document), EXIT_OK


def cmd_sweep(doc: dict, fmt: str, threads: int) -> tuple[str, int]:
    hw = cfg.hardware_from(doc)
    space = cfg.search_space_from(doc)
    rows = sweep(cfg.sweep_grid_from(doc), space, hw, threads=threads)
    if fmt == "csv":
        flat = []
        for i, row in enumerate(rows):
            cell = (row.L, row.L0, row.e_d)
            if row.result is None:
                flat.append(evaluation_row(i, "error", None, None, link=cell, error=row.error))
            else:
                r = row.result
                msg = "" if r.feasible else r.message
                flat.append(evaluation_row(i, row.status, r.best_config, r.best_metrics, link=cell, error=msg))
        return render_csv(EVALUATION_COLUMNS, flat), EXIT_OK
    document = {
        "command": "sweep",
        "hardware": hardware_dict(hw),
        "rows": [
            {
                "L": row.L,
                "L0": row.L0,
                "e_d": row.e_d,
                "status": row.status,
                "error": row.error,
                "result": None if row.result is None else search_result_dict(row.result),
            }
            for row in rows
        ],
    }
    return render_json(document), EXIT_OK


def _tree_case_label(branches, eps, e_m) -> str:
    return f"tree={_branches_text(branches)} epsilon0={eps!r} e_m={e_m!r}"


def cmd_mc(doc: dict, fmt: str, threads: int) -> tuple[str, int]:
    mc = doc["mc"]
    settings = cfg.mc_settings_from(doc)
    cases = [(tuple(c["branches"]), float(c["epsilon0"]), float(c.get("e_m", 0.0)), c.get("basis", "both")) for c in mc.get("tree_cases", [])]
    if mc.get("small_tree_suite"):
        cases += [(b, eps, e_m, "both") for b, eps, e_m in SMALL_TREE_SUITE]
    results: list[dict] = []
    for branches, eps, e_m, basis in cases:
        bases = ("Z", "X") if basis == "both" else (basis,)
        label = _tree_case_label(branches, eps, e_m)
        for c in _guarded("mc_tree_measurement", tree_comparisons, branches, eps, e_m, settings, bases):
            results.append(comparison_dict(label, c))
    if mc.get("repeater"):
        config = cfg.protocol_from(doc)
        rep_settings = cfg.mc_settings_from(doc, "repeater_trials")
        physical = bool(mc.get("physical", False))
        label = f"repeater m={config.m} tree={_branches_text(config.tree.branches)} L={config.link.L!r} L0={config.link.L0!r}"
        if physical:
            label += " physical"
        for c in _guarded("mc_repeater_trial", repeater_comparisons, config, rep_settings, physical):
            results.append(comparison_dict(label, c))
    all_ok = all(r["verdict"] == "consistent" for r in results)
    code = EXIT_OK if all_ok else EXIT_VERDICT
    if fmt == "csv":
        return render_csv(MC_COLUMNS, results), code
    document = {
        "command": "mc",
        "seed": settings.seed,
        "confidence_sigma": settings.confidence_sigma,
        "all_consistent": all_ok,
        "comparisons": results,
    }
    return render_json(document), code


def cmd_oracle(doc: dict, fmt: str, threads: int, quick: bool = False) -> tuple[str, int]:
    verdicts = run_all(quick=quick)
    passed = all(v.passed for v in verdicts)
    code = EXIT_OK if passed else EXIT_VERDICT
    if fmt == "csv":
        rows = [
            {"check": v.name, "passed": v.passed, "cases": v.cases, "crosschecked": v.crosschecked, "failures": " | ".join(v.failures)}
            for v in verdicts
        ]
        return render_csv(ORACLE_COLUMNS, rows), code
    document = {"command": "oracle", "passed": passed, "checks": [v.to_dict() for v in verdicts]}
    return render_json(document), code


COMMANDS = {
    "evaluate": cmd_evaluate,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "mc": cmd_mc,
    "oracle": cmd_oracle,
}


# -- entry point ------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photonic-repeater",
        description="Analytic model, optimizer and cross-checks for all-photonic quantum repeaters.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "evaluate": "evaluate one protocol configuration",
        "optimize": "minimise the photon cost over a parameter grid",
        "sweep": "optimise every (L, L0) cell of a grid",
        "mc": "compare analytic values with Monte Carlo estimates",
        "oracle": "run the stabilizer checks of the graph-state rules",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", required=name != "oracle", help="config file path or preset name")
        p.add_argument("--out", help="write the output here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), help="output format (default: config output.format or json)")
        p.add_argument("--trials", type=int, help="Monte Carlo trials (overrides mc.trials and mc.repeater_trials)")
        p.add_argument("--seed", type=int, help="Monte Carlo master seed")
        p.add_argument("--threads", type=int, help="worker threads, 0 = one per CPU")
        if name == "oracle":
            p.add_argument("--quick", action="store_true", help="smaller Bell-measurement corpus")
    return parser


def _apply_flags(doc: dict, args: argparse.Namespace) -> dict:
    doc = copy.deepcopy(doc)
    if args.trials is not None or args.seed is not None or args.threads is not None:
        if "mc" in doc or args.command == "mc":
            mc = doc.setdefault("mc", {})
            if args.trials is not None:
                mc["trials"] = args.trials
                if "repeater_trials" in mc:
                    mc["repeater_trials"] = args.trials
            if args.seed is not None:
                mc["seed"] = args.seed
            if args.threads is not None:
                mc["threads"] = args.threads
    if args.format is not None or args.out is not None:
        out = doc.setdefault("output", {})
        if args.format is not None:
            out["format"] = args.format
        if args.out is not None:
            out["path"] = args.out
    return doc


def _report(message: str):
    print(f"photonic-repeater: {message}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is not None:
            raw = cfg.read_config(args.config)
            cfg.validate_document(raw)
        else:
            raw = {}
        if args.threads is not None and args.threads < 0:
            raise cfg.ConfigError("--threads", "must be >= 0")
        doc = _apply_flags(raw, args)
        if doc:
            cfg.check_config(doc, args.command)
        output = doc.get("output", {})
        fmt = output.get("format", "json")
        path = output.get("path")
        threads = cfg.resolve_threads(args.threads if args.threads is not None else 1)
        runner = COMMANDS[args.command]
        kwargs = {"quick": args.quick} if args.command == "oracle" else {}
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            text, code = runner(doc, fmt, threads, **kwargs)
    except cfg.ConfigError as exc:
        _report(f"configuration error at {exc}")
        return EXIT_CONFIG
    except ComputationError as exc:
        _report(f"computation failed in stage '{exc.stage}': {exc}")
        return EXIT_COMPUTATION
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if code == EXIT_VERDICT:
        _report("one or more verdicts failed")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
