"""Command-line entry point: ``repeatergates <command> [--config FILE] [flags]``.

Exit status is 0 on success, 1 when a verification fails or an operation
refuses its input, and 2 for configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds, posver, simulation, timeline
from .config import COMMANDS, FORMATS, ConfigError, RunConfig, build_config, parse_document, parse_value, read_matrix
from .groups import controlled_form_from_unitary, expand_double_group, expand_single_group
from .qudit import QuditState
from .svg import emit_spacetime_svg, rational_text

OUT_DIR_ENV = "REPEATERGATES_OUT"

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


class Outcome:
    def __init__(self):
        self.records: list = []
        self.lines: list = []
        self.status = EXIT_OK

    def add(self, record: dict, line: str | None = None):
        self.records.append(record)
        if line is not None:
            self.lines.append(line)


def plain(value):
    """JSON-friendly value: rationals become "p/q" strings, floats keep 12 significant digits."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return rational_text(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return float(f"{v:.12g}")
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (tuple, list)):
        return [plain(v) for v in value]
    return str(value)


def _text(value) -> str:
    if isinstance(value, Fraction):
        return rational_text(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_text(v) for v in value) + ")"
    return str(value)


def resolve_output(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


# ---------------------------------------------------------------- commands

def _load_state(path: str, dims) -> QuditState:
    sdims, m = read_matrix(Path(path).read_text())
    if m.shape[1] != 1:
        raise ConfigError(f"{path}: an input state needs cols = 1")
    if dims and tuple(dims) != tuple(sdims):
        raise ConfigError(f"{path}: dims {list(sdims)} differ from {list(dims)}")
    return QuditState(tuple(sdims), m[:, 0]).normalized()


def _summary(res: simulation.SimulationResult) -> dict:
    return {"record": "summary", "protocol": res.protocol, "dims": list(res.dims), "trial": res.trial,
            "label": res.label, "passed": res.passed, "min_overlap": res.min_overlap,
            "probability_deviation": res.probability_deviation, "branches": res.branches, "ebits": res.ebits,
            "cbits": res.cbits, "rounds": res.rounds, "single_round": res.single_round}


def cmd_simulate(cfg: RunConfig, out: Outcome):
    protocol = cfg.get("protocol").upper()
    if not protocol.startswith("P"):
        protocol = "P" + protocol
    if protocol not in simulation.PROTOCOLS:
        raise ConfigError(f"unknown protocol {protocol!r}; choose from {', '.join(simulation.PROTOCOLS)}",
                          key="protocol")
    rng = np.random.default_rng(cfg.seed)
    dims = cfg.get("dims")
    if cfg.get("unitary"):
        udims, u = read_matrix(Path(cfg.get("unitary")).read_text())
        dims = dims or udims
        psi = _load_state(cfg.get("input"), dims) if cfg.get("input") else QuditState.random(tuple(dims), rng)
        instances = [simulation.instance_from_unitary(protocol, u, tuple(dims), psi)]
    elif cfg.get("fixture", "random") == "cnot":
        instances = [simulation.named_instance(protocol, "cnot", rng) for _ in range(cfg.get("trials", 1))]
    else:
        if dims:
            simulation.admissible_dims(protocol)
            if tuple(dims) not in simulation.admissible_dims(protocol):
                raise ConfigError(f"{protocol} is not defined at dims {list(dims)}", key="dims")
        dim_list = [tuple(dims)] if dims else list(simulation.admissible_dims(protocol))
        instances = [simulation.random_instance(protocol, d, rng) for d in dim_list
                     for _ in range(cfg.get("trials", 1))]
    trial_of: dict = {}
    for inst in instances:
        trial = trial_of.get(inst.dims, 0)
        trial_of[inst.dims] = trial + 1
        res, run = simulation.execute(inst, trial)
        if len(instances) == 1:
            report = simulation.verify_exactness(run, inst.target, inst.psi)
            for k, rec in enumerate(report.records(run)):
                out.add({"record": "branch", "protocol": protocol, "branch": k, **rec},
                        f"branch {k:4d}  {rec['outcomes']}  p={rec['probability']}  overlap={rec['overlap']}")
        verdict = "PASS" if res.passed else "FAIL"
        out.add(_summary(res),
                f"{verdict} {protocol} dims={list(res.dims)} trial={res.trial} {res.label}: "
                f"min overlap {res.min_overlap:.12f}, probability deviation {res.probability_deviation:.3g}, "
                f"{res.branches} branches, {res.ebits:.6g} ebits, {res.cbits:.6g} cbits, {res.rounds} round(s)")
        if not res.passed:
            out.status = EXIT_FAILED


def _timeline_params(cfg: RunConfig) -> dict:
    params = {}
    dims = cfg.get("dims")
    if dims:
        params["d_a"] = dims[0]
        params["d_b"] = dims[-1]
    for key in ("group_order", "n_control", "ladder_steps"):
        if cfg.get(key) is not None:
            params[key] = cfg.get(key)
    return params


def cmd_timeline(cfg: RunConfig, out: Outcome):
    label = cfg.variant_label()
    variant, reps = timeline.parse_variant(label)
    positions = (0, *(reps or variant.default_positions), 1)
    topo = timeline.LineTopology(positions, cfg.get("offsets", ()))
    params = _timeline_params(cfg)
    try:
        sched, cost = timeline.build_schedule(variant, topo, params=params, redundancy=cfg.get("redundancy", 1))
    except timeline.TimelineError as exc:
        raise ConfigError(str(exc)) from None
    label = variant.label(topo.repeaters)
    path = timeline.critical_path(sched)
    n = topo.n
    for eid, kind, src, dst, s, e, lab in timeline.describe(sched, n):
        out.records.append({"record": "event", "id": eid, "kind": kind, "src": src, "dst": dst, "start": s,
                            "end": e, "label": lab, "critical": eid in path})
    summary = {"record": "timeline", "variant": label, "completion": sched.completion,
               "critical_path": path, "legs": timeline.legs(sched), "photon_legs": cost.photon_legs}
    out.lines.append(f"{label}: completion {rational_text(sched.completion)} (units L/c)")
    out.lines.append("critical path: " + " -> ".join(
        f"{sched.events[k].label}[{timeline.node_name(sched.events[k].src, n)}->"
        f"{timeline.node_name(sched.events[k].dst, n)} {rational_text(sched.starts[k])}..{rational_text(sched.ends[k])}]"
        for k in path))
    if params:
        summary.update({"ebits": cost.ebits, "cbits": cost.cbits, "redundancy": cost.redundancy})
        out.lines.append(f"cost: {cost.ebits:.6g} ebits, {cost.cbits:.6g} cbits, redundancy {cost.redundancy}")
    else:
        out.lines.append("cost: pass dims, group_order or n_control for entanglement counts")
    if cfg.svg:
        target = resolve_output(cfg.svg)
        target.write_text(emit_spacetime_svg(sched, topo))
        summary["svg"] = str(target)
        out.lines.append(f"svg written to {target}")
    out.records.append(summary)


def cmd_optimize(cfg: RunConfig, out: Outcome):
    family = cfg.get("family")
    try:
        placement = bounds.optimize_placement(family, cfg.get("n"), cfg.get("method", "exact"), cfg.get("q"))
    except (bounds.BoundsError, timeline.TimelineError) as exc:
        raise ConfigError(str(exc), key="family") from None
    out.add({"record": "placement", "family": placement.family, "positions": placement.positions,
             "time": placement.time, "method": placement.method, "attained": placement.attained},
            f"{placement.family} [{placement.method}]: positions {_text(placement.positions)} "
            f"time {rational_text(placement.time)}" + ("" if placement.attained else " (infimum, not attained)"))


def cmd_bounds(cfg: RunConfig, out: Outcome):
    max_k = cfg.get("max_k", 3)
    out.lines.append(f"{'quantity':<22}{'K':>3}  {'lower':>8}  {'upper':>8}  status")
    for quantity, k, lower, upper, status in bounds.bounds_table(max_k=max_k):
        out.add({"record": "bound", "quantity": quantity, "K": k, "lower": lower, "upper": upper, "status": status},
                f"{quantity:<22}{k:>3}  {_text(lower) if lower is not None else '-':>8}  {_text(upper):>8}  {status}")


def cmd_posver(cfg: RunConfig, out: Outcome):
    try:
        geom = posver.Geometry2D(cfg.get("verifiers"), cfg.get("prover"), cfg.get("attacker_nodes", ()),
                                 cfg.get("delta", 0))
        if len(geom.verifiers) == 2:
            verdict = posver.two_verifier_verdict(geom, cfg.get("max_attacker_repeaters", 3),
                                                  exact_mode=cfg.get("exact_mode", True))
        else:
            verdict = posver.three_verifier_verdict(geom)
    except posver.GeometryError as exc:
        raise ConfigError(str(exc)) from None
    out.add({"record": "verdict", "secure": verdict.secure, "status": verdict.status,
             "honest_time": verdict.honest_time, "attacker_best_time": verdict.attacker_best_time,
             "margin": verdict.margin, "basis": verdict.basis, "notes": list(verdict.notes),
             "details": verdict.details},
            f"{verdict.status}: honest {_text(verdict.honest_time)}, attacker best {_text(verdict.attacker_best_time)}, "
            f"margin {_text(verdict.margin)}; basis: {verdict.basis}")
    out.lines.extend(f"  note: {n}" for n in verdict.notes)


def cmd_decompose(cfg: RunConfig, out: Outcome):
    _, u = read_matrix(Path(cfg.get("unitary")).read_text())
    dims = cfg.get("dims")
    if len(dims) != 2:
        raise ConfigError("decompose needs dims = [d_a, d_b]", key="dims")
    d_a, d_b = dims
    form = cfg.get("form", "double")
    if form == "double":
        exp = expand_double_group(u, d_a, d_b)
        for line in exp.dump():
            out.add({"record": "coefficient", "form": form, "term": line}, line)
    elif form == "single":
        exp = expand_single_group(u, d_a, d_b)
        for lab, op in zip(exp.rep_A.labels, exp.operators):
            if np.abs(op).max() > 1e-12:
                out.add({"record": "operator", "form": form, "label": list(lab),
                         "norm": float(np.linalg.norm(op))},
                        f"({','.join(map(str, lab))}) -> operator with norm {np.linalg.norm(op):.12g}")
    else:
        cf = controlled_form_from_unitary(u, d_a, d_b)
        for j, (p, v) in enumerate(zip(cf.projectors, cf.targets)):
            rank = int(round(np.trace(p).real))
            out.add({"record": "block", "form": form, "block": j, "rank": rank},
                    f"block {j}: projector rank {rank}, target {np.round(v, 12).tolist()}")


def cmd_report(cfg: RunConfig, out: Outcome):
    out.lines.append(f"{'variant':<24}{'time':>8}")
    for name in timeline.CATALOG:
        sched, _ = timeline.build_schedule(name)
        label = timeline.CATALOG[name].label()
        out.add({"record": "catalog", "variant": label, "completion": sched.completion},
                f"{label:<24}{rational_text(sched.completion):>8}")


DISPATCH = {
    "simulate": cmd_simulate,
    "timeline": cmd_timeline,
    "optimize": cmd_optimize,
    "bounds": cmd_bounds,
    "posver": cmd_posver,
    "decompose": cmd_decompose,
    "report": cmd_report,
}


def render(out: Outcome, fmt: str) -> str:
    if fmt == "human":
        return "".join(line + "\n" for line in out.lines)
    if fmt == "records":
        return "".join(json.dumps(plain(r), sort_keys=True) + "\n" for r in out.records)
    buf = io.StringIO()
    columns = sorted({k for r in out.records for k in r})
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for r in out.records:
        row = {}
        for k, v in plain(r).items():
            row[k] = json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v
        writer.writerow(row)
    return buf.getvalue()


def run(config: RunConfig, stdout=None) -> int:
    """Dispatch ``config``; writes the rendered output and returns the exit status."""
    stdout = stdout or sys.stdout
    out = Outcome()
    DISPATCH[config.command](config, out)
    stdout.write(render(out, config.format))
    return out.status


# ---------------------------------------------------------------- argument parsing

def _as_list(text: str):
    text = text.strip()
    return parse_value(text if text.startswith("[") else f"[{text}]")


FLAGS = {
    # flag -> (config key, converter)
    "seed": ("seed", parse_value),
    "format": ("format", str),
    "svg": ("svg", str),
    "variant": ("variant", str),
    "positions": ("positions", _as_list),
    "offsets": ("offsets", _as_list),
    "dims": ("dims", _as_list),
    "group_order": ("group_order", parse_value),
    "n_control": ("n_control", parse_value),
    "ladder_steps": ("ladder_steps", parse_value),
    "redundancy": ("redundancy", parse_value),
    "protocol": ("protocol", str),
    "fixture": ("fixture", str),
    "trials": ("trials", parse_value),
    "unitary": ("unitary", str),
    "input": ("input", str),
    "family": ("family", str),
    "n": ("n", parse_value),
    "method": ("method", str),
    "q": ("q", parse_value),
    "max_k": ("max_k", parse_value),
    "delta": ("delta", parse_value),
    "form": ("form", str),
}

COMMAND_FLAGS = {
    "simulate": ("protocol", "fixture", "trials", "dims", "unitary", "input"),
    "timeline": ("variant", "positions", "offsets", "dims", "group_order", "n_control", "ladder_steps",
                 "redundancy", "svg"),
    "optimize": ("family", "n", "method", "q"),
    "bounds": ("max_k",),
    "posver": ("delta",),
    "decompose": ("unitary", "dims", "form"),
    "report": (),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repeatergates", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        p = sub.add_parser(command)
        p.add_argument("--config", help="key = value run document")
        p.add_argument("--seed")
        p.add_argument("--format", choices=FORMATS)
        if command == "bounds":
            p.add_argument("--table", action="store_true", help="print the full bounds table (default)")
        for flag in COMMAND_FLAGS[command]:
            p.add_argument("--" + flag.replace("_", "-"), dest=flag)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    nlines = 0
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from None
        raw = parse_document(text)
        nlines = len(text.splitlines())
    for flag in ("seed", "format") + COMMAND_FLAGS[args.command]:
        value = getattr(args, flag, None)
        if value is None:
            continue
        key, convert = FLAGS[flag]
        try:
            raw[key] = (convert(value), None)
        except ConfigError as exc:
            raise ConfigError(f"--{flag.replace('_', '-')}: {exc}", key=key) from None
    if getattr(args, "table", False):
        raw["table"] = (True, None)
    return build_config(raw, args.command, nlines)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        config = config_from_args(args)
        return run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
