"""Command-line front end: check, pin, graph, oracle and bench."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import Optional

from .expr import render
from .network import BooleanNetwork, NetworkError, load_network
from .oracle import DEFAULT_STATE_CAP, is_observable
from .planner import CostWeights, PinningPlan, PlanError, categorize, make_plan
from .synthesis import NEGATIVE, POSITIVE, ControllerError, SynthesisError, synthesize
from .wiring import (
    augment,
    build_wiring_digraph,
    check_P1,
    decompose_into_observed_paths,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNOBSERVABLE = 2

BENCH_FIELDS = [
    "file",
    "n",
    "p",
    "omega",
    "max_out_degree",
    "pins",
    "parse_s",
    "plan_s",
    "synth_s",
    "verify_s",
    "pipeline_s",
    "oracle_s",
]


class _Timer:
    def __init__(self):
        self.stages: dict[str, float] = {}

    def run(self, stage, fn, *args, **kwargs):
        t = time.perf_counter()
        out = fn(*args, **kwargs)
        self.stages[stage] = self.stages.get(stage, 0.0) + time.perf_counter() - t
        return out


def parse_assignment(text: Optional[str]) -> dict[str, bool]:
    """``"CD8=1,CD45=0"`` -> {"CD8": True, "CD45": False}."""
    out: dict[str, bool] = {}
    if not text:
        return out
    for item in text.split(","):
        name, _, value = item.partition("=")
        name, value = name.strip(), value.strip()
        if not name or value not in ("0", "1"):
            raise ValueError(f"bad input assignment {item!r}; expected NAME=0 or NAME=1")
        out[name] = value == "1"
    return out


def memory_estimate(n: int) -> int:
    """Peak bytes for the oracle arrays: successor, outputs, labels, work buffers."""
    return (1 << n) * 8 * 6


def _stats(bn: BooleanNetwork, g) -> dict:
    omega, at = g.max_in_degree()
    out_deg, out_at = g.max_out_degree()
    return {
        "n": bn.n,
        "p": bn.p,
        "inputs": list(bn.inputs),
        "omega": omega,
        "omega_at": at,
        "max_out_degree": out_deg,
        "max_out_degree_at": out_at,
    }


def _oracle_section(bn: BooleanNetwork, cap: int, inputs: dict, timer: _Timer) -> dict:
    n = bn.n
    if n > cap:
        return {
            "run": False,
            "reason": f"skipped: 2^{n} states exceeds the oracle cap of 2^{cap}",
        }
    print(f"oracle: enumerating 2^{n} states, about {memory_estimate(n) / 2**20:.1f} MiB", file=sys.stderr)
    verdict = timer.run("oracle", is_observable, bn, inputs, cap)
    out = {"run": True}
    out.update(verdict.to_dict())
    if verdict.witness is not None:
        names = list(verdict.witness[0])
        out["witness_bits"] = ["".join(str(int(w[k])) for k in names) for w in verdict.witness]
    return out


def _emit(report: dict, fmt: str, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
        return
    stream.write(_as_text(report))


def _as_text(report: dict, indent: str = "") -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, tuple):
            value = list(value)
        if isinstance(value, dict) and not value:
            lines.append(f"{indent}{key}: none")
        elif isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_as_text(value, indent + "  ").rstrip("\n"))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            for item in value:
                body = _as_text(item, indent + "    ").rstrip("\n")
                lines.append(f"{indent}  -" + body[len(indent) + 3 :])
        elif isinstance(value, list):
            lines.append(f"{indent}{key}: " + ", ".join(" -> ".join(v) if isinstance(v, (list, tuple)) else str(v) for v in value))
        else:
            lines.append(f"{indent}{key}: {value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args) -> int:
    timer = _Timer()
    bn = timer.run("parse", load_network, args.file)
    aug = timer.run("augment", augment, bn, args.mode)
    g = build_wiring_digraph(aug)
    bad = check_P1(g)
    decomposition = timer.run("verify", decompose_into_observed_paths, g)
    report = {"file": str(args.file), "network": _stats(aug.network, g), "mode": aug.mode}
    if decomposition is not None:
        structural = "decomposes into observed paths; observable"
    elif bad:
        structural = f"sufficient condition fails (P1 violated at {', '.join(bad)})"
    else:
        structural = "sufficient condition fails (no observed-path decomposition)"
    report["structural"] = {
        "verdict": structural,
        "decomposes": decomposition is not None,
        "p1_violations": bad,
        "paths": [list(g.with_mirror(p)) for p in decomposition] if decomposition else [],
    }
    oracle = _oracle_section(bn, args.oracle_cap, parse_assignment(args.inputs), timer)
    report["oracle"] = oracle
    if oracle.get("run"):
        verdict = "observable" if oracle["observable"] else "unobservable"
    elif decomposition is not None:
        verdict = "observable"
    else:
        verdict = "undetermined"
    report["verdict"] = verdict
    if args.timings:
        report["timings"] = timer.stages
    _emit(report, args.format, sys.stdout)
    return EXIT_OK if verdict == "observable" else EXIT_UNOBSERVABLE


def _plan_for(aug, planner: str, weights: CostWeights) -> PinningPlan:
    g = build_wiring_digraph(aug)
    decomposition = decompose_into_observed_paths(g)
    if decomposition is not None:
        return categorize(aug, decomposition, weights, planner, g=g)
    return make_plan(aug, planner, weights)


def cmd_pin(args) -> int:
    timer = _Timer()
    weights = CostWeights.parse(args.cost)
    bn = timer.run("parse", load_network, args.file)
    aug = timer.run("augment", augment, bn, args.mode)
    g = build_wiring_digraph(aug)
    plan = timer.run("plan", _plan_for, aug, args.planner, weights)
    polarity = NEGATIVE if args.polarity == "negative" else POSITIVE
    pinned = timer.run("synthesize", synthesize, aug, plan, polarity)
    pg = build_wiring_digraph(pinned.augmented)
    report = {"file": str(args.file), "network": _stats(aug.network, g), "mode": aug.mode}
    plan_dict = plan.to_dict(g)
    pins = len(plan.pins)
    plan_dict["pinned_fraction"] = {"pins": pins, "states": aug.network.n, "percent": round(100.0 * pins / aug.network.n, 1)}
    if not plan.pins:
        plan_dict["message"] = "network is observable; no pins required"
    report["plan"] = plan_dict
    report["synthesis"] = [c.to_dict() for c in pinned.controllers]
    report["verification"] = {
        "structural": "decomposes into observed paths",
        "paths": [list(pg.with_mirror(p)) for p in pinned.decomposition],
    }
    report["verification"]["oracle"] = _oracle_section(pinned.network, args.oracle_cap, parse_assignment(args.inputs), timer)
    if args.timings:
        report["timings"] = timer.stages
    if args.out:
        Path(args.out).write_text(pinned.to_bn(), encoding="utf-8")
        report["output"] = str(args.out)
    _emit(report, args.format, sys.stdout)
    oracle = report["verification"]["oracle"]
    if oracle.get("run") and not oracle["observable"]:
        return EXIT_ERROR
    return EXIT_OK


def cmd_graph(args) -> int:
    bn = load_network(args.file)
    aug = augment(bn, args.mode)
    g = build_wiring_digraph(aug)
    plan = None
    if args.planner != "none":
        plan = _plan_for(aug, args.planner, CostWeights.parse(args.cost))
    dot = g.to_dot(plan)
    if args.out:
        Path(args.out).write_text(dot, encoding="utf-8")
    else:
        sys.stdout.write(dot)
    return EXIT_OK


def cmd_oracle(args) -> int:
    timer = _Timer()
    bn = load_network(args.file)
    report = {"file": str(args.file), "n": bn.n, "p": bn.p}
    report["oracle"] = _oracle_section(bn, args.oracle_cap, parse_assignment(args.inputs), timer)
    if args.timings:
        report["timings"] = timer.stages
    _emit(report, args.format, sys.stdout)
    oracle = report["oracle"]
    if not oracle["run"]:
        return EXIT_ERROR
    return EXIT_OK if oracle["observable"] else EXIT_UNOBSERVABLE


def bench_one(path: Path, planner: str, oracle_cap: int, repeats: int = 1) -> dict:
    """Best-of-``repeats`` stage timings for one network."""
    best: dict[str, float] = {}
    row: dict = {}
    for _ in range(repeats):
        timer = _Timer()
        bn = timer.run("parse", load_network, path)
        aug = augment(bn)
        plan = timer.run("plan", _plan_for, aug, planner, CostWeights())
        pinned = timer.run("synth", synthesize, aug, plan)
        timer.run("verify", decompose_into_observed_paths, build_wiring_digraph(pinned.augmented))
        if bn.n <= oracle_cap:
            timer.run("oracle", is_observable, bn, None, oracle_cap)
        for k, v in timer.stages.items():
            best[k] = min(best.get(k, v), v)
        g = build_wiring_digraph(aug)
        row = {
            "file": path.name,
            "n": bn.n,
            "p": bn.p,
            "omega": g.max_in_degree()[0],
            "max_out_degree": g.max_out_degree()[0],
            "pins": len(plan.pins),
        }
    for stage in ("parse", "plan", "synth", "verify"):
        row[f"{stage}_s"] = f"{best[stage]:.6f}"
    row["pipeline_s"] = f"{sum(best[s] for s in ('parse', 'plan', 'synth', 'verify')):.6f}"
    row["oracle_s"] = f"{best['oracle']:.6f}" if "oracle" in best else ""
    return row


def cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    files = sorted(corpus.glob("*.bn"))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_FIELDS, lineterminator="\n")
    writer.writeheader()
    for path in files:
        writer.writerow(bench_one(path, args.planner, args.oracle_cap, args.repeats))
    if args.out:
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bnpin", description="Observability by pinning control of Boolean networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, planner=True, oracle=True):
        p.add_argument("--format", choices=["json", "text"], default="text")
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--collapse", dest="mode", action="store_const", const="collapse")
        mode.add_argument("--augment", dest="mode", action="store_const", const="augment")
        p.set_defaults(mode="collapse")
        if planner:
            p.add_argument("--cost", default="2,1,2", help="weights C1,C2,C3 for pin types 1, 2, 3")
        if oracle:
            p.add_argument("--oracle-cap", type=int, default=DEFAULT_STATE_CAP)
            p.add_argument("--inputs", default=None, help="fixed input values, e.g. CD8=1,CD45=0 (default all 0)")
        p.add_argument("--timings", action="store_true", help="include wall-clock stage timings")

    p = sub.add_parser("check", help="structural and (when small) exact observability check")
    p.add_argument("file")
    common(p, planner=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("pin", help="plan pins, synthesize controllers and write the pinned network")
    p.add_argument("file")
    p.add_argument("--planner", choices=["greedy", "cover"], default="cover")
    p.add_argument("--polarity", choices=["positive", "negative"], default="positive")
    p.add_argument("--out", default=None)
    common(p)
    p.set_defaults(func=cmd_pin)

    p = sub.add_parser("graph", help="wiring digraph as DOT, optionally with a plan overlay")
    p.add_argument("file")
    p.add_argument("--planner", choices=["none", "greedy", "cover"], default="none")
    p.add_argument("--out", default=None)
    common(p, oracle=False)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("oracle", help="exact observability by state-space enumeration")
    p.add_argument("file")
    common(p, planner=False)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="time the pipeline and the oracle over a corpus of .bn files")
    p.add_argument("corpus")
    p.add_argument("--planner", choices=["greedy", "cover"], default="cover")
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_STATE_CAP)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NetworkError, PlanError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ControllerError, SynthesisError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
