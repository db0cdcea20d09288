"""Experiment runner: ``orderless {color,run,oracle,check} ...``.

Every subcommand writes one JSON report with top-level keys ``config``,
``per_trial`` and ``aggregate``.  Rationals are written as strings such as
``"7/2"`` so reports stay exact and byte-stable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .coloring import weighted_defective_coloring, weighted_defect
from .graph import (
    ClauseSet,
    GraphFormatError,
    generate_random_clauses,
    generate_random_graph,
    node_weight,
    parse_clauses,
    parse_graph,
)
from .oracle import BudgetExceeded, brute_force_opt, check_local_delta, check_submodular, max_agree_opt
from .pipelines import PipelineError, approx_cut_det, approx_cut_rand, approx_max2sat, bounds
from .utility import (
    KINDS,
    InstanceError,
    ProblemInstance,
    corrclust_instance,
    dicut_instance,
    kcut_instance,
    make_utility,
    max2sat_instance,
)

SEED_ENV = "ORDERLESS_SEED"
COMMANDS = ("color", "run", "oracle", "check")
ENGINES = ("det", "rand")
_FLAVOR = {"kcut": "undirected", "dicut": "directed", "corrclust2": "signed"}

_FRAC = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}
_STATS = {
    "type": "object",
    "required": ["rounds_used", "max_message_bits", "total_messages", "halted"],
}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "orderless experiment report",
    "type": "object",
    "required": ["config", "per_trial", "aggregate"],
    "additionalProperties": False,
    "properties": {
        "config": {
            "type": "object",
            "required": ["command", "problem", "epsilon", "seed", "trials", "k", "engine", "oracle"],
            "properties": {
                "command": {"enum": list(COMMANDS)},
                "problem": {"enum": list(KINDS)},
                "epsilon": _FRAC,
                "seed": {"type": "integer"},
                "trials": {"type": "integer", "minimum": 1},
                "k": {"type": "integer", "minimum": 2},
                "engine": {"enum": list(ENGINES)},
                "oracle": {"type": "boolean"},
                "input": {"type": ["string", "null"]},
                "gen": {"type": ["array", "null"]},
                "out": {"type": ["string", "null"]},
            },
        },
        "per_trial": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["seed", "node_count"],
                "properties": {
                    "seed": {"type": "integer"},
                    "node_count": {"type": "integer"},
                    "objective": _FRAC,
                    "opt": _FRAC,
                    "ratio": _FRAC,
                    "bounds": {
                        "type": "object",
                        "properties": {"multiplicative": _FRAC, "additive": _FRAC},
                    },
                    "stats": _STATS,
                },
            },
        },
        "aggregate": {
            "type": "object",
            "required": ["trials"],
            "properties": {
                "trials": {"type": "integer"},
                "mean_objective": _FRAC,
                "min_objective": _FRAC,
                "min_ratio": _FRAC,
                "mean_ratio": _FRAC,
                "max_rounds": {"type": "integer"},
                "max_message_bits": {"type": "integer"},
                "all_ok": {"type": "boolean"},
            },
        },
    },
}


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class ExperimentConfig:
    command: str
    problem: str
    epsilon: str = "1/10"
    seed: int = 0
    trials: int = 1
    k: int = 2
    engine: str | None = None
    oracle: bool = False
    input: str | None = None
    gen: tuple[int, float, int] | None = None
    out: str | None = None

    def __post_init__(self):
        if self.engine is None:
            self.engine = "rand" if self.problem == "max2sat" else "det"
        if self.gen is not None:
            self.gen = tuple(self.gen)

    @property
    def eps(self) -> Fraction:
        return Fraction(self.epsilon)

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise ConfigError("command", f"must be one of {COMMANDS}")
        if self.problem not in KINDS:
            raise ConfigError("problem", f"must be one of {KINDS}")
        try:
            eps = Fraction(self.epsilon)
        except (ValueError, ZeroDivisionError):
            raise ConfigError("epsilon", f"not a number: {self.epsilon!r}") from None
        if not 0 < eps < 1:
            raise ConfigError("epsilon", "must lie in (0, 1)")
        self.epsilon = str(eps)
        if self.trials < 1:
            raise ConfigError("trials", "must be at least 1")
        if self.k < 2:
            raise ConfigError("k", "must be at least 2")
        if self.engine not in ENGINES:
            raise ConfigError("engine", f"must be one of {ENGINES}")
        if self.engine == "rand" and self.problem in ("kcut", "corrclust2"):
            raise ConfigError("engine", f"{self.problem} has only the deterministic engine")
        if self.engine == "det" and self.problem == "max2sat":
            raise ConfigError("engine", "max2sat has only the randomized engine")
        if (self.input is None) == (self.gen is None):
            raise ConfigError("input", "give exactly one of --input and --gen")
        if self.gen is not None:
            n, p, w = self.gen
            if n < 1 or not 0 <= p <= 1 or w < 1:
                raise ConfigError("gen", "need n >= 1, 0 <= p <= 1, wmax >= 1")
        elif not Path(self.input).is_file():
            raise ConfigError("input", f"no such file: {self.input}")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gen"] = list(self.gen) if self.gen is not None else None
        return d


# --------------------------------------------------------------------------
# Instances
# --------------------------------------------------------------------------

def _build(problem: str, k: int, graph=None, clauses: ClauseSet | None = None) -> ProblemInstance:
    if problem == "max2sat":
        return max2sat_instance(clauses)
    if problem == "kcut":
        return kcut_instance(graph, k)
    if problem == "dicut":
        return dicut_instance(graph)
    return corrclust_instance(graph)


def load_instance(cfg: ExperimentConfig, trial_seed: int) -> ProblemInstance:
    """The instance for one trial; generated instances use the trial seed."""
    try:
        if cfg.gen is not None:
            n, p, w = cfg.gen
            if cfg.problem == "max2sat":
                return _build(cfg.problem, cfg.k, clauses=generate_random_clauses(n, p, w, trial_seed))
            return _build(cfg.problem, cfg.k, graph=generate_random_graph(n, p, w, _FLAVOR[cfg.problem], trial_seed))
        text = Path(cfg.input).read_text()
        if cfg.problem == "max2sat":
            return _build(cfg.problem, cfg.k, clauses=parse_clauses(text))
        return _build(cfg.problem, cfg.k, graph=parse_graph(text))
    except GraphFormatError as exc:
        where = f" (line {exc.line})" if exc.line is not None else ""
        raise ConfigError("input", f"{exc.args[0]}{where}") from None
    except InstanceError as exc:
        raise ConfigError("problem", str(exc)) from None


# --------------------------------------------------------------------------
# Trials
# --------------------------------------------------------------------------

def _s(x) -> str:
    return str(Fraction(x))


def _opt(inst: ProblemInstance) -> dict:
    res = brute_force_opt(inst)
    out = {
        "opt": _s(res.opt_value),
        "opt_assignment": list(res.opt_assignment),
        "search_space_size": res.search_space_size,
    }
    if inst.kind == "corrclust2" and inst.node_count <= 16:
        out["opt_all_partitions"] = _s(max_agree_opt(inst.graph))
    return out


def _run_trial(cfg: ExperimentConfig, inst: ProblemInstance, seed: int) -> dict:
    if inst.kind == "max2sat":
        assignment, report = approx_max2sat(inst.clauses, cfg.eps, seed)
    elif cfg.engine == "rand":
        assignment, report = approx_cut_rand(inst, cfg.eps, seed)
    else:
        assignment, report = approx_cut_det(inst, cfg.eps)
    row = report.to_dict()
    row["assignment"] = list(assignment.values)
    if cfg.oracle:
        row.update(_opt(inst))
        opt = Fraction(row["opt"])
        row["ratio"] = _s(report.objective / opt if opt else 1)
        row["bounds"] = {name: _s(b) for name, b in bounds(report, opt, inst.k).items()}
    return row


def _color_trial(cfg: ExperimentConfig, inst: ProblemInstance, seed: int) -> dict:
    g = inst.graph
    phi, stats, params = weighted_defective_coloring(g, cfg.eps)
    worst = Fraction(0)
    ok = True
    for v in range(g.node_count):
        d, w = weighted_defect(g, phi, v), node_weight(g, v)
        if d > cfg.eps * w:
            ok = False
        if w:
            worst = max(worst, d / w)
    return {
        "palette_size": phi.palette_size,
        "colors_used": phi.used_colors(),
        "iterations": params.iterations,
        "max_defect_ratio": _s(worst),
        "ok": ok,
        "stats": stats.to_dict(),
    }


def _oracle_trial(cfg: ExperimentConfig, inst: ProblemInstance, seed: int) -> dict:
    return _opt(inst)


def _check_trial(cfg: ExperimentConfig, inst: ProblemInstance, seed: int) -> dict:
    samples = 1000
    u = make_utility(inst)
    utilities = u if isinstance(u, tuple) else (u,)
    reports = [check_local_delta(x, inst, samples, seed) for x in utilities]
    if inst.kind == "dicut":
        reports.append(check_submodular(u, inst, samples, seed))
    return {
        "checks": [r.to_dict() for r in reports],
        "ok": all(r.ok for r in reports),
    }


_TRIALS = {"run": _run_trial, "color": _color_trial, "oracle": _oracle_trial, "check": _check_trial}


def _aggregate(rows: list[dict]) -> dict:
    agg: dict[str, Any] = {"trials": len(rows)}
    objs = [Fraction(r["objective"]) for r in rows if "objective" in r]
    if objs:
        agg["mean_objective"] = _s(sum(objs) / len(objs))
        agg["min_objective"] = _s(min(objs))
    ratios = [Fraction(r["ratio"]) for r in rows if "ratio" in r]
    if ratios:
        agg["mean_ratio"] = _s(sum(ratios) / len(ratios))
        agg["min_ratio"] = _s(min(ratios))
    stats = [r["stats"] for r in rows if "stats" in r]
    if stats:
        agg["max_rounds"] = max(s["rounds_used"] for s in stats)
        agg["max_message_bits"] = max(s["max_message_bits"] for s in stats)
    oks = [r["ok"] for r in rows if "ok" in r]
    if oks:
        agg["all_ok"] = all(oks)
    return agg


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Execute every trial and return the report; trial ``i`` uses seed ``seed + i``."""
    cfg.validate()
    if cfg.command == "color" and cfg.problem == "max2sat":
        raise ConfigError("problem", "color audits graph problems only")
    trial = _TRIALS[cfg.command]
    rows = []
    for i in range(cfg.trials):
        seed = cfg.seed + i
        inst = load_instance(cfg, seed)
        try:
            row = trial(cfg, inst, seed)
        except (PipelineError, BudgetExceeded) as exc:
            raise ConfigError("epsilon" if isinstance(exc, PipelineError) else "gen", str(exc)) from None
        rows.append({**row, "seed": seed, "node_count": inst.node_count})
    return {"config": cfg.to_dict(), "per_trial": rows, "aggregate": _aggregate(rows)}


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary sibling and rename, so readers never see a partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


# --------------------------------------------------------------------------
# Argument parsing
# --------------------------------------------------------------------------

def _gen(text: str) -> tuple[int, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected n,p,wmax")
    try:
        return int(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError("expected n,p,wmax") from None


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError("seed", f"{SEED_ENV}={raw!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orderless", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "color": "audit the weighted defective coloring",
        "run": "run approximation pipelines",
        "oracle": "brute-force optimum",
        "check": "structural property suites",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--problem", required=True, choices=KINDS)
        p.add_argument("--epsilon", default="1/10", help="rational or decimal, e.g. 1/10 or 0.1")
        p.add_argument("--seed", type=int, default=None, help=f"base seed (default ${SEED_ENV} or 0)")
        p.add_argument("--trials", type=int, default=1)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="graph or clause file")
        src.add_argument("--gen", type=_gen, metavar="N,P,WMAX", help="random instance per trial")
        p.add_argument("--k", type=int, default=2, help="parts for kcut")
        p.add_argument("--engine", choices=ENGINES, default=None)
        p.add_argument("--oracle", action="store_true", help="compare against brute force")
        p.add_argument("--out", help="report path (default stdout)")
    return parser


def config_from_args(ns: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        command=ns.command,
        problem=ns.problem,
        epsilon=ns.epsilon,
        seed=ns.seed if ns.seed is not None else _default_seed(),
        trials=ns.trials,
        k=ns.k,
        engine=ns.engine,
        oracle=ns.oracle,
        input=ns.input,
        gen=ns.gen,
        out=ns.out,
    )


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        report = run_experiment(cfg)
    except ConfigError as exc:
        print(f"orderless: error: {exc}", file=sys.stderr)
        return 2
    text = dump_report(report)
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
