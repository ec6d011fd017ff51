"""Experiment runner: generate graphs, run a learner behind a fresh oracle,
verify the output and record the query ledger as CSV rows.

Command line::

    python -m cutquery run --algorithm randomized --family erdos_renyi --p 0.1 \\
        --n 64,128,256 --trials 20 --seed 1 --out results.csv
    python -m cutquery fit results.csv cut_queries_total --x nlogn
    python -m cutquery scaling --n 64,128,256 --trials 10 --out scaling.csv
    python -m cutquery verify --quick

``run`` exits with status 0 only if every trial verified.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field, fields
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .deterministic import harvey_baseline, spanning_forest_deterministic
from .graph_core import (
    GraphFamilySpec,
    WeightedGraph,
    generate_graph,
    is_maximal_spanning_forest,
    save_graph,
)
from .oracle import CANONICAL_TAGS, CutOracle
from .randomized import BUDGET_FORMULAS, PhaseConfig, spanning_forest_randomized

log = logging.getLogger(__name__)

ALGORITHMS = ("randomized", "deterministic", "harvey_baseline")


class VerificationError(RuntimeError):
    """A learner returned something that is not a maximal spanning forest."""


def _tag_column(tag: str) -> str:
    return "q_" + tag.replace("-", "_")


@dataclass
class ExperimentConfig:
    algorithm: str = "randomized"
    family: str = "erdos_renyi"
    n_list: list[int] = field(default_factory=lambda: [64])
    p: str = "0.1"
    weights: str = "unit"
    lo: int = 1
    hi: int = 1
    profile: str = "mixed"
    trials: int = 1
    seed: int = 0
    budget_constant: int = 64
    budget_formula: str = "baseline_logn"
    out: str | None = None
    timing: bool = False
    dump_dir: str = "."

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_list:
            raise ValueError("n_list must be nonempty")
        if self.budget_formula not in BUDGET_FORMULAS:
            raise ValueError(f"unknown budget formula {self.budget_formula!r}")
        if self.budget_constant < 1:
            raise ValueError("budget_constant must be >= 1")
        self.family_spec(self.n_list[0], self.seed).validate()

    def edge_probability(self, n: int) -> float:
        """``p`` is a number or ``c/n``."""
        text = str(self.p).strip()
        if text.endswith("/n"):
            return min(1.0, float(text[:-2]) / max(1, n))
        return float(text)

    def family_spec(self, n: int, seed: int) -> GraphFamilySpec:
        return GraphFamilySpec(
            family=self.family,
            n=n,
            weights=self.weights,
            seed=seed,
            p=self.edge_probability(n) if self.family == "erdos_renyi" else None,
            lo=self.lo,
            hi=self.hi,
            profile=self.profile,
        )

    def phase_config(self) -> PhaseConfig:
        return PhaseConfig(self.budget_constant, self.budget_formula)


@dataclass
class ResultRow:
    algorithm: str
    family: str
    n: int
    seed: int
    cut_queries_total: int
    category_counts: dict[str, int]
    phases_run: int
    aborts: int
    sampled_edges_total: int
    components_final: int
    verified: bool
    wall_time: float | None = None
    phase_counts: list[tuple[int, int]] = field(default_factory=list)

    def as_csv_dict(self) -> dict[str, str]:
        out = {
            "algorithm": self.algorithm,
            "family": self.family,
            "n": str(self.n),
            "seed": str(self.seed),
            "cut_queries_total": str(self.cut_queries_total),
        }
        for tag in CANONICAL_TAGS:
            out[_tag_column(tag)] = str(self.category_counts.get(tag, 0))
        out.update(
            phases_run=str(self.phases_run),
            aborts=str(self.aborts),
            sampled_edges_total=str(self.sampled_edges_total),
            components_final=str(self.components_final),
            verified=str(int(self.verified)),
            wall_time="" if self.wall_time is None else f"{self.wall_time:.6f}",
            phase_counts=";".join(f"{a}>{b}" for a, b in self.phase_counts),
        )
        return out


CSV_COLUMNS = (
    ["algorithm", "family", "n", "seed", "cut_queries_total"]
    + [_tag_column(t) for t in CANONICAL_TAGS]
    + ["phases_run", "aborts", "sampled_edges_total", "components_final", "verified", "wall_time", "phase_counts"]
)


def run_trial(cfg: ExperimentConfig, graph: WeightedGraph, seed: int) -> ResultRow:
    oracle = CutOracle(graph)
    started = time.perf_counter()
    phases = aborts = sampled = 0
    phase_counts: list[tuple[int, int]] = []
    if cfg.algorithm == "randomized":
        run = spanning_forest_randomized(oracle, cfg.phase_config(), np.random.default_rng([seed, 1]))
        forest = run.forest
        phases, aborts, sampled = run.phases_run, run.aborts, run.sampled_edges_total
        phase_counts = run.phase_counts
    elif cfg.algorithm == "deterministic":
        forest = spanning_forest_deterministic(oracle).forest
    else:
        forest = harvey_baseline(oracle)
    elapsed = time.perf_counter() - started
    verified = is_maximal_spanning_forest(graph, forest)
    ledger = oracle.ledger
    return ResultRow(
        algorithm=cfg.algorithm,
        family=cfg.family,
        n=graph.n,
        seed=seed,
        cut_queries_total=ledger.cut_total,
        category_counts=dict(ledger.by_category),
        phases_run=phases,
        aborts=aborts,
        sampled_edges_total=sampled,
        components_final=len(forest.components()),
        verified=verified,
        wall_time=elapsed if cfg.timing else None,
        phase_counts=phase_counts,
    )


def _dump_failure(cfg: ExperimentConfig, graph: WeightedGraph, seed: int) -> str:
    os.makedirs(cfg.dump_dir, exist_ok=True)
    path = os.path.join(cfg.dump_dir, f"failure_{cfg.algorithm}_n{graph.n}_seed{seed}.txt")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(save_graph(graph))
    return path


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """``trials * len(n_list)`` verified rows in ``(n, seed)`` order; also
    written to ``cfg.out`` when set."""
    cfg.validate()
    rows = []
    for n in sorted(cfg.n_list):
        for k in range(cfg.trials):
            seed = cfg.seed + k
            graph = generate_graph(cfg.family_spec(n, seed))
            row = run_trial(cfg, graph, seed)
            if not row.verified:
                path = _dump_failure(cfg, graph, seed)
                raise VerificationError(
                    f"{cfg.algorithm} returned a wrong forest on n={n} seed={seed}; graph dumped to {path}"
                )
            log.debug("n=%d seed=%d cut_queries=%d", n, seed, row.cut_queries_total)
            rows.append(row)
    if cfg.out:
        write_csv(rows, cfg.out)
    return rows


def rows_to_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.as_csv_dict())
    return buf.getvalue()


def write_csv(rows: Iterable[ResultRow], path: str) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(rows_to_csv(rows))


def read_csv(path: str) -> list[dict[str, str]]:
    with open(path, "r", encoding="ascii", newline="") as fh:
        return list(csv.DictReader(fh))


# --------------------------------------------------------------------------
# scaling


class ScalingFit(NamedTuple):
    slope: float
    intercept: float


def _records(source) -> list[dict]:
    if isinstance(source, (str, os.PathLike)):
        return read_csv(source)
    out = []
    for r in source:
        out.append(r.as_csv_dict() if isinstance(r, ResultRow) else r)
    return out


def _x_transform(n: np.ndarray, x: str) -> np.ndarray:
    if x == "n":
        return np.log2(n)
    if x == "nlogn":
        return np.log2(n * np.log2(n))
    raise ValueError(f"unknown regressor {x!r}")


def mean_by_n(source, column: str) -> dict[int, float]:
    sums: dict[int, list[float]] = {}
    for rec in _records(source):
        sums.setdefault(int(rec["n"]), []).append(float(rec[column]))
    return {n: float(np.mean(v)) for n, v in sorted(sums.items())}


def fit_scaling(source, column: str, x: str = "n") -> ScalingFit:
    """Least-squares line through ``(log2 x(n), log2 mean(column))``.

    ``x`` is ``"n"`` or ``"nlogn"``.  ``source`` is a CSV path or rows.
    """
    means = mean_by_n(source, column)
    if len(means) < 3:
        raise ValueError("fit_scaling needs at least 3 distinct n values")
    ns = np.array(list(means), dtype=float)
    ys = np.array(list(means.values()), dtype=float)
    if np.any(ys <= 0):
        raise ValueError(f"column {column!r} has a nonpositive mean")
    slope, intercept = np.polyfit(_x_transform(ns, x), np.log2(ys), 1)
    return ScalingFit(float(slope), float(intercept))


SCALING_COLUMNS = [
    "n",
    "trials",
    "mean_cut_queries",
    "queries_per_n",
    "queries_per_nlogn",
    "mean_phases",
    "mean_aborts",
    "mean_sampled_edges",
    "max_phase_ratio",
]


def scaling_report(rows: Sequence[ResultRow]) -> tuple[list[dict[str, str]], dict[str, float]]:
    """Per-size summary with the measured constants, plus the fitted slopes."""
    by_n: dict[int, list[ResultRow]] = {}
    for r in rows:
        by_n.setdefault(r.n, []).append(r)
    table = []
    for n, group in sorted(by_n.items()):
        q = np.mean([r.cut_queries_total for r in group])
        ratios = [b / a for r in group for a, b in r.phase_counts if a]
        table.append(
            {
                "n": str(n),
                "trials": str(len(group)),
                "mean_cut_queries": f"{q:.3f}",
                "queries_per_n": f"{q / n:.6f}",
                "queries_per_nlogn": f"{q / (n * math.log2(n)):.6f}",
                "mean_phases": f"{np.mean([r.phases_run for r in group]):.3f}",
                "mean_aborts": f"{np.mean([r.aborts for r in group]):.3f}",
                "mean_sampled_edges": f"{np.mean([r.sampled_edges_total for r in group]):.3f}",
                "max_phase_ratio": f"{max(ratios):.6f}" if ratios else "",
            }
        )
    fits = {}
    if len(by_n) >= 3:
        fits["slope_vs_n"] = fit_scaling(rows, "cut_queries_total", "n").slope
        fits["slope_vs_nlogn"] = fit_scaling(rows, "cut_queries_total", "nlogn").slope
    return table, fits


def write_scaling_report(rows: Sequence[ResultRow], path: str) -> dict[str, float]:
    table, fits = scaling_report(rows)
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SCALING_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(table)
        for key, value in fits.items():
            fh.write(f"# {key}={value:.6f}\n")
    return fits


# --------------------------------------------------------------------------
# configuration and command line


_CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}


def load_config(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment.  Dashes in keys
    are accepted (``budget-constant``)."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "n":
            key = "n_list"
        if key not in _CONFIG_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(values: dict[str, str]) -> dict:
    conv = {}
    for key, value in values.items():
        if key == "n_list":
            conv[key] = [int(s) for s in str(value).split(",") if s.strip()]
        elif key in ("trials", "seed", "budget_constant", "lo", "hi"):
            conv[key] = int(value)
        elif key == "timing":
            conv[key] = str(value).lower() in ("1", "true", "yes")
        else:
            conv[key] = value
    return conv


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict[str, str] = {}
    if args.config:
        with open(args.config, "r", encoding="ascii") as fh:
            values.update(load_config(fh.read()))
    flags = {
        "algorithm": args.algorithm,
        "family": args.family,
        "n_list": args.n,
        "p": args.p,
        "weights": args.weights,
        "lo": args.lo,
        "hi": args.hi,
        "profile": args.profile,
        "trials": args.trials,
        "seed": args.seed,
        "budget_constant": args.budget_constant,
        "budget_formula": args.budget_formula,
        "out": args.out,
        "dump_dir": args.dump_dir,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    if args.timing:
        values["timing"] = "1"
    cfg = ExperimentConfig(**_coerce(values))
    cfg.validate()
    return cfg


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutquery", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run trials and write a CSV")
    run.add_argument("--config", help="key=value configuration file")
    run.add_argument("--algorithm", choices=ALGORITHMS)
    run.add_argument("--family")
    run.add_argument("--n", help="comma-separated sizes")
    run.add_argument("--p", help="edge probability, a number or c/n")
    run.add_argument("--weights", choices=("unit", "uniform_int", "heavy_tail"))
    run.add_argument("--lo", type=int)
    run.add_argument("--hi", type=int)
    run.add_argument("--profile")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--budget-constant", type=int)
    run.add_argument("--budget-formula", choices=BUDGET_FORMULAS)
    run.add_argument("--out")
    run.add_argument("--dump-dir")
    run.add_argument("--timing", action="store_true", help="fill the wall_time column")

    fit = sub.add_parser("fit", help="log-log slope of a CSV column against n")
    fit.add_argument("csv")
    fit.add_argument("column")
    fit.add_argument("--x", choices=("n", "nlogn"), default="n")

    scaling = sub.add_parser("scaling", help="randomized scaling study on erdos_renyi graphs")
    scaling.add_argument("--n", default="64,128,256,512,1024")
    scaling.add_argument("--trials", type=int, default=50)
    scaling.add_argument("--p", default="0.1")
    scaling.add_argument("--seed", type=int, default=0)
    scaling.add_argument("--out", required=True)
    scaling.add_argument("--rows-out")

    verify = sub.add_parser("verify", help="run the acceptance checks")
    verify.add_argument("--quick", action="store_true", help="smaller corpora")
    verify.add_argument("--out-dir", help="where the scaling check writes its CSV files")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    if args.command == "run":
        try:
            cfg = build_config(args)
        except ValueError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 2
        try:
            rows = run_experiment(cfg)
        except VerificationError as exc:
            print(str(exc), file=sys.stderr)
            return 1
        if not cfg.out:
            sys.stdout.write(rows_to_csv(rows))
        return 0
    if args.command == "fit":
        fit = fit_scaling(args.csv, args.column, args.x)
        print(f"slope={fit.slope:.6f} intercept={fit.intercept:.6f}")
        return 0
    if args.command == "scaling":
        cfg = ExperimentConfig(
            algorithm="randomized",
            family="erdos_renyi",
            n_list=[int(s) for s in args.n.split(",")],
            p=args.p,
            trials=args.trials,
            seed=args.seed,
            out=args.rows_out,
        )
        rows = run_experiment(cfg)
        fits = write_scaling_report(rows, args.out)
        for key, value in fits.items():
            print(f"{key}={value:.4f}")
        return 0
    from .acceptance import verify_suite

    return 0 if verify_suite(quick=args.quick, out_dir=args.out_dir) else 1

