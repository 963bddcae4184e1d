"""Single solves by method name, grid sweeps, CSV output and the trade-off plot."""
from __future__ import annotations

import csv
import itertools
import json
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, TextIO

from .gd import GdParams, gd_solve
from .oracles import INSTANCE_KINDS, make_instance
from .recursive import SolveConfig, solve_feasibility
from .report import RunReport

METHODS = ("gd", "vaidya-p1", "recursive-classic", "recursive-regularized", "lsw")
CSV_COLUMNS = ("method", "engine", "d", "p", "eps", "seed", "success", "calls",
               "peakBits", "wallSeconds")


def run_method(method: str, instance, d: int, eps: float, p: int = 1,
               engine: Optional[str] = None, c_scale: float = 1.0,
               trace: Optional[TextIO] = None, max_calls: Optional[int] = None,
               max_seconds: Optional[float] = None) -> RunReport:
    """Dispatch one solve.  ``engine`` may only restate the method's own engine."""
    if method == "gd":
        if engine not in (None, "none"):
            raise ValueError("gd has no cutting-plane engine")
        if p != 1:
            raise ValueError("gd has a single level (p = 1)")
        return gd_solve(instance, GdParams.proof(eps), d)
    implied = {"vaidya-p1": ("classic", 1), "lsw": ("regularized", 1),
               "recursive-classic": ("classic", p), "recursive-regularized": ("regularized", p)}
    if method not in implied:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    own_engine, levels = implied[method]
    if engine is not None and engine != own_engine:
        raise ValueError(f"method {method} runs the {own_engine} engine, not {engine}")
    if method in ("vaidya-p1", "lsw") and p != 1:
        raise ValueError(f"method {method} has a single level (p = 1)")
    config = SolveConfig(d=d, eps=eps, p=levels, engine=own_engine, c_scale=c_scale,
                         max_calls=max_calls, max_seconds=max_seconds)
    return solve_feasibility(instance, config, trace)


@dataclass(frozen=True)
class Cell:
    method: str
    d: int
    eps: float
    p: int


@dataclass
class BenchConfig:
    dims: list = field(default_factory=lambda: [2, 4, 8])
    epsilons: list = field(default_factory=lambda: [0.1, 0.02])
    partitions: list = field(default_factory=lambda: [1, 2])
    methods: list = field(default_factory=lambda: ["gd", "recursive-classic"])
    seeds: int = 3
    instance: str = "ball"
    c_scale: float = 0.05
    max_calls: Optional[int] = 200_000
    max_seconds: Optional[float] = 600.0
    jobs: int = 1

    def __post_init__(self):
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}")
        if self.instance not in INSTANCE_KINDS:
            raise ValueError(f"unknown instance kind {self.instance!r}")

    @classmethod
    def from_json(cls, text: str) -> "BenchConfig":
        return cls(**json.loads(text))

    def cells(self) -> list[Cell]:
        out = []
        for method, d, eps, p in itertools.product(self.methods, self.dims,
                                                   self.epsilons, self.partitions):
            if method in ("gd", "vaidya-p1", "lsw"):
                if p != min(self.partitions):
                    continue
                p = 1
            if p > d:
                raise ValueError(f"cell d={d}, p={p} has more blocks than coordinates")
            if method == "gd" and eps > 1.0 / math.sqrt(d):
                raise ValueError(f"gd cell needs eps <= 1/sqrt(d), got eps={eps}, d={d}")
            out.append(Cell(method, d, eps, p))
        return out


def run_cell(config: BenchConfig, cell: Cell) -> list[RunReport]:
    """Solve every seed of a cell; exceptions become failed reports."""
    reports = []
    for seed in range(config.seeds):
        instance = make_instance(config.instance, cell.d, cell.eps, seed)
        try:
            report = run_method(cell.method, instance, cell.d, cell.eps, cell.p,
                                c_scale=config.c_scale, max_calls=config.max_calls,
                                max_seconds=config.max_seconds)
        except Exception as exc:  # recorded, never aborts the sweep
            engine = {"gd": "none", "vaidya-p1": "classic", "lsw": "regularized"}.get(
                cell.method, cell.method.removeprefix("recursive-"))
            report = RunReport(cell.method, engine, cell.d, cell.p, cell.eps, seed, False,
                               0, 0, 0.0, failure="".join(traceback.format_exception_only(exc)).strip())
        report.method = cell.method
        reports.append(report)
    return reports


def run_bench(config: BenchConfig) -> list[RunReport]:
    cells = config.cells()
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            batches = list(pool.map(run_cell, [config] * len(cells), cells))
    else:
        batches = [run_cell(config, cell) for cell in cells]
    return [r for batch in batches for r in batch]


def _row(report: RunReport) -> list:
    return [report.method, report.engine, report.d, report.p, repr(report.eps), report.seed,
            "true" if report.success else "false", report.calls, report.peak_bits,
            f"{report.wall_seconds:.6f}"]


def emit_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(_row(r) for r in reports)


def read_csv(path) -> list[RunReport]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [RunReport(method=r["method"], engine=r["engine"], d=int(r["d"]), p=int(r["p"]),
                      eps=float(r["eps"]), seed=int(r["seed"]), success=r["success"] == "true",
                      calls=int(r["calls"]), peak_bits=int(r["peakBits"]),
                      wall_seconds=float(r["wallSeconds"])) for r in rows]


def write_bench(reports, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(reports, out / "results.csv")
    with open(out / "reports.jsonl", "w") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def emit_tradeoff_plot(reports, path) -> None:
    """Log-log scatter of oracle calls against modeled peak bits, one colour per method."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "memcut"
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for method in METHODS:
        pts = [(r.peak_bits, r.calls) for r in reports
               if r.method == method and r.success and r.calls > 0 and r.peak_bits > 0]
        if pts:
            xs, ys = zip(*pts)
            ax.scatter(xs, ys, label=method, s=18)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("modeled peak memory (bits)")
    ax.set_ylabel("oracle calls")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if str(path).endswith(".svg") else None)
    plt.close(fig)
