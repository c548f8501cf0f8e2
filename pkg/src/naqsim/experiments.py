"""Batch drivers behind the command-line interface: trajectories, sweeps, verification.

Every output file is plain CSV with floats written to 17 significant digits,
so reruns with the same configuration produce byte-identical files.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import NamedTuple

from . import __version__
from .config import ExperimentConfig, lambda_over_gamma, serialize, with_field, with_kappa
from .generator import build_context
from .integrator import RECORD_FIELDS, IntegratorConfig, evolve
from .observables import steady_state_summary
from .operators import SystemParams, initial_plus_product
from .verify import CheckResult, run_checks


class SweepRow(NamedTuple):
    kappa: float
    lambda_over_gamma: float
    c_ss: float
    c_max: float
    purity_ss: float
    entropy_ss: float
    min_eig_global: float


def fmt(x) -> str:
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def kappa_tag(kappa: float) -> str:
    return f"{kappa:g}".replace(".", "p").replace("-", "m")


def write_metadata(out: Path, cfg: ExperimentConfig, extra: dict | None = None) -> Path:
    meta = {
        "package_version": __version__,
        "mode": cfg.mode,
        "entropy_base": "e",
        "steady_state_time": cfg.steady_state_time,
        "config": serialize(cfg),
    }
    if extra:
        meta.update(extra)
    path = out / "metadata.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def run_trajectory(system: SystemParams, integ: IntegratorConfig):
    return evolve(initial_plus_product(), build_context(system), integ)


def _sweep_point(args) -> SweepRow:
    system, integ, t_eval, kappa = args
    p = with_kappa(system, kappa)
    recs = run_trajectory(p, integ)
    s = steady_state_summary(recs, t_eval)
    return SweepRow(
        kappa=kappa,
        lambda_over_gamma=lambda_over_gamma(p, kappa),
        c_ss=s.c_ss,
        c_max=s.c_max,
        purity_ss=s.purity_ss,
        entropy_ss=s.entropy_ss,
        min_eig_global=min(r.min_eig for r in recs),
    )


def _field_point(args) -> float:
    system, integ, t_eval, h, kappa = args
    p = with_kappa(with_field(system, h), kappa)
    return steady_state_summary(run_trajectory(p, integ), t_eval).c_ss


def _map(fn, tasks, workers: int):
    """Ordered map; results come back in task order whatever the worker count."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def run_simulate(cfg: ExperimentConfig, out: Path) -> list[Path]:
    integ = cfg.integrator
    paths = []
    for kappa in cfg.kappa_list:
        recs = run_trajectory(with_kappa(cfg.system, kappa), integ)
        paths.append(write_csv(out / f"trajectory_kappa{kappa_tag(kappa)}.csv", RECORD_FIELDS, recs))
    paths.append(write_metadata(out, cfg))
    return paths


def sweep_kappa(cfg: ExperimentConfig, workers: int = 1) -> list[SweepRow]:
    integ = cfg.integrator
    tasks = [(cfg.system, integ, cfg.steady_state_time, k) for k in cfg.kappa_list]
    return _map(_sweep_point, tasks, workers)


def run_sweep_kappa(cfg: ExperimentConfig, out: Path, workers: int = 1) -> list[Path]:
    rows = sweep_kappa(cfg, workers)
    return [
        write_csv(out / "sweep_kappa.csv", SweepRow._fields, rows),
        write_metadata(out, cfg),
    ]


def sweep_field(cfg: ExperimentConfig, workers: int = 1) -> list[list[float]]:
    """c_ss table indexed [field][kappa]."""
    integ = cfg.integrator
    tasks = [
        (cfg.system, integ, cfg.steady_state_time, h, k)
        for h in cfg.field_grid
        for k in cfg.kappa_list
    ]
    flat = _map(_field_point, tasks, workers)
    nk = len(cfg.kappa_list)
    return [flat[i * nk:(i + 1) * nk] for i in range(len(cfg.field_grid))]


def field_argmax(grid, table) -> list[float]:
    """Per kappa column, the first field value attaining the maximum c_ss."""
    out = []
    for j in range(len(table[0])):
        col = [row[j] for row in table]
        out.append(grid[max(range(len(col)), key=lambda i: (col[i], -i))])
    return out


def run_sweep_field(cfg: ExperimentConfig, out: Path, workers: int = 1) -> list[Path]:
    table = sweep_field(cfg, workers)
    header = ["h_over_J"] + [f"c_ss_kappa{kappa_tag(k)}" for k in cfg.kappa_list]
    rows = [[h, *vals] for h, vals in zip(cfg.field_grid, table)]
    rows.append(["argmax", *field_argmax(cfg.field_grid, table)])
    return [write_csv(out / "sweep_field.csv", header, rows), write_metadata(out, cfg)]


def verify(cfg: ExperimentConfig, include_reference: bool = True) -> list[CheckResult]:
    return run_checks(seed=cfg.seed, include_reference=include_reference)


def run_verify(cfg: ExperimentConfig, out: Path, include_reference: bool = True):
    results = verify(cfg, include_reference)
    rows = [(r.name, "pass" if r.passed else "FAIL", r.residual) for r in results]
    paths = [write_csv(out / "verify_report.csv", ("name", "status", "residual"), rows), write_metadata(out, cfg)]
    return results, paths


GNUPLOT_TEMPLATES = {
    "simulate": """set datafile separator ','
set key autotitle columnhead
set xlabel 't'
set ylabel 'concurrence'
plot {plots}
""",
    "sweep-kappa": """set datafile separator ','
set key autotitle columnhead
set xlabel 'kappa'
plot 'sweep_kappa.csv' using 1:3 with linespoints, '' using 1:4 with linespoints
""",
    "sweep-field": """set datafile separator ','
set key autotitle columnhead
set xlabel 'h/J'
set ylabel 'C_ss'
plot for [i=2:{ncols}] '< head -n -1 sweep_field.csv' using 1:i with linespoints
""",
}


def gnuplot_script(cfg: ExperimentConfig) -> str:
    if cfg.mode == "simulate":
        plots = ", ".join(
            f"'trajectory_kappa{kappa_tag(k)}.csv' using 1:7 with lines title 'kappa={k:g}'"
            for k in cfg.kappa_list
        )
        return GNUPLOT_TEMPLATES["simulate"].format(plots=plots)
    if cfg.mode == "sweep-field":
        return GNUPLOT_TEMPLATES["sweep-field"].format(ncols=len(cfg.kappa_list) + 1)
    if cfg.mode == "sweep-kappa":
        return GNUPLOT_TEMPLATES["sweep-kappa"]
    raise ValueError(f"no plot template for mode {cfg.mode!r}")
