"""Experiment sweeps: generate pools, run the suite, persist results.

A sweep is a grid of cells, one per (reserve factor, capacity) pair, with a
fixed number of replicate pools per cell.  Replicate seeds derive from the
master seed through ``numpy.random.SeedSequence(master, spawn_key=(factor
index, capacity index, replicate))``, so cells are independent and the
execution order is irrelevant.  Outputs are deterministic byte for byte;
the only run-dependent value is the timestamp inside the manifest.

Files written to the output directory:

* ``per_instance.csv``: one row per (cell, replicate, algorithm) with the
  metric values, suite-relative ratios, and the selected ids (audit trail);
* ``ratios.csv``: one row per (cell, algorithm, metric) with the average
  and worst-case ratios;
* ``manifest.json``: the full configuration, derived seeds, and per-cell
  reserve totals.
"""

from __future__ import annotations

import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .algorithms import ALGORITHMS
from .datagen import SatGenConfig, gen_instance
from .metrics import METRICS, evaluate, ratio, suite_optimum
from .model import total_reserves

DEFAULT_CAPACITIES = tuple(range(10, 100, 10))
DEFAULT_ALGORITHMS = tuple(ALGORITHMS)

# Reserve-scale factors that hit the commonly studied reserve/capacity
# ratios: the baseline fractions sum to 0.65, so scaling by 2.0 yields
# total reserves of 1.3x the capacity, and so on.
FACTOR_FOR_RESERVE_RATIO = {
    "0.65": "1.0",
    "1.3": "2.0",
    "1.5": "2.3077",
    "1.7": "2.6154",
}

PER_INSTANCE_FIELDS = (
    "psi_factor",
    "qc",
    "replicate",
    "algorithm",
    "p1",
    "p2",
    "p3",
    "p3_min",
    "p3_max",
    "ratio_p1",
    "ratio_p2",
    "ratio_p3",
    "selected",
)
RATIO_FIELDS = ("psi_factor", "qc", "algorithm", "metric", "avg_ratio", "worst_ratio", "n_instances")


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep definition; see the module docstring for the output layout."""

    out_dir: Path
    n_students: int = 100
    capacities: tuple[int, ...] = DEFAULT_CAPACITIES
    psi_factors: tuple[str, ...] = ("1.0",)
    seeds_per_cell: int = 100
    master_seed: int = 1729
    algorithms: tuple[str, ...] = DEFAULT_ALGORITHMS

    def check(self) -> None:
        if self.seeds_per_cell < 1:
            raise ValueError("seeds_per_cell must be >= 1")
        if not self.capacities:
            raise ValueError("no capacities given")
        for qc in self.capacities:
            if not 1 <= qc <= self.n_students:
                raise ValueError(f"capacity {qc} outside [1, {self.n_students}]")
        if not self.psi_factors:
            raise ValueError("no reserve factors given")
        for tag in self.algorithms:
            if tag not in ALGORITHMS:
                raise ValueError(f"unknown algorithm tag {tag!r}")


def derive_seed(master_seed: int, factor_index: int, capacity_index: int, replicate: int) -> int:
    """Replicate seed for one cell position; stable and collision-free."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(factor_index, capacity_index, replicate))
    return int(ss.generate_state(1, np.uint64)[0])


def _cell_rows(args: tuple) -> list[dict]:
    """Run one cell and return its per-instance rows (worker function)."""
    n_students, factor, factor_index, qc, capacity_index, seeds, algorithms = args
    rows: list[dict] = []
    for replicate, seed in enumerate(seeds):
        config = SatGenConfig(capacity=qc, seed=seed, n_students=n_students, psi_factor=factor)
        instance = gen_instance(config)
        values = {}
        selected = {}
        for tag in algorithms:
            outcome = ALGORITHMS[tag](instance)
            values[tag] = evaluate(instance, outcome)
            selected[tag] = outcome.selected
        opts = suite_optimum(values)
        for tag in algorithms:
            v = values[tag]
            rows.append(
                {
                    "psi_factor": factor,
                    "qc": qc,
                    "replicate": replicate,
                    "algorithm": tag,
                    "p1": v.p1,
                    "p2": v.p2,
                    "p3": f"{v.p3:.6f}",
                    "p3_min": f"{v.p3_min:.6f}",
                    "p3_max": f"{v.p3_max:.6f}",
                    "ratio_p1": f"{ratio(v.p1, opts['p1']):.6f}",
                    "ratio_p2": f"{ratio(v.p2, opts['p2']):.6f}",
                    "ratio_p3": f"{ratio(v.p3, opts['p3']):.6f}",
                    "selected": " ".join(map(str, selected[tag])),
                }
            )
    return rows


def _aggregate(rows: Sequence[dict]) -> list[dict]:
    """Collapse per-instance rows into per-cell ratio rows."""
    grouped: dict[tuple, list[dict]] = {}
    order: list[tuple] = []
    for row in rows:
        key = (row["psi_factor"], row["qc"], row["algorithm"])
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append(row)
    out = []
    for key in order:
        factor, qc, tag = key
        cell = grouped[key]
        for metric in METRICS:
            values = [float(r[f"ratio_{metric}"]) for r in cell]
            out.append(
                {
                    "psi_factor": factor,
                    "qc": qc,
                    "algorithm": tag,
                    "metric": metric,
                    "avg_ratio": f"{sum(values) / len(values):.6f}",
                    "worst_ratio": f"{min(values):.6f}",
                    "n_instances": len(values),
                }
            )
    return out


def _write_csv(path: Path, fieldnames: Sequence[str], rows: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)


def run_experiment(spec: ExperimentSpec, jobs: int = 1, progress: bool = True) -> dict[str, Path]:
    """Execute a sweep and write its result files.

    Returns the paths of the written files.  With ``jobs > 1`` cells run in
    separate processes; rows are assembled in cell order either way, so the
    outputs do not depend on the degree of parallelism.
    """
    spec.check()
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    cells = []
    manifest_cells = []
    for fi, factor in enumerate(spec.psi_factors):
        for qi, qc in enumerate(spec.capacities):
            seeds = [derive_seed(spec.master_seed, fi, qi, r) for r in range(spec.seeds_per_cell)]
            cells.append((spec.n_students, factor, fi, qc, qi, seeds, spec.algorithms))
            reserves = total_reserves(
                gen_instance(SatGenConfig(capacity=qc, seed=seeds[0], n_students=spec.n_students, psi_factor=factor))
            )
            manifest_cells.append(
                {"psi_factor": factor, "qc": qc, "total_reserves": reserves, "seeds": seeds}
            )

    rows: list[dict] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, cell_rows in enumerate(pool.map(_cell_rows, cells)):
                rows.extend(cell_rows)
                if progress:
                    print(f"[sweep] cell {i + 1}/{len(cells)} done", file=sys.stderr)
    else:
        for i, cell in enumerate(cells):
            rows.extend(_cell_rows(cell))
            if progress:
                print(f"[sweep] cell {i + 1}/{len(cells)} done", file=sys.stderr)

    per_instance = out_dir / "per_instance.csv"
    ratio_path = out_dir / "ratios.csv"
    manifest_path = out_dir / "manifest.json"
    _write_csv(per_instance, PER_INSTANCE_FIELDS, rows)
    _write_csv(ratio_path, RATIO_FIELDS, _aggregate(rows))
    manifest = {
        "n_students": spec.n_students,
        "capacities": list(spec.capacities),
        "psi_factors": list(spec.psi_factors),
        "seeds_per_cell": spec.seeds_per_cell,
        "master_seed": spec.master_seed,
        "algorithms": list(spec.algorithms),
        "seed_scheme": "numpy SeedSequence(master_seed, spawn_key=(factor_index, capacity_index, replicate))",
        "cells": manifest_cells,
        "package_version": __version__,
        "created_unix": time.time(),
    }
    with open(manifest_path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"per_instance": per_instance, "ratios": ratio_path, "manifest": manifest_path}


def emit_plot_data(results_dir: Path, metric: str, case: str, out_dir: Path | None = None) -> list[Path]:
    """Write one wide plot table per reserve factor found in the results.

    Rows are capacities, columns are algorithms, values are the chosen
    ratio (``case`` is ``avg`` or ``worst``).
    """
    if metric not in METRICS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    if case not in ("avg", "worst"):
        raise ValueError(f"case must be 'avg' or 'worst', got {case!r}")
    results_dir = Path(results_dir)
    ratio_path = results_dir / "ratios.csv"
    if not ratio_path.exists():
        raise FileNotFoundError(f"no ratios.csv under {results_dir}")
    with open(ratio_path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.DictReader(fh) if row["metric"] == metric]
    if not rows:
        raise ValueError(f"no rows for metric {metric!r} in {ratio_path}")

    column = f"{case}_ratio"
    out_dir = Path(out_dir) if out_dir is not None else results_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    factors = sorted({row["psi_factor"] for row in rows})
    for factor in factors:
        subset = [row for row in rows if row["psi_factor"] == factor]
        algorithms = sorted({row["algorithm"] for row in subset}, key=list(ALGORITHMS).index)
        capacities = sorted({int(row["qc"]) for row in subset})
        table = {(int(r["qc"]), r["algorithm"]): r[column] for r in subset}
        path = out_dir / f"plot_{metric}_{case}_psi{factor}.csv"
        out_rows = [
            {"qc": qc, **{a: table[(qc, a)] for a in algorithms}} for qc in capacities
        ]
        _write_csv(path, ["qc", *algorithms], out_rows)
        written.append(path)
    return written
