"""Sparse-noise recovery sweeps: least-squares versus least-absolute-value.

An instance draws a standard Gaussian ground truth ``y``, forms the rank-one
matrix ``outer(y, y)``, and *replaces* a chosen number of uniformly selected
entries with large Gaussian noise.  A sweep solves every (mode, noise-count,
trial) cell with the stochastic heavy-ball solver and scores a trial as a
success when the recovered vector is within the relative-error threshold of
the truth (up to sign).  All randomness is pre-assigned per trial from
``(seed, mode, noisy_count, trial)``, so results are bit-reproducible and
independent of execution order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import csv
import json

import numpy as np

from .objectives import DenseTarget
from .solvers import SolverConfig, relative_error, sgd_momentum

MODES = ("l1", "l2")

CSV_HEADER = ("mode", "n", "num_noisy", "trials", "successes", "rate", "mean_rel_err")


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    noisy_counts: tuple
    noise_std: float = 10.0
    trials: int = 100
    solver: SolverConfig = field(default_factory=SolverConfig)
    modes: tuple = MODES
    seed: int = 0
    success_threshold: float = 0.1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be an integer >= 1")
        counts = tuple(int(k) for k in self.noisy_counts)
        if list(counts) != sorted(counts):
            raise ValueError("noisy_counts must be sorted")
        for k in counts:
            if not (0 <= k <= self.n * self.n):
                raise ValueError(f"noisy count {k} outside [0, n^2]")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be an integer >= 1")
        modes = tuple(str(m).lower() for m in self.modes)
        for m in modes:
            if m not in MODES:
                raise ValueError(f"unknown mode {m!r}")
        if self.success_threshold <= 0:
            raise ValueError("success_threshold must be > 0")
        object.__setattr__(self, "noisy_counts", counts)
        object.__setattr__(self, "modes", modes)


@dataclass(frozen=True)
class CellResult:
    successes: int
    rate: float
    mean_rel_err: float
    errors: tuple


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    cells: dict

    def rows(self):
        for mode in self.config.modes:
            for k in self.config.noisy_counts:
                cell = self.cells[(mode, k)]
                yield (
                    mode,
                    self.config.n,
                    k,
                    self.config.trials,
                    cell.successes,
                    cell.rate,
                    cell.mean_rel_err,
                )


def generate_instance(n: int, num_noisy: int, noise_std: float, rng) -> tuple:
    """Draw ``y ~ N(0, I_n)`` and the observed matrix with ``num_noisy``
    distinct entries replaced (not added to) by ``N(0, noise_std^2)`` draws.

    Entries (i, j) and (j, i) are drawn independently; positions are chosen
    uniformly from all n^2 cells.
    """
    if not (0 <= num_noisy <= n * n):
        raise ValueError(f"num_noisy must lie in [0, {n * n}]")
    y = rng.standard_normal(n)
    b = np.outer(y, y)
    if num_noisy > 0:
        flat = rng.choice(n * n, size=num_noisy, replace=False)
        b.ravel()[flat] = rng.normal(0.0, noise_std, size=num_noisy)
        mask = frozenset((int(f) // n, int(f) % n) for f in flat)
    else:
        mask = frozenset()
    return y, DenseTarget(entries=b, noise_mask=mask)


def _run_trial(config: ExperimentConfig, mode: str, num_noisy: int, trial: int) -> float:
    mode_code = MODES.index(mode)
    seq = np.random.SeedSequence([config.seed, mode_code, num_noisy, trial])
    rng = np.random.default_rng(seq)
    y, target = generate_instance(config.n, num_noisy, config.noise_std, rng)
    solver_cfg = replace(config.solver, seed=int(rng.integers(2**62)))
    trace = sgd_momentum(target, mode, solver_cfg, truth=y)
    return relative_error(trace.final_point, y, 2)


def run_sweep(config: ExperimentConfig, threads: int = 1, progress=None) -> ExperimentResult:
    """Run every (mode, noisy_count) cell for ``config.trials`` trials.

    ``progress`` may be a callable taking (done, total).  Deterministic for a
    fixed config regardless of ``threads``.
    """
    jobs = [
        (mode, k, t)
        for mode in config.modes
        for k in config.noisy_counts
        for t in range(config.trials)
    ]
    errors = {}

    def work(job):
        mode, k, t = job
        return job, _run_trial(config, mode, k, t)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for i, (job, err) in enumerate(pool.map(work, jobs)):
                errors[job] = err
                if progress:
                    progress(i + 1, len(jobs))
    else:
        for i, job in enumerate(jobs):
            errors[job] = work(job)[1]
            if progress:
                progress(i + 1, len(jobs))

    cells = {}
    for mode in config.modes:
        for k in config.noisy_counts:
            errs = tuple(errors[(mode, k, t)] for t in range(config.trials))
            successes = sum(1 for e in errs if e < config.success_threshold)
            cells[(mode, k)] = CellResult(
                successes=successes,
                rate=successes / config.trials,
                mean_rel_err=float(np.mean(errs)),
                errors=errs,
            )
    return ExperimentResult(config=config, cells=cells)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def export_csv(result: ExperimentResult, path) -> None:
    """One row per (mode, noisy_count); floats carry 17 significant digits so
    a re-import round-trips exactly."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in result.rows():
            writer.writerow([_fmt(v) for v in row])


def read_csv(path) -> list:
    """Inverse of ``export_csv``: typed rows in file order."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}")
        for rec in reader:
            out.append(
                (
                    rec["mode"],
                    int(rec["n"]),
                    int(rec["num_noisy"]),
                    int(rec["trials"]),
                    int(rec["successes"]),
                    float(rec["rate"]),
                    float(rec["mean_rel_err"]),
                )
            )
    return out


def export_json(result: ExperimentResult, path) -> None:
    """JSON mirror of the result, per-trial errors included."""
    payload = {
        "n": result.config.n,
        "noise_std": result.config.noise_std,
        "trials": result.config.trials,
        "seed": result.config.seed,
        "success_threshold": result.config.success_threshold,
        "cells": [
            {
                "mode": mode,
                "num_noisy": k,
                "successes": cell.successes,
                "rate": cell.rate,
                "mean_rel_err": cell.mean_rel_err,
                "errors": list(cell.errors),
            }
            for (mode, k), cell in sorted(result.cells.items())
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
