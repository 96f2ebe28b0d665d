"""Experiment orchestration: deterministic seeds, sweeps, CSV emission.

Per-point seeds are derived from the master seed by mixing (sweep index,
purpose tag) through splitmix64, with string tags hashed by FNV-1a. Adding
sweep points therefore never perturbs the seeds of earlier points, and every
command is reproducible byte-for-byte from (config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import solve_secondary_power, primary_outage_mc
from .config import ExperimentConfig, SystemConfig, TrainConfig
from .dataset import Dataset, generate_dataset
from .learners import TrainedModel, train_model
from .metrics import MetricsReport, misclassification_report
from .selection import SopEstimate, policy_sop, sop_direct

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _fnv1a(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & _MASK
    return h


def derive_seed(master: int, *parts: int | str) -> int:
    """64-bit seed from the master seed and (index, tag, ...) components."""
    h = _splitmix64(master & _MASK)
    for part in parts:
        v = _fnv1a(part.encode("utf-8")) if isinstance(part, str) else part & _MASK
        h = _splitmix64(h ^ v)
    return h


def _rng(master: int, *parts: int | str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *parts))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_csv(path, title: str, header: list[str], rows: list[list[str]],
              config_hash: str, seed: int) -> None:
    """CSV with a comment header echoing the config hash and master seed."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# stslab {title}\n")
        fh.write(f"# config_hash={config_hash or 'none'} seed={seed}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


# ---------------------------------------------------------------------------
# Sweeps and studies
# ---------------------------------------------------------------------------

@dataclass
class SweepPoint:
    gamma_t_db: float
    feasible: bool
    conventional: SopEstimate | None
    per_model: dict[str, SopEstimate]


def train_models_for_point(cfg: SystemConfig, ec: ExperimentConfig, point_index: int,
                           namespace: str = "") -> tuple[Dataset, dict[str, TrainedModel]]:
    """Training dataset and trained models for one sweep point, seeded by index."""
    train_ds = generate_dataset(
        cfg, ec.m_train, derive_seed(ec.master_seed, namespace, point_index, "train-data"))
    models: dict[str, TrainedModel] = {}
    for variant in ec.models:
        tc = replace(ec.train, seed=derive_seed(ec.master_seed, namespace, point_index,
                                                "fit", variant))
        models[variant] = train_model(variant, train_ds, tc)
    return train_ds, models


def run_sop_sweep(ec: ExperimentConfig, progress=None) -> list[SweepPoint]:
    """Train the configured models at every sweep point and estimate SOPs.

    Infeasible points are reported with empty estimates; the sweep continues.
    """
    points: list[SweepPoint] = []
    for i, gamma_db in enumerate(ec.sweep_gamma_t_db):
        cfg = ec.system.with_gamma_t_db(gamma_db)
        if progress:
            progress(f"sweep point {i}: gamma_t = {gamma_db:g} dB")
        if not solve_secondary_power(cfg).feasible:
            points.append(SweepPoint(gamma_db, feasible=False, conventional=None, per_model={}))
            continue
        conventional = sop_direct(cfg, ec.m_test, _rng(ec.master_seed, i, "sop-conventional"))
        _, models = train_models_for_point(cfg, ec, i)
        per_model: dict[str, SopEstimate] = {}
        for variant, model in models.items():
            per_model[variant] = policy_sop(cfg, model.predict, ec.m_test,
                                            _rng(ec.master_seed, i, "sop", variant))
        points.append(SweepPoint(gamma_db, feasible=True, conventional=conventional,
                                 per_model=per_model))
    return points


def sop_sweep_rows(ec: ExperimentConfig, points: list[SweepPoint]) -> list[list[str]]:
    """(gamma_t_db, model, sop, stderr) rows; empty fields at infeasible points."""
    rows = []
    for point in points:
        order = ["conventional"] + list(ec.models)
        for name in order:
            if not point.feasible:
                rows.append([_fmt(point.gamma_t_db), name, "", ""])
                continue
            est = point.conventional if name == "conventional" else point.per_model[name]
            rows.append([_fmt(point.gamma_t_db), name, _fmt(est.value), _fmt(est.stderr)])
    return rows


def run_misclass_study(ec: ExperimentConfig) -> dict[str, MetricsReport]:
    """Train every configured model on one dataset at the config's operating
    point and measure per-class misclassification on a fresh test set."""
    cfg = ec.system
    solve_secondary_power(cfg).require_feasible()
    _, models = train_models_for_point(cfg, ec, 0, namespace="misclass")
    test_ds = generate_dataset(
        cfg, ec.m_test, derive_seed(ec.master_seed, "misclass", 0, "test-data"))
    return {variant: misclassification_report(model, test_ds)
            for variant, model in models.items()}


def misclass_rows(reports: dict[str, MetricsReport]) -> list[list[str]]:
    """(model, class, rate) rows; class 'overall' plus one row per label.

    Classes with no test samples serialize as an empty rate (undefined != 0).
    """
    rows = []
    for variant, report in reports.items():
        rows.append([variant, "overall", _fmt(report.overall_rate)])
        for c in range(report.n_classes):
            rate = report.per_class_rate[c]
            rows.append([variant, str(c + 1), "" if rate is None else _fmt(rate)])
    return rows


def run_power_check(ec: ExperimentConfig, n_samples: int = 1_000_000) -> list[list[str]]:
    """(gamma_t_db, p_s, feasible, baseline_outage, mc_outage, mc_stderr, phi) rows."""
    rows = []
    for i, gamma_db in enumerate(ec.sweep_gamma_t_db):
        cfg = ec.system.with_gamma_t_db(gamma_db)
        sol = solve_secondary_power(cfg)
        if sol.feasible:
            outage, stderr = primary_outage_mc(cfg, sol.p_s, n_samples,
                                               _rng(ec.master_seed, i, "power-mc"))
            mc_cols = [_fmt(outage), _fmt(stderr)]
        else:
            mc_cols = ["", ""]
        rows.append([_fmt(gamma_db), _fmt(sol.p_s), "1" if sol.feasible else "0",
                     _fmt(sol.baseline_outage), *mc_cols, _fmt(cfg.phi)])
    return rows


def metrics_rows(variant: str, report: MetricsReport) -> list[list[str]]:
    """(model, class, rate, stderr, n_true) rows for the evaluate command."""
    rows = [[variant, "overall", _fmt(report.overall_rate), _fmt(report.overall_stderr),
             str(report.n_samples)]]
    for c in range(report.n_classes):
        rate = report.per_class_rate[c]
        stderr = report.per_class_stderr[c]
        n_true = int(report.confusion[c].sum())
        rows.append([variant, str(c + 1),
                     "" if rate is None else _fmt(rate),
                     "" if stderr is None else _fmt(stderr),
                     str(n_true)])
    return rows


def confusion_rows(report: MetricsReport) -> list[list[str]]:
    return [[str(int(v)) for v in row] for row in report.confusion]
