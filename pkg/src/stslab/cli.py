"""Command-line front end.

Subcommands: gen-data, train, evaluate, sop-sweep, misclass-report,
power-check, grad-check. Every command is deterministic for a given
(--config, --seed) pair; CSV outputs carry the config hash and seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .channel import solve_secondary_power
from .config import ExperimentConfig, load_experiment_config
from .dataset import generate_dataset, save_dataset
from .errors import (ConfigError, EmptyDataset, InfeasiblePrimaryConstraint, KMismatch,
                     NonDifferentiableVariant, ParseError, SubsetBudgetExceeded, UnknownScheme)
from .experiments import (confusion_rows, derive_seed, metrics_rows, misclass_rows,
                          run_misclass_study, run_power_check, run_sop_sweep,
                          sop_sweep_rows, train_models_for_point, write_csv, _rng)
from .learners import train_model
from .learners.gradcheck import gradient_check
from .learners.io import load_model, save_model
from .metrics import misclassification_report
from .selection import policy_sop, sop_direct

_CLI_ERRORS = (ConfigError, ParseError, InfeasiblePrimaryConstraint, EmptyDataset,
               KMismatch, UnknownScheme, NonDifferentiableVariant, SubsetBudgetExceeded,
               FileNotFoundError, ValueError)


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True, help="experiment config file")
    sub.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    sub.add_argument("--out", default="out", help="output directory (default: out)")
    sub.add_argument("--models", default=None,
                     help="comma-separated model list (overrides config)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stslab",
                                     description="Secrecy transmitter-selection laboratory")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen-data", help="generate a labeled dataset file")
    _add_common(p)
    p.add_argument("--split", choices=("train", "test"), default="train")
    p.add_argument("--format", choices=("csv", "stsl"), default="csv")

    p = subs.add_parser("train", help="train models and save them")
    _add_common(p)

    p = subs.add_parser("evaluate", help="evaluate saved models on a fresh test set")
    _add_common(p)

    p = subs.add_parser("sop-sweep", help="SOP versus Gamma_T for all models")
    _add_common(p)

    p = subs.add_parser("misclass-report", help="per-class misclassification rates")
    _add_common(p)

    p = subs.add_parser("power-check", help="secondary power solve + Monte Carlo outage check")
    _add_common(p)
    p.add_argument("--mc-samples", type=int, default=1_000_000)

    p = subs.add_parser("grad-check", help="finite-difference check of MLP/LSTM gradients")
    _add_common(p)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--tolerance", type=float, default=1e-4)
    return parser


def _load(args) -> ExperimentConfig:
    ec = load_experiment_config(args.config)
    if args.seed is not None:
        ec.master_seed = args.seed
        ec.train = replace(ec.train, seed=args.seed)
    if args.models is not None:
        ec.models = [m.strip() for m in args.models.split(",") if m.strip()]
        ec = ExperimentConfig(**vars(ec))  # re-validate the model list
    return ec


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen_data(args) -> int:
    ec = _load(args)
    out = _outdir(args)
    m = ec.m_train if args.split == "train" else ec.m_test
    seed = derive_seed(ec.master_seed, "gen", args.split)
    ds = generate_dataset(ec.system, m, seed)
    path = out / f"dataset_{args.split}.{'stsl' if args.format == 'stsl' else 'csv'}"
    save_dataset(ds, path)
    print(f"wrote {path} ({ds.m} samples, K={ds.k})")
    return 0


def cmd_train(args) -> int:
    ec = _load(args)
    out = _outdir(args)
    ds, models = train_models_for_point(ec.system, ec, 0, namespace="train")
    for variant, model in models.items():
        path = out / f"{variant}.stsm"
        save_model(model, path)
        note = f" [{', '.join(sorted(model.notes))}]" if model.notes else ""
        print(f"trained {variant} on {ds.m} samples -> {path}{note}")
    return 0


def cmd_evaluate(args) -> int:
    ec = _load(args)
    out = _outdir(args)
    test_ds = generate_dataset(ec.system, ec.m_test,
                               derive_seed(ec.master_seed, "evaluate", "test-data"))
    metric_rows: list[list[str]] = []
    sop_rows: list[list[str]] = []
    baseline = sop_direct(ec.system, ec.m_test, _rng(ec.master_seed, "evaluate", "sop-conventional"))
    sop_rows.append(["conventional", repr(baseline.value), repr(baseline.stderr)])
    for variant in ec.models:
        model = load_model(out / f"{variant}.stsm")
        report = misclassification_report(model, test_ds)
        metric_rows.extend(metrics_rows(variant, report))
        write_csv(out / f"confusion_{variant}.csv", f"confusion {variant}",
                  [str(c + 1) for c in range(report.n_classes)], confusion_rows(report),
                  ec.config_hash, ec.master_seed)
        est = policy_sop(ec.system, model.predict, ec.m_test,
                         _rng(ec.master_seed, "evaluate", "sop", variant))
        sop_rows.append([variant, repr(est.value), repr(est.stderr)])
        print(f"{variant}: misclassification {report.overall_rate:.4f}, "
              f"SOP {est.value:.4f} (conventional {baseline.value:.4f})")
    write_csv(out / "metrics.csv", "evaluate", ["model", "class", "rate", "stderr", "n_true"],
              metric_rows, ec.config_hash, ec.master_seed)
    write_csv(out / "sop.csv", "evaluate-sop", ["model", "sop", "stderr"],
              sop_rows, ec.config_hash, ec.master_seed)
    print(f"wrote {out / 'metrics.csv'} and {out / 'sop.csv'}")
    return 0


def cmd_sop_sweep(args) -> int:
    ec = _load(args)
    out = _outdir(args)
    path = out / "sop_sweep.csv"
    points = run_sop_sweep(ec, progress=lambda msg: print(msg, flush=True))
    write_csv(path, "sop-sweep", ["gamma_t_db", "model", "sop", "stderr"],
              sop_sweep_rows(ec, points), ec.config_hash, ec.master_seed)
    print(f"wrote {path}")
    return 0


def cmd_misclass_report(args) -> int:
    ec = _load(args)
    out = _outdir(args)
    reports = run_misclass_study(ec)
    path = out / "misclass.csv"
    write_csv(path, "misclass-report", ["model", "class", "rate"],
              misclass_rows(reports), ec.config_hash, ec.master_seed)
    for variant, report in reports.items():
        print(f"{variant}: overall misclassification {report.overall_rate:.4f}")
    print(f"wrote {path}")
    return 0


def cmd_power_check(args) -> int:
    ec = _load(args)
    out = _outdir(args)
    rows = run_power_check(ec, n_samples=args.mc_samples)
    path = out / "power_check.csv"
    write_csv(path, "power-check",
              ["gamma_t_db", "p_s", "feasible", "baseline_outage", "mc_outage",
               "mc_stderr", "phi"], rows, ec.config_hash, ec.master_seed)
    for row in rows:
        status = "feasible" if row[2] == "1" else "INFEASIBLE"
        print(f"gamma_t={row[0]} dB: P_S={row[1]} ({status})")
    print(f"wrote {path}")
    return 0


def cmd_grad_check(args) -> int:
    ec = _load(args)
    out = _outdir(args)
    variants = [m for m in (ec.models if args.models is not None else ["mlp", "lstm"])]
    k = ec.system.k_transmitters
    rows = []
    failed = False
    for variant in variants:
        seed = derive_seed(ec.master_seed, "gradcheck", variant)
        rng = np.random.default_rng(seed)
        if variant == "lstm":
            x = rng.standard_normal((5, k, 4))
        else:
            x = rng.standard_normal((10, 4 * k))
        y = rng.integers(0, k + 1, x.shape[0])
        report = gradient_check(variant, (x, y), step=args.step, tolerance=args.tolerance,
                                tc=ec.train, n_classes=k + 1, seed=seed)
        rows.append([variant, str(report.n_checked), repr(report.max_rel_error),
                     report.worst_param, repr(report.tolerance),
                     "1" if report.passed else "0"])
        print(f"{variant}: max relative error {report.max_rel_error:.3e} over "
              f"{report.n_checked} parameters -> {'PASS' if report.passed else 'FAIL'}")
        failed |= not report.passed
    path = out / "grad_check.csv"
    write_csv(path, "grad-check",
              ["variant", "n_checked", "max_rel_error", "worst_param", "tolerance", "passed"],
              rows, ec.config_hash, ec.master_seed)
    print(f"wrote {path}")
    return 1 if failed else 0


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "sop-sweep": cmd_sop_sweep,
    "misclass-report": cmd_misclass_report,
    "power-check": cmd_power_check,
    "grad-check": cmd_grad_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _CLI_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
