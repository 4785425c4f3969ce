"""Command-line front-end: train / eval / predict.

Each stage is its own subcommand so a calibrated model can be reused across
sweeps. Every file written embeds the resolved configuration and seed.
Exit codes: 0 on success, 2 on bad inputs or unreadable files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from .conformal import THREADS_ENV, set_threshold
from .dataset import CsvFormatError, SplitSpec, load_csv, split
from .evaluation import accuracy_of, default_grid, sweep_significance
from .genetic import GAConfig
from .intervals import OrderParams, geq_mask
from .partitions import DEFAULT_LOWER_CAP
from .pipeline import load_model, save_model, train_model
from .rules import classify_pairs


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conformal-frbc",
        description="Fuzzy rule-based classifiers with conformal prediction sets.",
        epilog=f"The {THREADS_ENV} environment variable caps internal parallelism.")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train a model and write it as JSON")
    _add_data_flags(train)
    train.add_argument("--kind", choices=["t1", "ivt2"], default="t1",
                       help="type-1 (scalar) or interval-valued type-2 memberships")
    train.add_argument("--test-fraction", type=float, default=0.2,
                       help="held-out fraction excluded from training (default 0.2)")
    train.add_argument("--folds", type=int, default=5,
                       help="calibration folds for cross-conformal scoring (default 5)")
    train.add_argument("--ga-config", default=None, metavar="FILE",
                       help="JSON file with genetic-search settings; explicit flags override it")
    train.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    train.add_argument("--generations", type=int, default=None, help="default 50")
    train.add_argument("--population", type=int, default=None, help="default 30")
    train.add_argument("--mutation-rate", type=float, default=None, help="default 0.1")
    train.add_argument("--crossover-rate", type=float, default=None, help="default 0.9")
    train.add_argument("--tournament-size", type=int, default=None, help="default 3")
    train.add_argument("--max-rules", type=int, default=None, help="default 15")
    train.add_argument("--max-antecedents", type=int, default=None, help="default 3")
    train.add_argument("--penalty-weight", type=float, default=None,
                       help="weight of the prediction-set-size penalty "
                            "(default 0 disables it, 0.01 typical)")
    train.add_argument("--raw-penalty", action="store_const", const=True, default=None,
                       help="use the unnormalized penalty sum instead of the scale-free form")
    train.add_argument("--lower-cap", type=float, default=DEFAULT_LOWER_CAP,
                       help="lower-membership cap for ivt2 (default 0.8)")
    _add_order_flags(train)
    train.add_argument("--out", required=True, help="output model path (JSON)")

    ev = sub.add_parser("eval", help="evaluate a model: summary JSON + sweep CSV")
    ev.add_argument("--model", required=True)
    _add_data_flags(ev)
    ev.add_argument("--test-fraction", type=float, default=None,
                    help="re-split fraction (default: the value echoed in the model)")
    ev.add_argument("--seed", type=int, default=None,
                    help="split seed (default: the seed echoed in the model)")
    ev.add_argument("--grid", type=str, default=None,
                    help="comma-separated significance levels (default 0.05..0.95 step 0.05)")
    ev.add_argument("--significance", type=float, default=None,
                    help="evaluate a single level instead of the grid")
    ev.add_argument("--out", required=True, help="output directory")

    pred = sub.add_parser("predict", help="emit per-row prediction sets as JSON lines")
    pred.add_argument("--model", required=True)
    _add_data_flags(pred)
    pred.add_argument("--significance", type=float, default=0.1)
    return parser


def _add_data_flags(cmd):
    cmd.add_argument("--data", required=True, help="CSV file with a header row")
    cmd.add_argument("--label", default=None,
                     help="label column name (default: last column)")


def _add_order_flags(cmd):
    cmd.add_argument("--order-alpha", type=float, default=0.5,
                     help="primary projection of the interval order (default 0.5)")
    cmd.add_argument("--order-beta", type=float, default=1.0,
                     help="tie-break projection of the interval order (default 1.0)")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            return _cmd_train(args)
        if args.command == "eval":
            return _cmd_eval(args)
        return _cmd_predict(args)
    except (CsvFormatError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _load(args):
    if not os.path.exists(args.data):
        raise FileNotFoundError(f"dataset file not found: {args.data}")
    return load_csv(args.data, args.label)


def _resolve_ga_config(args) -> GAConfig:
    """Flags beat the --ga-config file, which beats the GAConfig defaults."""
    resolved = {}
    if args.ga_config:
        with open(args.ga_config, encoding="utf-8") as fh:
            from_file = json.load(fh)
        unknown = set(from_file) - set(GAConfig.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown keys in {args.ga_config}: {sorted(unknown)}")
        resolved.update(from_file)
    flag_map = {
        "population_size": args.population, "generations": args.generations,
        "mutation_rate": args.mutation_rate, "crossover_rate": args.crossover_rate,
        "tournament_size": args.tournament_size, "max_rules": args.max_rules,
        "max_antecedents": args.max_antecedents, "penalty_weight": args.penalty_weight,
        "raw_penalty": args.raw_penalty, "seed": args.seed,
    }
    resolved.update({k: v for k, v in flag_map.items() if v is not None})
    return GAConfig(**resolved)


def _cmd_train(args) -> int:
    data = _load(args)
    ga = _resolve_ga_config(args)
    split_spec = SplitSpec(args.test_fraction, args.folds, ga.seed)
    order = OrderParams(args.order_alpha, args.order_beta)
    echo = {
        "data": args.data, "label": args.label, "kind": args.kind,
        "lower_cap": args.lower_cap, "seed": ga.seed,
        "split": {"test_fraction": split_spec.test_fraction,
                  "calibration_folds": split_spec.calibration_folds,
                  "seed": split_spec.seed},
        "order": {"alpha": order.alpha, "beta": order.beta},
        "ga": ga.to_json(),
    }
    train_raw, _, folds = split(data, split_spec)
    model = train_model(train_raw, folds, kind=args.kind, lower_cap=args.lower_cap,
                        ga_config=ga, order=order, config_echo=echo)
    _atomic_write(args.out, lambda tmp: save_model(model, tmp))
    print(model.rulebase.describe())
    print(f"model written to {args.out} "
          f"({len(model.rulebase.rules)} rules, {model.calibration.n} calibration scores)")
    return 0


def _cmd_eval(args) -> int:
    model = load_model(args.model)
    data = _load(args)
    if data.n_features != model.n_features:
        raise ValueError(f"model expects {model.n_features} features, "
                         f"dataset has {data.n_features}")
    split_echo = model.config.get("split", {})
    spec = SplitSpec(
        args.test_fraction if args.test_fraction is not None else split_echo.get("test_fraction", 0.2),
        split_echo.get("calibration_folds", 5),
        args.seed if args.seed is not None else split_echo.get("seed", 0))
    _, test_raw, _ = split(data, spec)
    test = test_raw.with_features(model.norm.apply(test_raw.features))

    if args.significance is not None:
        grid = [args.significance]
    elif args.grid is not None:
        grid = [float(g) for g in args.grid.split(",") if g.strip()]
    else:
        grid = default_grid()

    echo = {"model": args.model, "data": args.data, "grid": grid,
            "split": {"test_fraction": spec.test_fraction, "seed": spec.seed},
            "model_config": model.config}
    result = sweep_significance(model.rulebase, model.calibration, test, grid, config=echo)
    summary = {
        "dataset": args.data,
        "kind": model.kind,
        "accuracy": accuracy_of(model.rulebase, test, model.order),
        "n_test": test.n_instances,
        "min_level_all_nonempty": result.min_level_all_nonempty,
        "config": echo,
    }
    os.makedirs(args.out, exist_ok=True)
    sweep_path = os.path.join(args.out, "sweep.csv")
    summary_path = os.path.join(args.out, "summary.json")
    _atomic_write(sweep_path, result.write_csv)
    _atomic_write(summary_path, lambda tmp: _dump_json(summary, tmp))
    print(f"wrote {summary_path} and {sweep_path}")
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    data = _load_features(args, model)
    scores, assoc = model.class_score_pairs(data)
    predictions = classify_pairs(scores, model.order)
    t = set_threshold(model.calibration, args.significance)
    t_arr = np.array([t.lower, t.upper])
    set_masks = geq_mask(scores, t_arr, model.order)
    rule_masks = geq_mask(assoc, t_arr, model.order)
    names = model.rulebase.class_names or [str(c) for c in range(model.rulebase.n_classes)]
    for i in range(scores.shape[0]):
        winner = int(predictions[i])
        record = {
            "row": i,
            "winner": names[winner] if winner >= 0 else None,
            "prediction_set": [names[c] for c in np.flatnonzero(set_masks[i])],
            "rules": np.flatnonzero(rule_masks[i]).tolist(),
            "class_scores": {names[c]: scores[i, c].tolist()
                             for c in range(scores.shape[1])},
            "significance": args.significance,
        }
        print(json.dumps(record))
    return 0


def _load_features(args, model) -> np.ndarray:
    """Feature matrix from a CSV that may or may not still carry the label column."""
    if not os.path.exists(args.data):
        raise FileNotFoundError(f"dataset file not found: {args.data}")
    import csv as _csv
    with open(args.data, newline="", encoding="utf-8") as fh:
        rows = [row for row in _csv.reader(fh) if row]
    header = [h.strip() for h in rows[0]]
    feature_names = model.rulebase.feature_names or []
    drop = None
    if args.label and args.label in header:
        drop = header.index(args.label)
    elif len(header) == model.n_features + 1 and feature_names and header[:-1] == feature_names:
        drop = len(header) - 1
    keep = [j for j in range(len(header)) if j != drop]
    if len(keep) != model.n_features:
        raise ValueError(f"model expects {model.n_features} features, file has {len(keep)} columns")
    try:
        X = np.array([[float(row[j]) for j in keep] for row in rows[1:]], dtype=np.float64)
    except (ValueError, IndexError) as exc:
        raise CsvFormatError(f"{args.data}: {exc}") from None
    return X


def _dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _atomic_write(path, writer) -> None:
    """Write through a temp file and rename, so failures leave no partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


if __name__ == "__main__":
    sys.exit(main())
