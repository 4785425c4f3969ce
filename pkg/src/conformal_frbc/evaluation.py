"""Accuracy summaries and significance-level sweeps of conformal predictions.

The sweep walks a grid of significance levels and reports, per level, the
mean and std of prediction-set size, the fraction of non-empty sets, the
empirical coverage of the true class, and rule-wise precision/recall/F1
where a rule "predicts" its consequent class whenever it survives the
rule-wise conformal cut. Results serialize to CSV (one row per level) and
JSON (full document); both embed the configuration that produced them.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .conformal import ConformalCalibration, prediction_set_masks, set_threshold
from .dataset import Dataset, SplitSpec, normalize, split
from .genetic import GAConfig, evolve
from .intervals import OrderParams, geq_mask
from .partitions import DEFAULT_LOWER_CAP, build_partitions
from .rules import RuleBase, classify_pairs, evaluate_pairs

RULE_FN_DEFINITION = ("FN counts samples whose true class matches the rule's consequent "
                      "while the rule is absent from the conformal rule set")


def default_grid() -> list[float]:
    """Significance levels 0.05, 0.10, ..., 0.95."""
    return [round(0.05 * i, 10) for i in range(1, 20)]


@dataclass(frozen=True)
class RunSummary:
    """Mean/std accuracy over repeated train/evaluate cycles."""

    dataset_name: str
    kind: str
    accuracy: float
    accuracy_std: float
    per_run: list[float]
    no_coverage_rate: float
    config: dict = field(default_factory=dict)

    @property
    def repeats(self) -> int:
        return len(self.per_run)

    def to_json(self) -> dict:
        return {
            "dataset": self.dataset_name,
            "kind": self.kind,
            "accuracy": self.accuracy,
            "accuracy_std": self.accuracy_std,
            "per_run_accuracy": self.per_run,
            "repeats": self.repeats,
            "no_coverage_rate": self.no_coverage_rate,
            "config": self.config,
        }


@dataclass(frozen=True)
class SweepResult:
    """Per-significance-level metrics of one calibrated model on one test set."""

    grid: list[float]
    mean_set_size: list[float]
    std_set_size: list[float]
    nonempty_frac: list[float]
    coverage: list[float]
    mean_rule_f1: list[float]
    rule_precision: list[list[float]]
    rule_recall: list[list[float]]
    rule_f1: list[list[float]]
    min_level_all_nonempty: float | None
    config: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "grid": self.grid,
            "mean_set_size": self.mean_set_size,
            "std_set_size": self.std_set_size,
            "nonempty_frac": self.nonempty_frac,
            "coverage": self.coverage,
            "mean_rule_f1": self.mean_rule_f1,
            "rule_precision": self.rule_precision,
            "rule_recall": self.rule_recall,
            "rule_f1": self.rule_f1,
            "min_level_all_nonempty": self.min_level_all_nonempty,
            "rule_fn_definition": RULE_FN_DEFINITION,
            "config": self.config,
        }

    def write_csv(self, path) -> None:
        """One row per grid level; a leading comment line echoes the config."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# config: {json.dumps(self.config)}\n")
            writer = csv.writer(fh)
            writer.writerow(["significance", "mean_set_size", "std_set_size",
                             "nonempty_frac", "coverage", "mean_rule_f1"])
            for i, level in enumerate(self.grid):
                writer.writerow([level, self.mean_set_size[i], self.std_set_size[i],
                                 self.nonempty_frac[i], self.coverage[i], self.mean_rule_f1[i]])


def accuracy_of(rb: RuleBase, test: Dataset, order: OrderParams = OrderParams()) -> float:
    """Winner-take-all accuracy; no-coverage sentinels count as errors."""
    if test.n_instances == 0:
        raise ValueError("empty test set")
    scores, _ = evaluate_pairs(rb, test.features, order)
    return float(np.mean(classify_pairs(scores, order) == test.labels))


def evaluate_accuracy(data: Dataset, *, dataset_name: str = "", kind: str = "t1",
                      ga_config: GAConfig = GAConfig(), split_spec: SplitSpec = SplitSpec(),
                      order: OrderParams = OrderParams(), lower_cap: float = DEFAULT_LOWER_CAP,
                      repeats: int = 5, seeds=None) -> RunSummary:
    """Mean and std accuracy over repeated 80/20 cycles with distinct seeds.

    Each repeat reseeds both the split and the genetic search (seeds 0..r-1
    by default), retrains from scratch, and scores the held-out test set.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    seeds = list(range(repeats)) if seeds is None else list(seeds)
    accs, nocov = [], []
    for seed in seeds:
        train_raw, test_raw, _ = split(data, replace(split_spec, seed=seed))
        train, norm_params = normalize(train_raw)
        test = test_raw.with_features(norm_params.apply(test_raw.features))
        rb = evolve(train, build_partitions(train, kind, lower_cap),
                    replace(ga_config, seed=seed), kind=kind)
        scores, _ = evaluate_pairs(rb, test.features, order)
        predicted = classify_pairs(scores, order)
        accs.append(float(np.mean(predicted == test.labels)))
        nocov.append(float(np.mean(predicted < 0)))
    return RunSummary(
        dataset_name=dataset_name, kind=kind,
        accuracy=float(np.mean(accs)), accuracy_std=float(np.std(accs)),
        per_run=accs, no_coverage_rate=float(np.mean(nocov)),
        config={"ga": ga_config.to_json(), "kind": kind, "lower_cap": lower_cap,
                "seeds": seeds,
                "split": {"test_fraction": split_spec.test_fraction,
                          "calibration_folds": split_spec.calibration_folds}},
    )


def rule_contingency(rb: RuleBase, cal: ConformalCalibration, test: Dataset,
                     significance: float, assoc: np.ndarray | None = None):
    """Per-rule (TP, FP, FN) counts at one significance level."""
    if assoc is None:
        _, assoc = evaluate_pairs(rb, test.features, cal.order)
    t = set_threshold(cal, significance)
    in_set = geq_mask(assoc, np.array([t.lower, t.upper]), cal.order)  # (n, R)
    matches = test.labels[:, None] == rb.consequents[None, :]          # (n, R)
    tp = (in_set & matches).sum(axis=0)
    fp = (in_set & ~matches).sum(axis=0)
    fn = (~in_set & matches).sum(axis=0)
    return tp, fp, fn


def rule_f1(rb: RuleBase, cal: ConformalCalibration, test: Dataset, significance: float):
    """Per-rule (precision, recall, F1) arrays at one significance level."""
    tp, fp, fn = rule_contingency(rb, cal, test, significance)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        f1 = np.where(2 * tp + fp + fn > 0, 2 * tp / (2 * tp + fp + fn), 0.0)
    return precision, recall, f1


def sweep_significance(rb: RuleBase, cal: ConformalCalibration, test: Dataset,
                       grid=None, config: dict | None = None) -> SweepResult:
    """Evaluate prediction sets and rule sets across a significance grid."""
    grid = default_grid() if grid is None else [float(g) for g in grid]
    if any(not 0.0 < g < 1.0 for g in grid):
        raise ValueError("grid levels must lie in (0, 1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")

    scores, assoc = evaluate_pairs(rb, test.features, cal.order)
    n = test.n_instances
    rows = np.arange(n)
    mean_size, std_size, nonempty, coverage, mean_f1 = [], [], [], [], []
    precisions, recalls, f1s = [], [], []
    min_all_nonempty = None
    for level in grid:
        mask = prediction_set_masks(scores, cal, level)
        sizes = mask.sum(axis=1)
        mean_size.append(float(sizes.mean()))
        std_size.append(float(sizes.std()))
        frac = float((sizes > 0).mean())
        nonempty.append(frac)
        if frac == 1.0 and min_all_nonempty is None:
            min_all_nonempty = level
        coverage.append(float(mask[rows, test.labels].mean()))
        tp, fp, fn = rule_contingency(rb, cal, test, level, assoc)
        with np.errstate(invalid="ignore", divide="ignore"):
            p = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
            r = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
            f = np.where(2 * tp + fp + fn > 0, 2 * tp / (2 * tp + fp + fn), 0.0)
        precisions.append(p.tolist())
        recalls.append(r.tolist())
        f1s.append(f.tolist())
        mean_f1.append(float(f.mean()))

    return SweepResult(
        grid=grid, mean_set_size=mean_size, std_set_size=std_size,
        nonempty_frac=nonempty, coverage=coverage, mean_rule_f1=mean_f1,
        rule_precision=precisions, rule_recall=recalls, rule_f1=f1s,
        min_level_all_nonempty=min_all_nonempty, config=dict(config or {}),
    )
