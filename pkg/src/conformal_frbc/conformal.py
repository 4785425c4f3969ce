"""Conformal calibration and prediction sets over fuzzy rule-based classifiers.

Nonconformity of a calibration example is one minus its true-class score
(interval subtraction on the IV-T2 path). Calibration pools the scores from
a K-fold cross scheme: each fold is scored by a model fitted on the other
folds, so every training point contributes exactly one score. At prediction
time the pooled scores act as a single split-conformal pool: the quantile at
rank ceil((n+1)(1-significance)) becomes the threshold, and a class (or
rule) enters the prediction set when its score is not strictly below
1 - quantile under the admissible order. Ranks beyond the pool return the
maximal score [1, 1], which forces full prediction sets and keeps the
guarantee valid at extreme significance levels.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .intervals import (Interval, OrderParams, as_pairs, geq_mask, k_values,
                        one_minus_pairs, sort_pairs)
from .rules import RuleBase, evaluate_pairs

THREADS_ENV = "CONFORMAL_FRBC_THREADS"


def thread_limit() -> int:
    """Parallelism cap from the CONFORMAL_FRBC_THREADS environment variable."""
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ConformalCalibration:
    """A sorted pool of nonconformity scores and the order that sorted it."""

    scores: np.ndarray  # (n, 2), ascending under the admissible order
    order: OrderParams

    def __post_init__(self):
        pairs = as_pairs(self.scores)
        if pairs.ndim != 2 or pairs.shape[0] < 1:
            raise ValueError("calibration needs at least one score")
        k1 = k_values(pairs, self.order.alpha)
        k2 = k_values(pairs, self.order.beta)
        descending = (k1[1:] < k1[:-1]) | ((k1[1:] == k1[:-1]) & (k2[1:] < k2[:-1]))
        if np.any(descending):
            raise ValueError("calibration scores are not sorted under the admissible order")
        pairs = pairs.copy()
        pairs.setflags(write=False)
        object.__setattr__(self, "scores", pairs)

    @property
    def n(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True)
class PredictionSet:
    """Classes whose score clears the conformal threshold at one significance."""

    classes: frozenset[int]
    threshold: Interval
    significance: float

    def __contains__(self, item) -> bool:
        return item in self.classes

    def __len__(self) -> int:
        return len(self.classes)


@dataclass(frozen=True)
class RuleSet:
    """Rule indices surviving the classifier-level conformal cut."""

    rules: frozenset[int]
    threshold: Interval
    significance: float

    def __contains__(self, item) -> bool:
        return item in self.rules

    def __len__(self) -> int:
        return len(self.rules)


def nonconformity_scores(rb: RuleBase, data: Dataset, order: OrderParams) -> np.ndarray:
    """(n, 2) scores: one minus the true-class score interval, per sample."""
    scores, _ = evaluate_pairs(rb, data.features, order)
    true_scores = scores[np.arange(data.n_instances), data.labels]
    return one_minus_pairs(true_scores)


def calibrate_cross(train: Dataset, folds, trainer, order: OrderParams = OrderParams(),
                    seed: int = 0) -> ConformalCalibration:
    """Cross-conformal calibration: fit on K-1 folds, score the held-out fold.

    trainer(dataset, seed) must return a fitted RuleBase and be deterministic
    given its seed; each fold gets a seed derived from ``seed`` and the fold
    index. All per-fold scores are pooled and sorted under ``order``. Fold
    fitting runs in up to CONFORMAL_FRBC_THREADS threads; the pool is sorted
    after the merge, so the result does not depend on completion order.
    """
    if not folds:
        raise ValueError("no folds given")
    for f, (fit_idx, cal_idx) in enumerate(folds):
        if len(cal_idx) == 0:
            raise ValueError(f"fold {f} has zero calibration instances")
        if len(fit_idx) == 0:
            raise ValueError(f"fold {f} has zero fit instances")

    def one_fold(args):
        fold_index, (fit_idx, cal_idx) = args
        fold_seed = int(np.random.SeedSequence([seed, fold_index]).generate_state(1)[0])
        model = trainer(train.subset(fit_idx), fold_seed)
        return nonconformity_scores(model, train.subset(cal_idx), order)

    workers = min(thread_limit(), len(folds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_fold = list(pool.map(one_fold, enumerate(folds)))
    else:
        per_fold = [one_fold(item) for item in enumerate(folds)]

    pooled = np.concatenate(per_fold, axis=0)
    return ConformalCalibration(sort_pairs(pooled, order), order)


def conformal_quantile(cal: ConformalCalibration, significance: float) -> Interval:
    """Score at rank ceil((n+1)(1-significance)), or [1, 1] past the pool."""
    if not 0.0 < significance < 1.0:
        raise ValueError(f"significance must lie in (0, 1), got {significance}")
    n = cal.n
    k = math.ceil((n + 1) * (1.0 - significance))
    if k > n:
        return Interval(1.0, 1.0)
    lo, up = cal.scores[max(k, 1) - 1]
    return Interval(lo, up)


def set_threshold(cal: ConformalCalibration, significance: float) -> Interval:
    """The prediction-set cut 1 - quantile at the given significance."""
    q = conformal_quantile(cal, significance)
    return Interval(1.0 - q.upper, 1.0 - q.lower)


def prediction_set_masks(class_scores: np.ndarray, cal: ConformalCalibration,
                         significance: float) -> np.ndarray:
    """Boolean inclusion mask for (n, C, 2) class scores at one significance."""
    t = set_threshold(cal, significance)
    return geq_mask(class_scores, np.array([t.lower, t.upper]), cal.order)


def predict_set(rb: RuleBase, cal: ConformalCalibration, x, significance: float) -> PredictionSet:
    """Conformal prediction set for one (already normalized) sample."""
    scores, _ = evaluate_pairs(rb, np.atleast_2d(x), cal.order)
    mask = prediction_set_masks(scores, cal, significance)[0]
    return PredictionSet(frozenset(np.flatnonzero(mask).tolist()),
                         set_threshold(cal, significance), significance)


def predict_rules(rb: RuleBase, cal: ConformalCalibration, x, significance: float) -> RuleSet:
    """Rules whose association clears the same classifier-level threshold."""
    _, assoc = evaluate_pairs(rb, np.atleast_2d(x), cal.order)
    t = set_threshold(cal, significance)
    mask = geq_mask(assoc[0], np.array([t.lower, t.upper]), cal.order)
    return RuleSet(frozenset(np.flatnonzero(mask).tolist()), t, significance)
