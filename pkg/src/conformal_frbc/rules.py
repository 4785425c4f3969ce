"""Fuzzy rules, firing strengths, dominance scores, and winner-take-all inference.

A rule fires with the product of its antecedent memberships (an interval on
the IV-T2 path). Its dominance score is fuzzy support times fuzzy confidence
measured on training data, and the quantity compared at inference time is
the association degree: firing strength times dominance. Per class, the
score is the largest association among the class's rules under the
admissible order; the winning class is the admissible argmax over classes.

The batch functions at module level work on stacked endpoint arrays and are
shared by the genetic optimizer, the conformal calibrator, and evaluation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .intervals import Interval, OrderParams, k_values
from .partitions import LABELS, membership, membership_matrices

MAX_RULES = 15
MAX_ANTECEDENTS = 3

NO_COVERAGE = -1
"""Classification sentinel for samples on which no rule fires at all."""


@dataclass(frozen=True)
class Rule:
    """IF <feature is label> [AND ...] THEN <class>, with a post-hoc dominance score.

    antecedents are (feature_index, label_index) pairs with label_index
    following partitions.LABELS order; dominance is an endpoint pair once
    computed on training data.
    """

    antecedents: tuple[tuple[int, int], ...]
    consequent: int
    dominance: tuple[float, float] | None = None

    def __post_init__(self):
        ants = tuple((int(f), int(l)) for f, l in self.antecedents)
        if not 1 <= len(ants) <= MAX_ANTECEDENTS:
            raise ValueError(f"rules take 1..{MAX_ANTECEDENTS} antecedents, got {len(ants)}")
        feats = [f for f, _ in ants]
        if len(set(feats)) != len(feats):
            raise ValueError(f"duplicate feature in antecedents {ants}")
        if any(not 0 <= l < len(LABELS) for _, l in ants):
            raise ValueError("label index out of range")
        if self.consequent < 0:
            raise ValueError("consequent class index must be nonnegative")
        object.__setattr__(self, "antecedents", ants)
        if self.dominance is not None:
            lo, up = self.dominance
            object.__setattr__(self, "dominance", (float(lo), float(up)))
            Interval(lo, up)  # range check

    def with_dominance(self, lo: float, up: float) -> "Rule":
        return Rule(self.antecedents, self.consequent, (lo, up))

    def describe(self, feature_names=None, class_names=None) -> str:
        parts = []
        for f, l in self.antecedents:
            name = feature_names[f] if feature_names else f"x{f}"
            parts.append(f"{name} is {LABELS[l]}")
        cls = class_names[self.consequent] if class_names else str(self.consequent)
        text = f"IF {' AND '.join(parts)} THEN class {cls}"
        if self.dominance is not None:
            text += f"  (dominance [{self.dominance[0]:.4f}, {self.dominance[1]:.4f}])"
        return text


@dataclass(frozen=True)
class RuleBase:
    """An ordered collection of at most 15 rules over shared fuzzy partitions."""

    rules: tuple[Rule, ...]
    partitions: tuple
    kind: str
    n_classes: int
    class_names: list[str] | None = None
    feature_names: list[str] | None = None

    def __post_init__(self):
        if not self.rules:
            raise ValueError("a rule base needs at least one rule")
        if len(self.rules) > MAX_RULES:
            raise ValueError(f"at most {MAX_RULES} rules allowed, got {len(self.rules)}")
        if any(r.consequent >= self.n_classes for r in self.rules):
            raise ValueError("rule consequent outside class range")
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "partitions", tuple(self.partitions))

    @property
    def dominance_pairs(self) -> np.ndarray:
        if any(r.dominance is None for r in self.rules):
            raise ValueError("dominance scores have not been computed")
        return np.array([r.dominance for r in self.rules])

    @property
    def consequents(self) -> np.ndarray:
        return np.array([r.consequent for r in self.rules])

    def describe(self) -> str:
        lines = [r.describe(self.feature_names, self.class_names) for r in self.rules]
        return "\n".join(lines)


@dataclass(frozen=True)
class ClassScores:
    """Per-class score intervals plus the per-rule association vector that
    produced them (needed for rule-wise conformal sets)."""

    per_class: np.ndarray  # (C, 2)
    per_rule: np.ndarray   # (R, 2)

    def score(self, class_index: int) -> Interval:
        lo, up = self.per_class[class_index]
        return Interval(lo, up)


# ---------------------------------------------------------------------------
# Batch engine.
# ---------------------------------------------------------------------------

def firing_pairs(rules, mem_lo: np.ndarray, mem_up: np.ndarray) -> np.ndarray:
    """(n, R, 2) firing strengths from precomputed membership tensors."""
    n = mem_lo.shape[0]
    out = np.ones((n, len(rules), 2))
    for r, rule in enumerate(rules):
        for f, l in rule.antecedents:
            out[:, r, 0] *= mem_lo[:, f, l]
            out[:, r, 1] *= mem_up[:, f, l]
    return out


def dominance_pairs_from_firing(firing: np.ndarray, labels: np.ndarray,
                                consequents: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Dominance score (support * confidence) per rule, from firing strengths.

    Support is the mean firing over samples of the rule's consequent class.
    Confidence divides the rule's firing mass on those samples by the mass of
    every rule on them; for intervals the quotient uses the tight enclosure
    of own_mass / (own_mass + other_mass), each endpoint dropping to 0 when
    its denominator vanishes. Returns (ds, absent) where absent flags rules
    whose consequent class has no training samples (their ds is [0, 0]).
    """
    n_rules = firing.shape[1]
    ds = np.zeros((n_rules, 2))
    absent = np.zeros(n_rules, dtype=bool)
    total = firing.sum(axis=1)  # (n, 2) mass of all rules per sample
    for c in np.unique(consequents):
        mask = labels == c
        m = int(mask.sum())
        ridx = np.flatnonzero(consequents == c)
        if m == 0:
            absent[ridx] = True
            continue
        own = firing[mask][:, ridx, :].sum(axis=0)        # (Rc, 2)
        support = own / m
        other = total[mask].sum(axis=0)[None, :] - own    # (Rc, 2)
        den_lo = own[:, 0] + other[:, 1]
        den_up = own[:, 1] + other[:, 0]
        with np.errstate(invalid="ignore", divide="ignore"):
            conf_lo = np.where(den_lo > 0.0, own[:, 0] / den_lo, 0.0)
            conf_up = np.where(den_up > 0.0, own[:, 1] / den_up, 0.0)
        ds[ridx, 0] = support[:, 0] * conf_lo
        ds[ridx, 1] = support[:, 1] * conf_up
    return ds, absent


def class_score_pairs(assoc: np.ndarray, consequents: np.ndarray, n_classes: int,
                      order: OrderParams) -> np.ndarray:
    """(n, C, 2) class scores: admissible max of associations per class.

    Classes with no rule keep the empty-max convention [0, 0].
    """
    n = assoc.shape[0]
    k1 = k_values(assoc, order.alpha)
    k2 = k_values(assoc, order.beta)
    scores = np.zeros((n, n_classes, 2))
    rows = np.arange(n)
    for c in range(n_classes):
        ridx = np.flatnonzero(consequents == c)
        if ridx.size == 0:
            continue
        if ridx.size == 1:
            scores[:, c, :] = assoc[:, ridx[0], :]
            continue
        sub1 = k1[:, ridx]
        best1 = sub1.max(axis=1, keepdims=True)
        masked2 = np.where(sub1 == best1, k2[:, ridx], -1.0)
        scores[:, c, :] = assoc[rows, ridx[np.argmax(masked2, axis=1)], :]
    return scores


def classify_pairs(scores: np.ndarray, order: OrderParams) -> np.ndarray:
    """Winner class per row under the admissible order.

    Ties resolve to the lowest class index; rows whose best score is exactly
    [0, 0] get the NO_COVERAGE sentinel.
    """
    n = scores.shape[0]
    k1 = k_values(scores, order.alpha)
    k2 = k_values(scores, order.beta)
    best1 = k1.max(axis=1, keepdims=True)
    cand = k1 == best1
    masked2 = np.where(cand, k2, -np.inf)
    best2 = masked2.max(axis=1, keepdims=True)
    winners = np.argmax(cand & (masked2 == best2), axis=1).astype(np.int64)
    chosen = scores[np.arange(n), winners]
    winners[(chosen[:, 0] == 0.0) & (chosen[:, 1] == 0.0)] = NO_COVERAGE
    return winners


def evaluate_pairs(rb: RuleBase, X: np.ndarray, order: OrderParams):
    """(class scores (n, C, 2), associations (n, R, 2)) for a feature matrix."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    mem_lo, mem_up = membership_matrices(rb.partitions, X)
    firing = firing_pairs(rb.rules, mem_lo, mem_up)
    assoc = firing * rb.dominance_pairs[None, :, :]
    scores = class_score_pairs(assoc, rb.consequents, rb.n_classes, order)
    return scores, assoc


# ---------------------------------------------------------------------------
# Single-sample operations.
# ---------------------------------------------------------------------------

def firing_strength(rule: Rule, x, partitions) -> Interval:
    """Product of the rule's antecedent membership intervals for one sample."""
    x = np.asarray(x, dtype=np.float64)
    lo, up = 1.0, 1.0
    for f, l in rule.antecedents:
        if f >= x.shape[0]:
            raise ValueError(f"sample has {x.shape[0]} features, rule needs index {f}")
        m = membership(partitions[f], LABELS[l], x[f])
        lo *= m.lower
        up *= m.upper
    return Interval(lo, up)


def dominance_score(rule: Rule, train: Dataset, partitions, all_rules=None) -> Interval:
    """Support times confidence of one rule on training data.

    The confidence denominator pools the firing mass of ``all_rules`` (which
    must contain ``rule``); by default the rule is judged alone. Emits a
    warning and returns [0, 0] when the consequent class is absent.
    """
    rules = list(all_rules) if all_rules is not None else [rule]
    if not any(r is rule or r == rule for r in rules):
        raise ValueError("all_rules must contain the rule being scored")
    pos = next(i for i, r in enumerate(rules) if r is rule or r == rule)
    mem_lo, mem_up = membership_matrices(partitions, train.features)
    firing = firing_pairs(rules, mem_lo, mem_up)
    ds, absent = dominance_pairs_from_firing(firing, train.labels, np.array([r.consequent for r in rules]))
    if absent[pos]:
        warnings.warn(f"consequent class {rule.consequent} absent from training data; dominance is [0, 0]",
                      stacklevel=2)
    return Interval(ds[pos, 0], ds[pos, 1])


def compute_dominance(rb: RuleBase, train: Dataset) -> RuleBase:
    """RuleBase with dominance scores (re)computed on the given training data."""
    mem_lo, mem_up = membership_matrices(rb.partitions, train.features)
    firing = firing_pairs(rb.rules, mem_lo, mem_up)
    ds, _ = dominance_pairs_from_firing(firing, train.labels, rb.consequents)
    rules = tuple(r.with_dominance(ds[i, 0], ds[i, 1]) for i, r in enumerate(rb.rules))
    return RuleBase(rules, rb.partitions, rb.kind, rb.n_classes, rb.class_names, rb.feature_names)


def class_scores(rb: RuleBase, x, order: OrderParams = OrderParams()) -> ClassScores:
    """Scores of every class for one sample, plus per-rule associations."""
    scores, assoc = evaluate_pairs(rb, np.atleast_2d(x), order)
    return ClassScores(per_class=scores[0], per_rule=assoc[0])


def classify(rb: RuleBase, x, order: OrderParams = OrderParams()) -> int:
    """Winner-take-all class for one sample, or NO_COVERAGE when nothing fires."""
    scores, _ = evaluate_pairs(rb, np.atleast_2d(x), order)
    return int(classify_pairs(scores, order)[0])


def classify_matrix(rb: RuleBase, X, order: OrderParams = OrderParams()) -> np.ndarray:
    """Vector of winner classes (with NO_COVERAGE sentinels) for a matrix."""
    scores, _ = evaluate_pairs(rb, X, order)
    return classify_pairs(scores, order)
