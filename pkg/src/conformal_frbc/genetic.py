"""Genetic search over rule antecedents and consequents, scored by MCC.

A genome is an int8 array of shape (max_rules, n_features + 1): one row per
rule slot, columns 0..d-1 holding -1 (don't care) or a label index 0..2, and
the last column the consequent class. A slot decodes to a rule when it has
between 1 and max_antecedents active genes; anything else is inactive.
Fitness is the Matthews correlation coefficient of winner-take-all
predictions on the training data (interval associations defuzzified at the
midpoint), minus an optional penalty proportional to the total association
mass of the rules, which discourages rules that fire broadly on everything.

Selection is tournament, crossover swaps whole rule slots, mutation is per
gene, and one elite survives each generation, so the best fitness never
decreases. The whole search is deterministic given the config seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .partitions import membership_matrices
from .rules import (MAX_ANTECEDENTS, MAX_RULES, Rule, RuleBase,
                    dominance_pairs_from_firing, firing_pairs)


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 30
    generations: int = 50
    mutation_rate: float = 0.1
    crossover_rate: float = 0.9
    tournament_size: int = 3
    max_rules: int = MAX_RULES
    max_antecedents: int = MAX_ANTECEDENTS
    penalty_weight: float = 0.0
    raw_penalty: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if not 0.0 < self.mutation_rate < 1.0:
            raise ValueError("mutation_rate must lie in (0, 1)")
        if not 0.0 < self.crossover_rate < 1.0:
            raise ValueError("crossover_rate must lie in (0, 1)")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")
        if not 1 <= self.max_rules <= MAX_RULES:
            raise ValueError(f"max_rules must lie in 1..{MAX_RULES}")
        if not 1 <= self.max_antecedents <= MAX_ANTECEDENTS:
            raise ValueError(f"max_antecedents must lie in 1..{MAX_ANTECEDENTS}")
        if self.penalty_weight < 0.0:
            raise ValueError("penalty_weight must be >= 0")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_json(cls, obj: dict) -> "GAConfig":
        return cls(**obj)


def mcc(confusion) -> float:
    """Matthews correlation coefficient of a square confusion matrix.

    Uses the multiclass generalization (covariance of one-hot encodings),
    which reduces exactly to (TP*TN - FP*FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN))
    in the binary case. Returns 0 when the denominator vanishes.
    """
    conf = np.asarray(confusion, dtype=np.float64)
    if conf.ndim != 2 or conf.shape[0] != conf.shape[1]:
        raise ValueError(f"confusion matrix must be square, got shape {conf.shape}")
    if np.any(conf < 0):
        raise ValueError("confusion counts must be nonnegative")
    total = conf.sum()
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    correct = np.trace(conf)
    true_counts = conf.sum(axis=1)
    pred_counts = conf.sum(axis=0)
    cov_xy = correct * total - pred_counts @ true_counts
    cov_xx = total * total - pred_counts @ pred_counts
    cov_yy = total * total - true_counts @ true_counts
    denom = math.sqrt(cov_xx * cov_yy)
    if denom == 0.0:
        return 0.0
    return float(cov_xy / denom)


# ---------------------------------------------------------------------------
# Genome encoding.
# ---------------------------------------------------------------------------

DONT_CARE = -1


def random_genome(rng: np.random.Generator, n_features: int, n_classes: int,
                  config: GAConfig) -> np.ndarray:
    """A genome whose every slot starts with 1..max_antecedents antecedents."""
    g = np.full((config.max_rules, n_features + 1), DONT_CARE, dtype=np.int8)
    for slot in range(config.max_rules):
        n_ant = int(rng.integers(1, config.max_antecedents + 1))
        feats = rng.choice(n_features, size=min(n_ant, n_features), replace=False)
        g[slot, feats] = rng.integers(0, 3, size=feats.size)
        g[slot, -1] = rng.integers(0, n_classes)
    return g


def decode_genome(genome: np.ndarray, max_antecedents: int = MAX_ANTECEDENTS):
    """Active (feature_indices, label_indices, consequent) triples of a genome."""
    decoded = []
    for slot in range(genome.shape[0]):
        feats = np.flatnonzero(genome[slot, :-1] != DONT_CARE)
        if 1 <= feats.size <= max_antecedents:
            decoded.append((feats, genome[slot, feats].astype(np.int64), int(genome[slot, -1])))
    return decoded


def genome_to_rules(genome: np.ndarray, max_antecedents: int = MAX_ANTECEDENTS) -> list[Rule]:
    return [Rule(tuple(zip(f.tolist(), l.tolist())), cons)
            for f, l, cons in decode_genome(genome, max_antecedents)]


# ---------------------------------------------------------------------------
# Fitness.
# ---------------------------------------------------------------------------

class FitnessContext:
    """Training tensors precomputed once, reused across all genome evaluations."""

    def __init__(self, train: Dataset, partitions, config: GAConfig):
        self.mem_lo, self.mem_up = membership_matrices(partitions, train.features)
        self.labels = train.labels
        self.n = train.n_instances
        self.n_classes = train.n_classes
        self.config = config
        self.class_rows = [np.flatnonzero(train.labels == c) for c in range(train.n_classes)]

    def evaluate(self, genome: np.ndarray) -> float:
        decoded = decode_genome(genome, self.config.max_antecedents)
        if not decoded:
            return -1.0
        amid, consequents = self._association_mids(decoded)
        predictions = self._predict(amid, consequents)
        value = mcc(self._confusion(predictions))
        if self.config.penalty_weight > 0.0:
            value -= self.config.penalty_weight * self._penalty(amid)
        return value

    def _association_mids(self, decoded):
        n, cfg = self.n, self.config
        n_rules = len(decoded)
        flo = np.ones((n, n_rules))
        fup = np.ones((n, n_rules))
        consequents = np.empty(n_rules, dtype=np.int64)
        for r, (feats, labs, cons) in enumerate(decoded):
            consequents[r] = cons
            for f, l in zip(feats, labs):
                flo[:, r] *= self.mem_lo[:, f, l]
                fup[:, r] *= self.mem_up[:, f, l]
        ds = self._dominance(flo, fup, consequents)
        # association midpoint, the defuzzified score used during evolution
        return 0.5 * (flo * ds[:, 0] + fup * ds[:, 1]), consequents

    def _dominance(self, flo, fup, consequents):
        ds = np.zeros((len(consequents), 2))
        tot_lo = flo.sum(axis=1)
        tot_up = fup.sum(axis=1)
        for c in np.unique(consequents):
            if c >= self.n_classes:
                continue
            rows = self.class_rows[c]
            if rows.size == 0:
                continue
            ridx = np.flatnonzero(consequents == c)
            own_lo = flo[rows][:, ridx].sum(axis=0)
            own_up = fup[rows][:, ridx].sum(axis=0)
            other_lo = tot_lo[rows].sum() - own_lo
            other_up = tot_up[rows].sum() - own_up
            den_lo = own_lo + other_up
            den_up = own_up + other_lo
            with np.errstate(invalid="ignore", divide="ignore"):
                conf_lo = np.where(den_lo > 0.0, own_lo / den_lo, 0.0)
                conf_up = np.where(den_up > 0.0, own_up / den_up, 0.0)
            ds[ridx, 0] = own_lo / rows.size * conf_lo
            ds[ridx, 1] = own_up / rows.size * conf_up
        return ds

    def _predict(self, amid, consequents):
        class_mid = np.zeros((self.n, self.n_classes))
        for c in np.unique(consequents):
            if c < self.n_classes:
                class_mid[:, c] = amid[:, consequents == c].max(axis=1)
        winners = np.argmax(class_mid, axis=1)
        best = class_mid[np.arange(self.n), winners]
        winners[best == 0.0] = self.n_classes  # no-coverage phantom column
        return winners

    def _confusion(self, predictions):
        k = self.n_classes + 1
        flat = self.labels * k + predictions
        return np.bincount(flat, minlength=k * k).reshape(k, k)

    def _penalty(self, amid):
        if self.config.raw_penalty:
            return (self.n_classes - 1) * float(amid.sum())
        # per-sample total association mass; the divisor must not depend on the
        # active rule count, or padding with weak rules would shrink the penalty
        return float(amid.sum()) / self.n


def fitness(genome: np.ndarray, train: Dataset, partitions, config: GAConfig) -> float:
    """MCC of the decoded genome's training predictions minus the set penalty."""
    return FitnessContext(train, partitions, config).evaluate(genome)


# ---------------------------------------------------------------------------
# Evolution loop.
# ---------------------------------------------------------------------------

def evolve(train: Dataset, partitions, config: GAConfig,
           fitness_history: list | None = None, kind: str | None = None) -> RuleBase:
    """Search for a rule base maximizing fitness; deterministic given config.seed.

    Tournament selection, uniform crossover at rule-slot granularity,
    per-gene mutation, elitism of one. The best genome is decoded, weak rules
    (midpoint dominance below 0.005, or rules that win no training sample)
    are dropped, and dominance is recomputed on the full training data.
    When ``fitness_history`` is a list, the best fitness of each generation
    (including the initial population) is appended to it.
    """
    ctx = FitnessContext(train, partitions, config)
    rng = np.random.default_rng(config.seed)
    d, n_classes = train.n_features, train.n_classes
    dont_care_prob = max(0.5, 1.0 - 2.0 / d)

    population = [random_genome(rng, d, n_classes, config) for _ in range(config.population_size)]
    scores = np.array([ctx.evaluate(g) for g in population])
    if fitness_history is not None:
        fitness_history.append(float(scores.max()))

    for _ in range(config.generations):
        elite = population[int(np.argmax(scores))].copy()
        offspring = [elite]
        while len(offspring) < config.population_size:
            p1 = _tournament(rng, population, scores, config.tournament_size)
            p2 = _tournament(rng, population, scores, config.tournament_size)
            child = _crossover(rng, p1, p2, config.crossover_rate)
            _mutate(rng, child, n_classes, config.mutation_rate, dont_care_prob)
            offspring.append(child)
        population = offspring
        scores = np.array([ctx.evaluate(g) for g in population])
        if fitness_history is not None:
            fitness_history.append(float(scores.max()))

    best = population[int(np.argmax(scores))]
    return _finalize(best, train, partitions, config, kind)


def _tournament(rng, population, scores, size):
    contenders = rng.integers(0, len(population), size=size)
    return population[int(contenders[np.argmax(scores[contenders])])]


def _crossover(rng, p1, p2, rate):
    if rng.random() >= rate:
        return p1.copy()
    take_p2 = rng.random(p1.shape[0]) < 0.5
    child = p1.copy()
    child[take_p2] = p2[take_p2]
    return child


def _mutate(rng, genome, n_classes, rate, dont_care_prob):
    n_slots, width = genome.shape
    d = width - 1
    hit = rng.random((n_slots, d)) < rate
    count = int(hit.sum())
    if count:
        to_dc = rng.random(count) < dont_care_prob
        fresh = rng.integers(0, 3, size=count).astype(np.int8)
        fresh[to_dc] = DONT_CARE
        genome[:, :-1][hit] = fresh
    hit_cons = rng.random(n_slots) < rate
    n_cons = int(hit_cons.sum())
    if n_cons:
        genome[hit_cons, -1] = rng.integers(0, n_classes, size=n_cons).astype(np.int8)


def _finalize(genome, train, partitions, config, kind=None) -> RuleBase:
    rules = genome_to_rules(genome, config.max_antecedents)
    if not rules:
        # degenerate search outcome: fall back to one majority-class rule
        majority = int(np.bincount(train.labels).argmax())
        rules = [Rule(((0, 1),), majority)]
    if kind is None:
        kind = "t1" if partitions[0].lower_scale == 1.0 else "ivt2"
    rb = _with_dominance(rules, train, partitions, kind)
    kept = _quality_filter(rb, train)
    if kept and len(kept) < len(rb.rules):
        rb = _with_dominance(kept, train, partitions, kind)
    return rb


def _with_dominance(rules, train, partitions, kind) -> RuleBase:
    mem_lo, mem_up = membership_matrices(partitions, train.features)
    firing = firing_pairs(rules, mem_lo, mem_up)
    ds, _ = dominance_pairs_from_firing(firing, train.labels,
                                        np.array([r.consequent for r in rules]))
    scored = tuple(r.with_dominance(ds[i, 0], ds[i, 1]) for i, r in enumerate(rules))
    return RuleBase(scored, tuple(partitions), kind, train.n_classes,
                    train.class_names, train.feature_names)


def _quality_filter(rb: RuleBase, train: Dataset, min_mid_dominance: float = 0.005):
    """Rules worth keeping: midpoint dominance above threshold and at least one
    training sample on which the rule attains the winning association."""
    mem_lo, mem_up = membership_matrices(rb.partitions, train.features)
    firing = firing_pairs(rb.rules, mem_lo, mem_up)
    ds = rb.dominance_pairs
    mid = 0.5 * (firing[:, :, 0] * ds[:, 0] + firing[:, :, 1] * ds[:, 1])
    winner = np.argmax(mid, axis=1)
    fired = mid[np.arange(mid.shape[0]), winner] > 0.0
    wins = np.bincount(winner[fired], minlength=len(rb.rules))
    ds_mid = 0.5 * (ds[:, 0] + ds[:, 1])
    return [r for i, r in enumerate(rb.rules) if ds_mid[i] >= min_mid_dominance and wins[i] > 0]
