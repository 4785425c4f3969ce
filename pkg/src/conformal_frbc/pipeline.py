"""End-to-end training pipeline and lossless model (de)serialization.

A trained model bundles everything prediction needs: the normalization
parameters fitted on training data, the fuzzy partitions, the rule base with
dominance scores, the pooled cross-conformal calibration scores, and an echo
of the configuration that produced it. The JSON encoding keeps full float
precision (Python's float repr round-trips), so save/load/save is
byte-stable and retraining with the same seed yields byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .conformal import ConformalCalibration, calibrate_cross, predict_rules, predict_set
from .dataset import Dataset, NormalizationParams, SplitSpec, normalize, split
from .genetic import GAConfig, evolve
from .intervals import OrderParams
from .partitions import (DEFAULT_LOWER_CAP, KIND_T1, LABELS, LinguisticVariable,
                         MembershipFunction, build_partitions)
from .rules import Rule, RuleBase, classify_matrix, evaluate_pairs

FORMAT_NAME = "conformal-frbc-model"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainedModel:
    rulebase: RuleBase
    calibration: ConformalCalibration
    norm: NormalizationParams
    order: OrderParams
    lower_cap: float
    config: dict

    @property
    def kind(self) -> str:
        return self.rulebase.kind

    @property
    def n_features(self) -> int:
        return len(self.rulebase.partitions)

    def transform(self, X) -> np.ndarray:
        """Apply the training normalization to raw feature rows."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ValueError(f"model expects {self.n_features} features, got {X.shape[1]}")
        return self.norm.apply(X)

    def classify(self, X_raw) -> np.ndarray:
        return classify_matrix(self.rulebase, self.transform(X_raw), self.order)

    def predict_set(self, x_raw, significance: float):
        return predict_set(self.rulebase, self.calibration, self.transform(x_raw)[0], significance)

    def predict_rules(self, x_raw, significance: float):
        return predict_rules(self.rulebase, self.calibration, self.transform(x_raw)[0], significance)

    def class_score_pairs(self, X_raw):
        """(class scores, per-rule associations) on normalized inputs."""
        return evaluate_pairs(self.rulebase, self.transform(X_raw), self.order)


def make_trainer(kind: str, lower_cap: float, ga_config: GAConfig):
    """A trainer(dataset, seed) callable: builds partitions on its data and
    runs the genetic search with the given seed."""

    def trainer(ds: Dataset, seed: int) -> RuleBase:
        partitions = build_partitions(ds, kind, lower_cap)
        return evolve(ds, partitions, replace(ga_config, seed=int(seed)), kind=kind)

    return trainer


def train_model(train_raw: Dataset, folds, *, kind: str = KIND_T1,
                lower_cap: float = DEFAULT_LOWER_CAP, ga_config: GAConfig = GAConfig(),
                order: OrderParams = OrderParams(), config_echo: dict | None = None) -> TrainedModel:
    """Normalize, cross-calibrate on the folds, then retrain on everything.

    The fold models exist only to produce the pooled nonconformity scores;
    the returned rule base is refit on the full (normalized) training data.
    """
    train_norm, norm_params = normalize(train_raw)
    trainer = make_trainer(kind, lower_cap, ga_config)
    calibration = calibrate_cross(train_norm, folds, trainer, order, seed=ga_config.seed)
    rulebase = trainer(train_norm, ga_config.seed)
    echo = dict(config_echo or {})
    echo.setdefault("kind", kind)
    echo.setdefault("lower_cap", lower_cap)
    echo.setdefault("order", {"alpha": order.alpha, "beta": order.beta})
    echo.setdefault("ga", ga_config.to_json())
    return TrainedModel(rulebase, calibration, norm_params, order, lower_cap, echo)


def run_experiment(data: Dataset, split_spec: SplitSpec = SplitSpec(), *,
                   kind: str = KIND_T1, lower_cap: float = DEFAULT_LOWER_CAP,
                   ga_config: GAConfig = GAConfig(), order: OrderParams = OrderParams(),
                   config_echo: dict | None = None) -> tuple[TrainedModel, Dataset]:
    """Split, train with cross-conformal calibration, return (model, raw test set)."""
    train_raw, test_raw, folds = split(data, split_spec)
    echo = dict(config_echo or {})
    echo.setdefault("split", {"test_fraction": split_spec.test_fraction,
                              "calibration_folds": split_spec.calibration_folds,
                              "seed": split_spec.seed})
    model = train_model(train_raw, folds, kind=kind, lower_cap=lower_cap,
                        ga_config=ga_config, order=order, config_echo=echo)
    return model, test_raw


# ---------------------------------------------------------------------------
# JSON serialization.
# ---------------------------------------------------------------------------

def model_to_json(model: TrainedModel) -> dict:
    rb = model.rulebase
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": rb.kind,
        "lower_cap": model.lower_cap,
        "order": {"alpha": model.order.alpha, "beta": model.order.beta},
        "class_names": list(rb.class_names or [str(c) for c in range(rb.n_classes)]),
        "feature_names": list(rb.feature_names or [f"x{j}" for j in range(model.n_features)]),
        "normalization": model.norm.to_json(),
        "partitions": [
            {"feature_index": lv.feature_index,
             "knots": list(lv.knots),
             "lower_scale": lv.lower_scale}
            for lv in rb.partitions
        ],
        "rules": [
            {"antecedents": [[f, LABELS[l]] for f, l in r.antecedents],
             "consequent": r.consequent,
             "dominance": list(r.dominance)}
            for r in rb.rules
        ],
        "calibration_scores": model.calibration.scores.tolist(),
        "config": model.config,
    }


def model_from_json(obj: dict) -> TrainedModel:
    if obj.get("format") != FORMAT_NAME:
        raise ValueError("not a conformal-frbc model file")
    if obj.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model version {obj.get('version')}")
    scale = 1.0 if obj["kind"] == KIND_T1 else float(obj["lower_cap"])
    partitions = []
    for p in sorted(obj["partitions"], key=lambda p: p["feature_index"]):
        q0, q20, q50, q80, q100 = p["knots"]
        partitions.append(LinguisticVariable(
            feature_index=p["feature_index"],
            knots=(q0, q20, q50, q80, q100),
            low=MembershipFunction(q0, q0, q20, q50, p["lower_scale"]),
            medium=MembershipFunction(q20, q50, q50, q80, p["lower_scale"]),
            high=MembershipFunction(q50, q80, q100, q100, p["lower_scale"]),
        ))
        if p["lower_scale"] != scale:
            raise ValueError("partition lower_scale inconsistent with model kind")
    label_index = {name: i for i, name in enumerate(LABELS)}
    rules = tuple(
        Rule(tuple((int(f), label_index[l]) for f, l in r["antecedents"]),
             int(r["consequent"]), tuple(r["dominance"]))
        for r in obj["rules"]
    )
    class_names = [str(c) for c in obj["class_names"]]
    rulebase = RuleBase(rules, tuple(partitions), obj["kind"], len(class_names),
                        class_names, [str(f) for f in obj["feature_names"]])
    order = OrderParams(obj["order"]["alpha"], obj["order"]["beta"])
    calibration = ConformalCalibration(np.asarray(obj["calibration_scores"], dtype=np.float64), order)
    norm = NormalizationParams.from_json(obj["normalization"])
    return TrainedModel(rulebase, calibration, norm, order, float(obj["lower_cap"]), obj["config"])


def save_model(model: TrainedModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_json(model), fh, indent=2)
        fh.write("\n")


def load_model(path) -> TrainedModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
