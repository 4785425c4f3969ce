"""Conformal prediction sets from interpretable fuzzy rule-based classifiers.

The library trains small rule bases (at most 15 rules of up to 3 antecedents)
over quantile-based low/medium/high partitions, with either scalar (type-1)
or interval-valued (interval type-2) truth degrees, using a seeded genetic
algorithm. Cross-conformal calibration turns the classifier scores into
prediction sets with a finite-sample coverage guarantee, both class-wise and
rule-wise.
"""

from .conformal import (ConformalCalibration, PredictionSet, RuleSet, calibrate_cross,
                        conformal_quantile, nonconformity_scores, predict_rules,
                        predict_set, set_threshold)
from .dataset import (CsvFormatError, Dataset, NormalizationParams, SplitSpec,
                      load_csv, normalize, split)
from .evaluation import (RunSummary, SweepResult, accuracy_of, default_grid,
                         evaluate_accuracy, rule_f1, sweep_significance)
from .genetic import GAConfig, FitnessContext, decode_genome, evolve, fitness, mcc, random_genome
from .intervals import (Interval, OrderParams, interval_max, interval_product, k_a,
                        leq_admissible, one_minus, strictly_less)
from .partitions import (DEFAULT_LOWER_CAP, KIND_IVT2, KIND_T1, LABELS,
                         DegeneratePartitionError, LinguisticVariable,
                         MembershipFunction, build_partitions, membership,
                         membership_matrices)
from .pipeline import (TrainedModel, load_model, make_trainer, run_experiment,
                       save_model, train_model)
from .rules import (NO_COVERAGE, ClassScores, Rule, RuleBase, class_scores, classify,
                    classify_matrix, compute_dominance, dominance_score, firing_strength)

__version__ = "0.1.0"
