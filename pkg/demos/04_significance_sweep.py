"""Sweeping the significance level: set size, non-empty fraction, rule F1.

With interval-valued (IV-T2) memberships on iris, this walks significance
from nearly 0 to 0.95 and tabulates how prediction sets shrink, when empty
predictions appear, and how the rule-wise conformal F1 evolves. The very
first level is below 1/(n_cal+1), where the quantile convention forces
maximal sets, so the table starts from the full class count.
"""

import os

from conformal_frbc import GAConfig, SplitSpec, load_csv, run_experiment, sweep_significance

HERE = os.path.dirname(os.path.abspath(__file__))
data = load_csv(os.path.join(HERE, os.pardir, "data", "iris.csv"))

model, test_raw = run_experiment(
    data, SplitSpec(test_fraction=0.2, calibration_folds=5, seed=1),
    kind="ivt2", ga_config=GAConfig(population_size=20, generations=25, seed=1))
test = test_raw.with_features(model.norm.apply(test_raw.features))

grid = [0.005] + [round(0.05 * i, 10) for i in range(1, 20)]
result = sweep_significance(model.rulebase, model.calibration, test, grid)

print(f"{'significance':>12} {'set size':>9} {'non-empty':>10} {'coverage':>9} {'mean rule F1':>13}")
for i, level in enumerate(result.grid):
    print(f"{level:>12} {result.mean_set_size[i]:>9.2f} {result.nonempty_frac[i]:>10.2f} "
          f"{result.coverage[i]:>9.2f} {result.mean_rule_f1[i]:>13.3f}")

print()
print(f"Lowest level with all-non-empty predictions: {result.min_level_all_nonempty}")
print(f"Rules in the base: {len(model.rulebase.rules)}")
