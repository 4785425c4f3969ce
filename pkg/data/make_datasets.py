"""Materialize the benchmark CSVs bundled under data/.

iris and wine are the real classic datasets, copied out of scikit-learn's
offline bundle. The other six files are deterministic synthetic stand-ins
that mirror the shape of the corresponding UCI/KEEL benchmarks (instances,
features, classes, class balance, and roughly comparable difficulty) so the
full evaluation harness runs without network access. Swap in the real CSVs
(same header layout, label in the last column) for faithful benchmark
numbers.

Run from the repository root:  python data/make_datasets.py
"""

from __future__ import annotations

import csv
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))


def write_csv(name, header, X, labels):
    path = os.path.join(HERE, name)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row, lab in zip(X, labels):
            w.writerow([f"{v:.6g}" for v in row] + [lab])
    print(f"wrote {path}: {X.shape[0]} rows, {X.shape[1]} features, "
          f"{len(set(labels))} classes")


def real_datasets():
    from sklearn.datasets import load_iris, load_wine

    iris = load_iris()
    write_csv("iris.csv",
              ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"],
              iris.data, [iris.target_names[t] for t in iris.target])

    wine = load_wine()
    names = [n.replace("/", "_") for n in wine.feature_names]
    write_csv("wine.csv", names + ["cultivar"],
              wine.data, [f"class_{t + 1}" for t in wine.target])


def gaussian_standin(name, header, class_counts, class_labels, centers, seed,
                     within_scale=1.0):
    """Class-conditional Gaussian blobs with the given per-class centers."""
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=np.float64)
    rows, labels = [], []
    for count, label, center in zip(class_counts, class_labels, centers):
        rows.append(rng.normal(center, within_scale, size=(count, centers.shape[1])))
        labels += [label] * count
    X = np.vstack(rows)
    perm = rng.permutation(X.shape[0])
    write_csv(name, header, X[perm], [labels[i] for i in perm])


def synthetic_datasets():
    # haberman: 306 x 3, classes 225/81. One dominant axis with heavy overlap.
    gaussian_standin(
        "haberman.csv", ["age", "year", "nodes", "survival"],
        class_counts=[225, 81], class_labels=["1", "2"],
        centers=[[0.0, 0.0, 0.0],
                 [0.5, 0.1, 1.55]],
        seed=101)

    # pima: 768 x 8, classes 500/268. A few informative features, most noise.
    zeros = [0.0] * 8
    pos = [0.4, 1.25, 0.1, 0.2, 0.3, 0.7, 0.3, 0.55]
    gaussian_standin(
        "pima.csv",
        ["preg", "plas", "pres", "skin", "insu", "mass", "pedi", "age", "class"],
        class_counts=[500, 268], class_labels=["tested_negative", "tested_positive"],
        centers=[zeros, pos], seed=102)

    # heart: 270 x 13, classes 150/120.
    absent = [0.0] * 13
    present = [0.9, 0.4, 1.1, 0.0, 0.2, 0.0, 0.3, -0.9, 0.8, 0.9, 0.5, 1.0, 0.7]
    gaussian_standin(
        "heart.csv",
        ["age", "sex", "chest_pain", "rest_bp", "chol", "fbs", "rest_ecg",
         "max_hr", "ex_angina", "oldpeak", "slope", "vessels", "thal", "disease"],
        class_counts=[150, 120], class_labels=["absent", "present"],
        centers=[absent, present], seed=103)

    # ionosphere: 351 x 33, classes 225/126.
    rng = np.random.default_rng(104)
    good = np.zeros(33)
    bad = np.zeros(33)
    informative = rng.choice(33, size=8, replace=False)
    bad[informative] = rng.normal(1.1, 0.3, size=8)
    gaussian_standin(
        "ionosphere.csv",
        [f"a{j:02d}" for j in range(1, 34)] + ["class"],
        class_counts=[225, 126], class_labels=["g", "b"],
        centers=[good, bad], seed=105)

    # glass: 214 x 9, six unbalanced classes, small and hard.
    rng = np.random.default_rng(106)
    centers = rng.normal(0.0, 0.9, size=(6, 9))
    gaussian_standin(
        "glass.csv",
        ["ri", "na", "mg", "al", "si", "k", "ca", "ba", "fe", "type"],
        class_counts=[70, 76, 17, 13, 9, 29],
        class_labels=["1", "2", "3", "5", "6", "7"],
        centers=centers, seed=107, within_scale=1.0)

    # balance: 625 x 4, classes 288/49/288; signal is a left/right contrast.
    gaussian_standin(
        "balance.csv",
        ["left_weight", "left_distance", "right_weight", "right_distance", "class"],
        class_counts=[288, 49, 288], class_labels=["L", "B", "R"],
        centers=[[0.9, 0.9, -0.9, -0.9],
                 [0.0, 0.0, 0.0, 0.0],
                 [-0.9, -0.9, 0.9, 0.9]],
        seed=108)


if __name__ == "__main__":
    synthetic_datasets()
    try:
        real_datasets()
    except ImportError:
        print("scikit-learn unavailable; iris.csv and wine.csv not regenerated")
