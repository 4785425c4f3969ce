"""Tabular dataset ingestion, z-score normalization, and reproducible splits."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


class CsvFormatError(ValueError):
    """Raised when a CSV file cannot be parsed into a numeric dataset."""


@dataclass(frozen=True)
class Dataset:
    """An in-memory classification dataset.

    features is an (n, d) float matrix, labels an (n,) vector of dense class
    indices in 0..C-1. class_names records the original label values in
    first-appearance order, so index i maps back to class_names[i].
    Instances are immutable; the arrays are marked read-only.
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: list[str]
    feature_names: list[str]

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if X.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if len(self.class_names) < 2:
            raise ValueError("fewer than 2 classes")
        if y.size and (y.min() < 0 or y.max() >= len(self.class_names)):
            raise ValueError("label index outside 0..C-1")
        if X.shape[1] != len(self.feature_names):
            raise ValueError(f"{X.shape[1]} feature columns but {len(self.feature_names)} names")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def n_instances(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def subset(self, indices) -> "Dataset":
        """New Dataset restricted to the given row indices."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.features[idx], self.labels[idx], self.class_names, self.feature_names)

    def with_features(self, X: np.ndarray) -> "Dataset":
        """Same rows and labels, replaced feature matrix (e.g. after scaling)."""
        return Dataset(X, self.labels, self.class_names, self.feature_names)


@dataclass(frozen=True)
class SplitSpec:
    """Controls the train/test split and the calibration folds."""

    test_fraction: float = 0.2
    calibration_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if self.calibration_folds < 2:
            raise ValueError(f"calibration_folds must be >= 2, got {self.calibration_folds}")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature (mean, std) of the training data; applies the same affine
    transform to any matrix with matching width."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std

    def invert(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) * self.std + self.mean

    def to_json(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "NormalizationParams":
        return cls(np.asarray(obj["mean"], dtype=np.float64),
                   np.asarray(obj["std"], dtype=np.float64))


def load_csv(path, label_column=None) -> Dataset:
    """Load a headered CSV into a Dataset.

    label_column selects the class column by header name or integer position;
    when omitted the last column is used. Labels are mapped to dense indices
    in first-appearance order. Feature cells must parse as finite numbers;
    the error for a bad cell names its (1-based) data row and column.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = [row for row in reader if row]
    except OSError as exc:
        raise CsvFormatError(f"cannot read {path}: {exc}") from exc
    if len(rows) < 2:
        raise CsvFormatError(f"{path}: need a header row and at least one data row")

    header = [h.strip() for h in rows[0]]
    width = len(header)
    if label_column is None:
        label_idx = width - 1
    elif isinstance(label_column, int):
        if not -width <= label_column < width:
            raise CsvFormatError(f"label column index {label_column} out of range for {width} columns")
        label_idx = label_column % width
    else:
        if label_column not in header:
            raise CsvFormatError(f"label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)

    feature_names = [h for i, h in enumerate(header) if i != label_idx]
    features = np.empty((len(rows) - 1, width - 1), dtype=np.float64)
    raw_labels: list[str] = []
    for r, row in enumerate(rows[1:], start=1):
        if len(row) != width:
            raise CsvFormatError(f"row {r}: expected {width} cells, got {len(row)} (ragged row)")
        c_out = 0
        for c, cell in enumerate(row):
            if c == label_idx:
                label = cell.strip()
                if not label:
                    raise CsvFormatError(f"row {r}: empty label cell")
                raw_labels.append(label)
                continue
            try:
                value = float(cell)
            except ValueError:
                raise CsvFormatError(
                    f"row {r}, column {header[c]!r}: non-numeric cell {cell.strip()!r}") from None
            if not np.isfinite(value):
                raise CsvFormatError(f"row {r}, column {header[c]!r}: non-finite value {cell.strip()!r}")
            features[r - 1, c_out] = value
            c_out += 1

    class_names: list[str] = []
    index_of: dict[str, int] = {}
    labels = np.empty(len(raw_labels), dtype=np.int64)
    for i, lab in enumerate(raw_labels):
        if lab not in index_of:
            index_of[lab] = len(class_names)
            class_names.append(lab)
        labels[i] = index_of[lab]
    if len(class_names) < 2:
        raise CsvFormatError(f"{path}: fewer than 2 classes (found {class_names})")

    return Dataset(features, labels, class_names, feature_names)


def normalize(d: Dataset) -> tuple[Dataset, NormalizationParams]:
    """Z-score the features (population std) and return the fitted params.

    Constant columns map to all zeros with std recorded as 1, keeping the
    transform well-defined and invertible. Statistics belong to the data
    given here; apply the returned params to any held-out data.
    """
    if d.n_instances < 2:
        raise ValueError("normalization needs at least 2 rows")
    mean = d.features.mean(axis=0)
    std = d.features.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    params = NormalizationParams(mean, std)
    return d.with_features(params.apply(d.features)), params


def split(d: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, list[tuple[np.ndarray, np.ndarray]]]:
    """Deterministic train/test split plus K calibration folds over the train part.

    Stratifies by class when every class has at least `calibration_folds`
    instances, otherwise falls back to a plain shuffled split. Folds are
    returned as (fit_indices, cal_indices) pairs relative to the returned
    train Dataset; the cal parts partition the train rows exactly.
    """
    n = d.n_instances
    n_test = int(round(n * spec.test_fraction))
    n_test = min(max(n_test, 1), n - 1)
    n_train = n - n_test
    if spec.calibration_folds > n_train:
        raise ValueError(
            f"calibration_folds={spec.calibration_folds} exceeds training size {n_train}")

    rng = np.random.default_rng(spec.seed)
    counts = np.bincount(d.labels, minlength=d.n_classes)
    stratified = bool(np.all(counts >= spec.calibration_folds))

    if stratified:
        test_idx = _stratified_test_indices(d.labels, counts, n_test, rng)
    else:
        perm = rng.permutation(n)
        test_idx = np.sort(perm[:n_test])
    test_mask = np.zeros(n, dtype=bool)
    test_mask[test_idx] = True
    train_idx = np.flatnonzero(~test_mask)

    train, test = d.subset(train_idx), d.subset(test_idx)
    folds = _calibration_folds(train.labels, spec.calibration_folds, stratified, rng)
    return train, test, folds


def _stratified_test_indices(labels, counts, n_test, rng) -> np.ndarray:
    # Largest-remainder apportionment of the test quota across classes.
    fractions = counts * (n_test / counts.sum())
    quota = np.floor(fractions).astype(int)
    remainder = fractions - quota
    short = n_test - quota.sum()
    for c in np.argsort(-remainder, kind="stable")[:short]:
        quota[c] += 1
    quota = np.minimum(quota, counts)
    picked = []
    for c in range(len(counts)):
        members = np.flatnonzero(labels == c)
        picked.append(rng.permutation(members)[: quota[c]])
    return np.sort(np.concatenate(picked))


def _calibration_folds(train_labels, k, stratified, rng):
    n_train = train_labels.shape[0]
    assignment = np.empty(n_train, dtype=np.int64)
    if stratified:
        start = 0  # rotate fold offsets across classes so small classes still fill every fold
        for c in np.unique(train_labels):
            members = rng.permutation(np.flatnonzero(train_labels == c))
            assignment[members] = (np.arange(members.size) + start) % k
            start += members.size
    else:
        assignment[rng.permutation(n_train)] = np.arange(n_train) % k
    folds = []
    for f in range(k):
        cal = np.flatnonzero(assignment == f)
        fit = np.flatnonzero(assignment != f)
        if cal.size == 0:
            raise ValueError(f"fold {f} has zero calibration instances")
        folds.append((fit, cal))
    return folds
