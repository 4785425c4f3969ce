import os

import numpy as np
import pytest

from conformal_frbc import Dataset, LinguisticVariable, MembershipFunction

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")


@pytest.fixture(scope="session")
def data_dir():
    return os.path.abspath(DATA_DIR)


def blob_dataset(n=200, gap=3.0, n_classes=2, n_features=2, seed=0, class_names=None):
    """Gaussian blobs separated along feature 0, one blob per class."""
    rng = np.random.default_rng(seed)
    per = n // n_classes
    rows, labels = [], []
    for c in range(n_classes):
        center = np.zeros(n_features)
        center[0] = c * gap
        rows.append(rng.normal(center, 1.0, size=(per, n_features)))
        labels += [c] * per
    X = np.vstack(rows)
    y = np.array(labels)
    perm = rng.permutation(len(y))
    names = class_names or [f"c{c}" for c in range(n_classes)]
    return Dataset(X[perm], y[perm], names, [f"f{j}" for j in range(n_features)])


@pytest.fixture
def blobs():
    return blob_dataset()


def dyadic_partition(feature_index=0, lower_scale=1.0):
    """Hand-built linguistic variable on [0, 1] with dyadic knots, so most
    membership values come out exact in binary floating point."""
    return LinguisticVariable(
        feature_index=feature_index,
        knots=(0.0, 0.25, 0.5, 0.75, 1.0),
        low=MembershipFunction(0.0, 0.0, 0.25, 0.5, lower_scale),
        medium=MembershipFunction(0.25, 0.5, 0.5, 0.75, lower_scale),
        high=MembershipFunction(0.5, 0.75, 1.0, 1.0, lower_scale),
    )


def two_feature_partitions(lower_scale=1.0):
    return [dyadic_partition(0, lower_scale), dyadic_partition(1, lower_scale)]
