"""Quantile-based linguistic partitions (low / medium / high) per feature.

Each feature gets three trapezoidal membership functions anchored at the
empirical min, 0.2, 0.5, 0.8 quantiles and max of the training column:

    low    : plateau from min to q20, descending to zero at q50
    medium : rises from q20, peaks at q50, descends to q80
    high   : rises from q50, plateau from q80 to max

The interval-valued variant scales the whole upper function by a cap
(default 0.8) to obtain the lower membership, so every evaluation yields an
interval [cap * u, u]; the type-1 variant uses cap 1.0 and yields degenerate
intervals. Inputs outside the training range clamp to the boundary value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .intervals import Interval

KIND_T1 = "t1"
KIND_IVT2 = "ivt2"
LABELS = ("low", "medium", "high")
DEFAULT_LOWER_CAP = 0.8


class DegeneratePartitionError(ValueError):
    """Raised when a feature has too few distinct values to partition."""


@dataclass(frozen=True)
class MembershipFunction:
    """Trapezoid (a <= b <= c <= d) for the upper membership plus the uniform
    scale producing the lower membership (1.0 on the type-1 path)."""

    a: float
    b: float
    c: float
    d: float
    lower_scale: float = 1.0

    def __post_init__(self):
        if not self.a <= self.b <= self.c <= self.d:
            raise ValueError(f"trapezoid knots must be sorted, got {(self.a, self.b, self.c, self.d)}")
        if not 0.0 < self.lower_scale <= 1.0:
            raise ValueError(f"lower_scale must lie in (0, 1], got {self.lower_scale}")

    def upper(self, x):
        """Upper membership of x (scalar or array), piecewise linear into [0, 1]."""
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros_like(x)
        rising = (x > self.a) & (x < self.b)
        if self.b > self.a:
            out = np.where(rising, (x - self.a) / (self.b - self.a), out)
        out = np.where((x >= self.b) & (x <= self.c), 1.0, out)
        falling = (x > self.c) & (x < self.d)
        if self.d > self.c:
            out = np.where(falling, (self.d - x) / (self.d - self.c), out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class LinguisticVariable:
    """The three labelled membership functions of one feature, plus the data
    range used for clamping and the quantile knots they were built from."""

    feature_index: int
    knots: tuple[float, float, float, float, float]
    low: MembershipFunction
    medium: MembershipFunction
    high: MembershipFunction

    @property
    def domain(self) -> tuple[float, float]:
        return self.knots[0], self.knots[4]

    def label(self, name: str) -> MembershipFunction:
        if name not in LABELS:
            raise ValueError(f"unknown label {name!r}, expected one of {LABELS}")
        return getattr(self, name)

    @property
    def lower_scale(self) -> float:
        return self.low.lower_scale


def build_partitions(train, kind: str = KIND_T1, lower_cap: float = DEFAULT_LOWER_CAP):
    """Build one LinguisticVariable per feature from training data quantiles.

    train may be a Dataset or a plain (n, d) matrix; quantiles use linear
    interpolation between order statistics. Features with fewer than 2
    distinct values cannot support a partition and raise
    DegeneratePartitionError.
    """
    X = getattr(train, "features", train)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected an (n, d) matrix, got shape {X.shape}")
    if X.shape[0] < 5:
        raise ValueError("need at least 5 rows to place quantile knots")
    if kind not in (KIND_T1, KIND_IVT2):
        raise ValueError(f"kind must be {KIND_T1!r} or {KIND_IVT2!r}, got {kind!r}")
    scale = 1.0 if kind == KIND_T1 else float(lower_cap)
    if not 0.0 < scale <= 1.0:
        raise ValueError(f"lower_cap must lie in (0, 1], got {lower_cap}")

    variables = []
    quantiles = np.quantile(X, [0.0, 0.2, 0.5, 0.8, 1.0], axis=0)
    for j in range(X.shape[1]):
        q0, q20, q50, q80, q100 = (float(q) for q in quantiles[:, j])
        if q0 == q100:
            raise DegeneratePartitionError(
                f"feature {j} has fewer than 2 distinct values; cannot build a partition")
        variables.append(LinguisticVariable(
            feature_index=j,
            knots=(q0, q20, q50, q80, q100),
            low=MembershipFunction(q0, q0, q20, q50, scale),
            medium=MembershipFunction(q20, q50, q50, q80, scale),
            high=MembershipFunction(q50, q80, q100, q100, scale),
        ))
    return variables


def membership(lv: LinguisticVariable, label: str, x: float) -> Interval:
    """Membership interval of a single value; degenerate on the type-1 path."""
    lo_dom, hi_dom = lv.domain
    xc = min(max(float(x), lo_dom), hi_dom)
    mf = lv.label(label)
    u = mf.upper(xc)
    return Interval(mf.lower_scale * u, u)


def membership_matrices(variables, X) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper membership tensors of shape (n, d, 3) for a data matrix.

    The label axis follows LABELS order (low, medium, high). This is the
    precomputation the rule engine and the GA fitness loop run on.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if d != len(variables):
        raise ValueError(f"matrix has {d} columns but {len(variables)} partitions given")
    upper = np.empty((n, d, 3))
    scales = np.empty(d)
    for j, lv in enumerate(variables):
        lo_dom, hi_dom = lv.domain
        col = np.clip(X[:, j], lo_dom, hi_dom)
        for k, name in enumerate(LABELS):
            upper[:, j, k] = lv.label(name).upper(col)
        scales[j] = lv.lower_scale
    lower = scales[None, :, None] * upper
    return lower, upper
