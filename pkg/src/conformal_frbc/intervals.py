"""Closed subintervals of [0, 1] and the admissible total order used to rank them.

Intervals are the truth-value carrier of the interval-valued type-2 path;
type-1 values travel through the same machinery as degenerate intervals
(lower == upper). The admissible order compares intervals lexicographically
through two convex-combination projections, which makes it a genuine total
order refining the usual product order.

Batch helpers at the bottom operate on float arrays of shape (..., 2) with
``[..., 0]`` the lower and ``[..., 1]`` the upper endpoint; they are what the
classifier and calibration code use in hot loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Interval:
    """A closed subinterval [lower, upper] of the unit interval.

    Degenerate intervals (lower == upper) are allowed and represent scalar
    truth values. Construction rejects lower > upper instead of swapping, so
    arithmetic bugs upstream surface immediately.
    """

    lower: float
    upper: float

    def __post_init__(self):
        lo, up = float(self.lower), float(self.upper)
        if not (np.isfinite(lo) and np.isfinite(up)):
            raise ValueError(f"interval endpoints must be finite, got [{lo}, {up}]")
        if not 0.0 <= lo <= up <= 1.0:
            raise ValueError(f"invalid interval: need 0 <= lower <= upper <= 1, got [{lo}, {up}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def degenerate(self) -> bool:
        return self.lower == self.upper

    def as_array(self) -> np.ndarray:
        return np.array([self.lower, self.upper])

    def __iter__(self):
        yield self.lower
        yield self.upper


@dataclass(frozen=True)
class OrderParams:
    """Parameters (alpha, beta) of the admissible order.

    alpha drives the primary comparison, beta breaks ties; alpha != beta is
    required for the order to be total. These are unrelated to the conformal
    significance level.
    """

    alpha: float = 0.5
    beta: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError(f"order params must lie in [0, 1], got ({self.alpha}, {self.beta})")
        if self.alpha == self.beta:
            raise ValueError("order params alpha and beta must differ for the order to be total")


def k_a(x: Interval, a: float) -> float:
    """Convex-combination projection (1 - a) * lower + a * upper.

    a = 0 gives the lower endpoint, a = 1 the upper, a = 0.5 the midpoint.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    return (1.0 - a) * x.lower + a * x.upper


def leq_admissible(x: Interval, y: Interval, params: OrderParams = OrderParams()) -> bool:
    """x <= y under the admissible total order.

    Lexicographic on the alpha- then beta-projections. Projection comparisons
    are exact float comparisons; a tolerance would break transitivity.
    """
    kx, ky = k_a(x, params.alpha), k_a(y, params.alpha)
    if kx != ky:
        return kx < ky
    return k_a(x, params.beta) <= k_a(y, params.beta)


def strictly_less(x: Interval, y: Interval, params: OrderParams = OrderParams()) -> bool:
    """x < y under the admissible order (x <= y but not y <= x)."""
    return leq_admissible(x, y, params) and not leq_admissible(y, x, params)


def one_minus(x: Interval) -> Interval:
    """Interval subtraction from [1, 1]: [1 - upper, 1 - lower].

    Turns a class-score interval into a nonconformity score; a perfect
    prediction [1, 1] maps to [0, 0].
    """
    return Interval(1.0 - x.upper, 1.0 - x.lower)


def interval_product(x: Interval, y: Interval) -> Interval:
    """Endpoint-wise product, valid because both operands are nonnegative."""
    return Interval(x.lower * y.lower, x.upper * y.upper)


def interval_max(x: Interval, y: Interval, params: OrderParams = OrderParams()) -> Interval:
    """Larger of the two intervals under the admissible order."""
    return y if leq_admissible(x, y, params) else x


# ---------------------------------------------------------------------------
# Batch operations on (..., 2) endpoint arrays.
# ---------------------------------------------------------------------------

def as_pairs(arr) -> np.ndarray:
    """Validate and return an (..., 2) endpoint array."""
    a = np.asarray(arr, dtype=np.float64)
    if a.shape[-1] != 2:
        raise ValueError(f"expected endpoint pairs in the last axis, got shape {a.shape}")
    if np.any(a[..., 0] > a[..., 1]) or np.any(a < 0.0) or np.any(a > 1.0):
        raise ValueError("endpoint array contains invalid intervals")
    return a


def k_values(pairs: np.ndarray, a: float) -> np.ndarray:
    """Convex-combination projection applied along the last axis."""
    return (1.0 - a) * pairs[..., 0] + a * pairs[..., 1]


def one_minus_pairs(pairs: np.ndarray) -> np.ndarray:
    out = np.empty_like(pairs)
    out[..., 0] = 1.0 - pairs[..., 1]
    out[..., 1] = 1.0 - pairs[..., 0]
    return out


def sort_pairs(pairs: np.ndarray, params: OrderParams) -> np.ndarray:
    """Sort a (n, 2) pool ascending under the admissible order."""
    k1 = k_values(pairs, params.alpha)
    k2 = k_values(pairs, params.beta)
    return pairs[np.lexsort((k2, k1))]


def geq_mask(pairs: np.ndarray, threshold: np.ndarray, params: OrderParams) -> np.ndarray:
    """Boolean mask of entries with threshold <= entry under the admissible order.

    ``threshold`` is a single (2,) interval; ``pairs`` may be any (..., 2)
    array. Equivalent to NOT (entry strictly below threshold).
    """
    k1 = k_values(pairs, params.alpha)
    k2 = k_values(pairs, params.beta)
    t1 = (1.0 - params.alpha) * threshold[0] + params.alpha * threshold[1]
    t2 = (1.0 - params.beta) * threshold[0] + params.beta * threshold[1]
    return (k1 > t1) | ((k1 == t1) & (k2 >= t2))


def lexi_argmax(k1: np.ndarray, k2: np.ndarray) -> int:
    """Index of the lexicographic (k1, k2) maximum; first index wins ties."""
    m1 = k1.max()
    candidates = np.flatnonzero(k1 == m1)
    return int(candidates[np.argmax(k2[candidates])]) if candidates.size > 1 else int(candidates[0])
