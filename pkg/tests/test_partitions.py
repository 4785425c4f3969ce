import numpy as np
import pytest

from conformal_frbc import (Dataset, DegeneratePartitionError, Interval,
                            build_partitions, membership, membership_matrices,
                            normalize)
from conformal_frbc.partitions import LABELS, MembershipFunction

from conftest import blob_dataset


@pytest.fixture(scope="module")
def train():
    d, _ = normalize(blob_dataset(n=400, seed=5))
    return d


@pytest.fixture(scope="module")
def t1_vars(train):
    return build_partitions(train, "t1")


@pytest.fixture(scope="module")
def ivt2_vars(train):
    return build_partitions(train, "ivt2")


class TestBuild:
    def test_knots_are_data_quantiles(self, train, t1_vars):
        col = train.features[:, 0]
        expected = np.quantile(col, [0.0, 0.2, 0.5, 0.8, 1.0])
        assert np.allclose(t1_vars[0].knots, expected)

    def test_three_ordered_labels(self, t1_vars):
        lv = t1_vars[0]
        peaks = [lv.low.b, lv.medium.b, lv.high.b]
        assert peaks[0] < peaks[1] < peaks[2]

    def test_minimum_has_full_low_membership(self, t1_vars):
        lv = t1_vars[0]
        assert membership(lv, "low", lv.knots[0]) == Interval(1.0, 1.0)

    def test_median_has_full_medium_membership(self, t1_vars):
        lv = t1_vars[0]
        assert membership(lv, "medium", lv.knots[2]) == Interval(1.0, 1.0)

    def test_q80_has_full_high_membership(self, t1_vars):
        lv = t1_vars[0]
        assert membership(lv, "high", lv.knots[3]) == Interval(1.0, 1.0)

    def test_low_plateau_extends_to_q20(self, t1_vars):
        lv = t1_vars[0]
        assert membership(lv, "low", lv.knots[1]) == Interval(1.0, 1.0)

    def test_ivt2_lower_is_capped_at_08(self, ivt2_vars):
        lv = ivt2_vars[0]
        m = membership(lv, "medium", lv.knots[2])
        assert m == Interval(0.8, 1.0)

    def test_degenerate_feature_rejected(self):
        X = np.column_stack([np.full(10, 3.0), np.arange(10, dtype=float)])
        d = Dataset(X, np.array([0, 1] * 5), ["a", "b"], ["f0", "f1"])
        with pytest.raises(DegeneratePartitionError, match="feature 0"):
            build_partitions(d, "t1")

    def test_too_few_rows_rejected(self):
        d = Dataset(np.arange(8, dtype=float).reshape(4, 2),
                    np.array([0, 1, 0, 1]), ["a", "b"], ["f0", "f1"])
        with pytest.raises(ValueError, match="at least 5 rows"):
            build_partitions(d, "t1")

    def test_bad_kind_and_cap(self, train):
        with pytest.raises(ValueError):
            build_partitions(train, "type3")
        with pytest.raises(ValueError):
            build_partitions(train, "ivt2", lower_cap=0.0)


class TestMembership:
    def test_linear_descent_midpoint(self, t1_vars):
        # halfway between q20 and q50 the low label reads one half
        lv = t1_vars[0]
        mid = 0.5 * (lv.knots[1] + lv.knots[2])
        m = membership(lv, "low", mid)
        assert m.lower == pytest.approx(0.5, abs=1e-12)
        assert m.degenerate

    def test_t1_degenerate_everywhere(self, t1_vars):
        lv = t1_vars[0]
        for x in np.linspace(lv.knots[0], lv.knots[4], 33):
            for label in LABELS:
                assert membership(lv, label, x).degenerate

    def test_ivt2_containment(self, ivt2_vars):
        lv = ivt2_vars[0]
        for x in np.linspace(lv.knots[0] - 1, lv.knots[4] + 1, 57):
            for label in LABELS:
                m = membership(lv, label, x)
                assert m.lower <= m.upper
                assert m.lower <= 0.8 + 1e-15

    def test_clamps_outside_training_range(self, t1_vars):
        lv = t1_vars[0]
        below, above = lv.knots[0] - 5.0, lv.knots[4] + 5.0
        assert membership(lv, "low", below) == membership(lv, "low", lv.knots[0])
        assert membership(lv, "high", above) == Interval(1.0, 1.0)
        assert membership(lv, "low", above) == Interval(0.0, 0.0)

    def test_partition_covers_range(self, t1_vars):
        lv = t1_vars[0]
        for x in np.linspace(lv.knots[0], lv.knots[4], 301):
            assert max(membership(lv, label, x).upper for label in LABELS) > 0.0

    def test_piecewise_linear_within_segments(self, t1_vars):
        lv = t1_vars[0]
        for mf_name in LABELS:
            mf = lv.label(mf_name)
            for lo, hi in [(mf.a, mf.b), (mf.b, mf.c), (mf.c, mf.d)]:
                if hi <= lo:
                    continue
                mid = 0.5 * (lo + hi)
                expected = 0.5 * (mf.upper(lo) + mf.upper(hi))
                assert mf.upper(mid) == pytest.approx(expected, abs=1e-12)

    def test_unknown_label_rejected(self, t1_vars):
        with pytest.raises(ValueError):
            membership(t1_vars[0], "huge", 0.0)


class TestMembershipMatrices:
    def test_matches_scalar_membership(self, train, ivt2_vars):
        X = train.features[:25]
        lo, up = membership_matrices(ivt2_vars, X)
        for i in range(X.shape[0]):
            for j, lv in enumerate(ivt2_vars):
                for k, label in enumerate(LABELS):
                    m = membership(lv, label, X[i, j])
                    assert lo[i, j, k] == m.lower
                    assert up[i, j, k] == m.upper

    def test_t1_lower_equals_upper_bitwise(self, train, t1_vars):
        lo, up = membership_matrices(t1_vars, train.features)
        assert np.array_equal(lo, up)

    def test_cap_one_ivt2_equals_t1_bitwise(self, train):
        t1_lo, t1_up = membership_matrices(build_partitions(train, "t1"), train.features)
        iv_lo, iv_up = membership_matrices(build_partitions(train, "ivt2", lower_cap=1.0),
                                           train.features)
        assert np.array_equal(t1_lo, iv_lo) and np.array_equal(t1_up, iv_up)

    def test_shape_mismatch_rejected(self, t1_vars):
        with pytest.raises(ValueError):
            membership_matrices(t1_vars, np.zeros((4, 5)))


class TestMembershipFunction:
    def test_knot_validation(self):
        with pytest.raises(ValueError):
            MembershipFunction(0.5, 0.4, 0.6, 0.7)

    def test_zero_width_segments(self):
        step = MembershipFunction(0.0, 0.0, 0.0, 1.0)
        assert step.upper(0.0) == 1.0
        assert step.upper(0.5) == 0.5
        spike = MembershipFunction(0.3, 0.3, 0.3, 0.3)
        assert spike.upper(0.3) == 1.0
        assert spike.upper(0.31) == 0.0
