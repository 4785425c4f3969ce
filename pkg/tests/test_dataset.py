import numpy as np
import pytest

from conformal_frbc import (CsvFormatError, Dataset, SplitSpec, load_csv, normalize,
                            split)

IRIS_HEAD = "sepal_length,sepal_width,petal_length,petal_width,species\n"


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestLoadCsv:
    def test_basic_load_and_label_mapping(self, tmp_path):
        path = write(tmp_path, "a,b,label\n1,2,x\n3,4,y\n5,6,x\n")
        d = load_csv(path)
        assert d.n_instances == 3 and d.n_features == 2
        assert d.class_names == ["x", "y"]  # first-appearance order
        assert d.labels.tolist() == [0, 1, 0]
        assert d.feature_names == ["a", "b"]

    def test_label_by_name_and_index(self, tmp_path):
        path = write(tmp_path, "lab,a,b\nx,1,2\ny,3,4\n")
        by_name = load_csv(path, "lab")
        by_index = load_csv(path, 0)
        assert by_name.feature_names == ["a", "b"]
        assert by_name.labels.tolist() == by_index.labels.tolist() == [0, 1]

    def test_default_label_is_last_column(self, tmp_path):
        path = write(tmp_path, "a,b,c\n1,2,x\n3,4,y\n")
        assert load_csv(path).feature_names == ["a", "b"]

    def test_bundled_iris_dimensions(self, data_dir):
        d = load_csv(f"{data_dir}/iris.csv")
        assert d.n_instances == 150
        assert d.n_features == 4
        assert d.n_classes == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(CsvFormatError, match="cannot read"):
            load_csv(str(tmp_path / "nope.csv"))

    def test_single_class_rejected(self, tmp_path):
        path = write(tmp_path, "a,label\n1,x\n2,x\n3,x\n")
        with pytest.raises(CsvFormatError, match="fewer than 2 classes"):
            load_csv(path)

    def test_non_numeric_cell_names_row_and_column(self, tmp_path):
        rows = [f"{i},{i * 2},x" if i % 2 else f"{i},{i * 2},y" for i in range(1, 10)]
        rows[6] = "abc,14,x"  # data row 7
        path = write(tmp_path, "a,b,label\n" + "\n".join(rows) + "\n")
        with pytest.raises(CsvFormatError, match="row 7.*'a'"):
            load_csv(path)

    def test_ragged_row_rejected(self, tmp_path):
        path = write(tmp_path, "a,b,label\n1,2,x\n3,y\n")
        with pytest.raises(CsvFormatError, match="ragged"):
            load_csv(path)

    def test_non_finite_rejected(self, tmp_path):
        path = write(tmp_path, "a,label\ninf,x\n2,y\n")
        with pytest.raises(CsvFormatError, match="non-finite"):
            load_csv(path)

    def test_unknown_label_column(self, tmp_path):
        path = write(tmp_path, "a,b\n1,x\n2,y\n")
        with pytest.raises(CsvFormatError, match="not in header"):
            load_csv(path, "missing")


class TestDatasetInvariants:
    def test_row_count_mismatch(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((3, 2)), np.zeros(2, dtype=int), ["a", "b"], ["f0", "f1"])

    def test_label_out_of_range(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((2, 1)), np.array([0, 5]), ["a", "b"], ["f0"])

    def test_immutable_arrays(self, blobs):
        with pytest.raises(ValueError):
            blobs.features[0, 0] = 99.0


class TestNormalize:
    def test_two_point_column(self):
        d = Dataset(np.array([[2.0], [4.0]]), np.array([0, 1]), ["a", "b"], ["f0"])
        normed, params = normalize(d)
        assert normed.features[:, 0].tolist() == [-1.0, 1.0]  # mean 3, population std 1
        assert params.mean[0] == 3.0 and params.std[0] == 1.0

    def test_idempotent_on_standardized_data(self, blobs):
        once, _ = normalize(blobs)
        twice, _ = normalize(once)
        assert np.allclose(once.features, twice.features, atol=1e-9)

    def test_constant_column_zeroed_with_unit_std(self):
        d = Dataset(np.array([[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]]),
                    np.array([0, 1, 0]), ["a", "b"], ["f0", "f1"])
        normed, params = normalize(d)
        assert np.all(normed.features[:, 0] == 0.0)
        assert params.std[0] == 1.0

    def test_columns_standardized(self, blobs):
        normed, _ = normalize(blobs)
        assert np.all(np.abs(normed.features.mean(axis=0)) < 1e-9)
        assert np.all(np.abs(normed.features.std(axis=0) - 1.0) < 1e-9)

    def test_round_trip(self, blobs):
        normed, params = normalize(blobs)
        back = params.invert(normed.features)
        assert np.all(np.abs(back - blobs.features) < 1e-9)
        # constant column round-trips too
        const = Dataset(np.full((4, 1), 7.5), np.array([0, 1, 0, 1]), ["a", "b"], ["f0"])
        n2, p2 = normalize(const)
        assert np.all(p2.invert(n2.features) == 7.5)

    def test_needs_two_rows(self):
        d = Dataset(np.array([[1.0]]), np.array([0]), ["a", "b"], ["f0"])
        with pytest.raises(ValueError):
            normalize(d)


class TestSplit:
    def test_80_20_arithmetic(self, data_dir):
        d = load_csv(f"{data_dir}/iris.csv")
        train, test, folds = split(d, SplitSpec(0.2, 5, 0))
        assert train.n_instances == 120 and test.n_instances == 30
        assert [len(cal) for _, cal in folds] == [24] * 5

    def test_deterministic(self, blobs):
        spec = SplitSpec(0.25, 4, 42)
        t1, s1, f1 = split(blobs, spec)
        t2, s2, f2 = split(blobs, spec)
        assert np.array_equal(t1.features, t2.features)
        assert np.array_equal(s1.labels, s2.labels)
        for (fit_a, cal_a), (fit_b, cal_b) in zip(f1, f2):
            assert np.array_equal(fit_a, fit_b) and np.array_equal(cal_a, cal_b)

    def test_different_seeds_differ(self, blobs):
        _, test_a, _ = split(blobs, SplitSpec(0.2, 5, 0))
        _, test_b, _ = split(blobs, SplitSpec(0.2, 5, 1))
        assert not np.array_equal(test_a.features, test_b.features)

    def test_folds_partition_train(self, blobs):
        train, _, folds = split(blobs, SplitSpec(0.2, 5, 3))
        all_cal = np.concatenate([cal for _, cal in folds])
        assert np.array_equal(np.sort(all_cal), np.arange(train.n_instances))
        for fit, cal in folds:
            assert np.intersect1d(fit, cal).size == 0
            assert np.array_equal(np.sort(np.concatenate([fit, cal])),
                                  np.arange(train.n_instances))

    def test_stratified_when_counts_allow(self, data_dir):
        d = load_csv(f"{data_dir}/iris.csv")
        train, test, _ = split(d, SplitSpec(0.2, 5, 0))
        assert np.bincount(test.labels).tolist() == [10, 10, 10]
        assert np.bincount(train.labels).tolist() == [40, 40, 40]

    def test_plain_split_for_tiny_classes(self):
        X = np.arange(40, dtype=float).reshape(20, 2)
        y = np.array([0] * 17 + [1] * 3)  # class 1 < 5 folds -> no stratification
        d = Dataset(X, y, ["a", "b"], ["f0", "f1"])
        train, test, folds = split(d, SplitSpec(0.2, 5, 0))
        assert train.n_instances == 16 and test.n_instances == 4
        assert len(folds) == 5

    def test_folds_exceeding_train_size_rejected(self):
        X = np.arange(12, dtype=float).reshape(6, 2)
        d = Dataset(X, np.array([0, 1, 0, 1, 0, 1]), ["a", "b"], ["f0", "f1"])
        with pytest.raises(ValueError, match="exceeds training size"):
            split(d, SplitSpec(0.5, 4, 0))

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SplitSpec(test_fraction=0.0)
        with pytest.raises(ValueError):
            SplitSpec(calibration_folds=1)
