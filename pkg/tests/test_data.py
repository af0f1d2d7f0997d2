import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qnnsim.data import (DataError, Dataset, code_length, code_table, label_to_code, load_csv,
                         stratified_split, write_csv)
from qnnsim.datasets import EXPECTED_SHAPES, load_benchmark, parse_keel


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_load_with_header_and_first_appearance_labels(tmp_path):
    ds = load_csv(write(tmp_path, "a,b,label\n1,2,yes\n3,4,no\n5,6,yes\n"))
    assert ds.feature_names == ("a", "b")
    assert ds.class_names == ("yes", "no")
    assert ds.labels.tolist() == [0, 1, 0]
    np.testing.assert_array_equal(ds.features, [[1, 2], [3, 4], [5, 6]])


def test_load_without_header_and_options(tmp_path):
    ds = load_csv(write(tmp_path, "b;1.5;2\na;0.5;1\n"), label_column=0, delimiter=";",
                  label_map=["a", "b"])
    assert ds.labels.tolist() == [1, 0]
    assert ds.features.tolist() == [[1.5, 2.0], [0.5, 1.0]]


def test_load_by_label_name(tmp_path):
    ds = load_csv(write(tmp_path, "cls,x\nu,1\nv,2\n"), label_column="cls")
    assert ds.class_names == ("u", "v") and ds.n_features == 1


def test_missing_rows_dropped_and_counted(tmp_path, caplog):
    ds = load_csv(write(tmp_path, "x,y,c\n1,?,a\n2,3,b\n,4,a\n5,6,a\n"))
    assert ds.n_samples == 2 and ds.dropped_rows == 2
    assert "dropped 2" in caplog.text


@pytest.mark.parametrize("text, where", [
    ("x,c\n1,a\n2,3,b\n", "row 3"),
    ("x,c\n1,a\nfoo,b\n", "column 0"),
])
def test_structured_errors(tmp_path, text, where):
    with pytest.raises(DataError, match=where):
        load_csv(write(tmp_path, text))


def test_unknown_label_with_mapping(tmp_path):
    with pytest.raises(DataError, match="unknown label"):
        load_csv(write(tmp_path, "1,a\n2,z\n"), label_map={"a": 0, "b": 1})


def test_unreadable_file(tmp_path):
    with pytest.raises(DataError):
        load_csv(tmp_path / "missing.csv")


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    ds = Dataset(rng.normal(size=(20, 3)), rng.integers(0, 3, 20), ("p", "q", "r"), ("f", "g", "h"))
    write_csv(ds, tmp_path / "rt.csv")
    back = load_csv(tmp_path / "rt.csv", label_map=ds.class_names)
    assert np.array_equal(back.features, ds.features)
    assert np.array_equal(back.labels, ds.labels)
    assert back.feature_names == ds.feature_names


def test_dataset_validation():
    with pytest.raises(DataError):
        Dataset(np.zeros((3, 2)), [0, 1], ("a", "b"))
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 2)), [0, 2], ("a", "b"))


@pytest.mark.parametrize("name", sorted(EXPECTED_SHAPES))
def test_prepared_benchmarks(benchmark_csvs, name):
    ds = load_csv(benchmark_csvs[name])
    assert (ds.n_samples, ds.n_features, ds.class_count) == EXPECTED_SHAPES[name]


def test_iris_split_counts(benchmark_csvs):
    sp = stratified_split(load_csv(benchmark_csvs["iris"]), 0.75, seed=1)
    assert sp.train.n_samples == 111 and sp.test.n_samples == 39
    assert np.bincount(sp.train.labels).tolist() == [37, 37, 37]


def test_breast_cancer_split_partition(benchmark_csvs):
    ds = load_csv(benchmark_csvs["breast_cancer"])
    sp = stratified_split(ds, seed=4)
    assert sp.train.n_samples + sp.test.n_samples == 683
    assert not set(sp.train_index) & set(sp.test_index)


def test_split_deterministic_and_seed_sensitive():
    ds = Dataset(np.arange(40.0)[:, None], np.arange(40) % 2, ("a", "b"))
    a, b, c = (stratified_split(ds, seed=s) for s in (3, 3, 4))
    assert np.array_equal(a.train_index, b.train_index)
    assert not np.array_equal(a.train_index, c.train_index)


def test_split_rejects_singleton_class():
    ds = Dataset(np.zeros((3, 1)), [0, 0, 1], ("a", "b"))
    with pytest.raises(DataError):
        stratified_split(ds)


def test_label_codes():
    assert label_to_code(0, 2) == (0,) and label_to_code(1, 2) == (1,)
    assert [label_to_code(k, 3) for k in range(3)] == [(0, 0), (0, 1), (1, 0)]
    with pytest.raises(ValueError):
        label_to_code(3, 3)
    with pytest.raises(ValueError):
        code_length(1)
    assert code_table(5).shape == (5, 3)


@settings(max_examples=50)
@given(st.integers(2, 300))
def test_code_length_is_ceil_log2(c):
    assert 2 ** code_length(c) >= c > 2 ** (code_length(c) - 1)


def test_parse_keel():
    text = ("@relation t\n@attribute a real\n@attribute b real\n@attribute Class {p, n}\n"
            "@data\n1.0, 2.0, n\n3.0, 4.0, p\n")
    ds = parse_keel(text, {"n": "neg", "p": "pos"})
    assert ds.class_names == ("neg", "pos") and ds.feature_names == ("a", "b")
    assert ds.features.tolist() == [[1.0, 2.0], [3.0, 4.0]]


def test_unknown_benchmark():
    with pytest.raises(KeyError):
        load_benchmark("mnist")


def test_keel_from_archive(tmp_path):
    import zipfile

    from qnnsim.datasets import _keel_text

    whl = tmp_path / "pkg.whl"
    with zipfile.ZipFile(whl, "w") as zf:
        zf.writestr("imbalanced_databases/data/toy/toy.dat", "@data\n1,p\n")
    assert _keel_text("toy", whl) == "@data\n1,p\n"
    with pytest.raises(DataError):
        _keel_text("other", whl)
