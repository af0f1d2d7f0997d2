import json
import math

import numpy as np
import pytest

from qnnsim import harness, mlp, qnn
from qnnsim.data import Dataset
from qnnsim.encoding import compute_stats
from qnnsim.harness import ConfigError, ExperimentConfig, RunIncompleteError
from qnnsim.metrics import read_metrics


def cfg(path, tmp_path, **kw):
    return ExperimentConfig(dataset=str(path), out=str(tmp_path / "run"), **kw)


# config

def test_resolved_defaults_per_dataset():
    bc = ExperimentConfig(dataset="x/breast_cancer.csv").resolved()
    assert (bc.epochs, bc.lr, bc.hidden) == (1000, 0.5, (10, 6))
    assert ExperimentConfig(dataset="diabetes.csv").resolved().epochs == 4000
    assert ExperimentConfig(dataset="iris.csv").resolved().epochs == 2000
    nn = ExperimentConfig(dataset="iris.csv", model="nn").resolved()
    assert (nn.lr, nn.optimizer) == (0.05, "adam")
    assert ExperimentConfig(dataset="iris.csv", epochs=7, lr=0.3).resolved().epochs == 7


@pytest.mark.parametrize("kw", [
    {"epochs": 0}, {"lr": 0.0}, {"lr": -1.0}, {"hidden": (10, 0)}, {"model": "svm"},
    {"stats_scope": "test"}, {"train_fraction": 1.0}, {"angle_range": 0.0},
    {"optimizer": "adam"}, {"init": "zeros"}, {"activation": "relu"},
])
def test_invalid_config(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(dataset="iris.csv", **kw).resolved()


def test_config_dict_round_trip():
    c = ExperimentConfig(dataset="a.csv", hidden=(3, 2), seed=4)
    assert ExperimentConfig.from_dict(json.loads(json.dumps(c.to_dict()))) == c
    assert ExperimentConfig.from_dict({"dataset": "a.csv", "hidden": "5,4"}).hidden == (5, 4)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"dataset": "a.csv", "colour": "red"})
    with pytest.raises(ConfigError):
        harness.parse_hidden("10,x")


# run_experiment

def test_single_epoch_run_files(benchmark_csvs, tmp_path):
    out = harness.run_experiment(cfg(benchmark_csvs["iris"], tmp_path, epochs=1))
    assert {p.name for p in out.iterdir()} == {"config.json", "metrics.csv", "manifest.json",
                                               "model.json", "DONE"}
    rows = read_metrics(out / "metrics.csv")
    assert [(r.epoch, r.split) for r in rows] == [(1, "train"), (1, "test")]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 0 and manifest["n_train"] == 111 and manifest["wall_time_s"] >= 0
    assert json.loads((out / "config.json").read_text())["epochs"] == 1
    model = json.loads((out / "model.json").read_text())
    assert model["kind"] == "qnn" and model["shape"] == [4, 10, 6, 2]


def test_metrics_schema_and_contiguous_epochs(benchmark_csvs, tmp_path):
    out = harness.run_experiment(cfg(benchmark_csvs["breast_cancer"], tmp_path, epochs=5, model="nn"))
    text = (out / "metrics.csv").read_text()
    assert text.splitlines()[0] == "epoch,split,loss,accuracy"
    for split in ("train", "test"):
        epochs = [r.epoch for r in read_metrics(out / "metrics.csv") if r.split == split]
        assert epochs == list(range(1, 6))


def test_rerun_is_byte_identical(benchmark_csvs, tmp_path):
    a = harness.run_experiment(cfg(benchmark_csvs["diabetes"], tmp_path / "a", epochs=20))
    b = harness.run_experiment(cfg(benchmark_csvs["diabetes"], tmp_path / "b", epochs=20))
    assert (a / "metrics.csv").read_bytes() == (b / "metrics.csv").read_bytes()
    c = harness.run_experiment(cfg(benchmark_csvs["diabetes"], tmp_path / "c", epochs=20, seed=1))
    assert (a / "metrics.csv").read_bytes() != (c / "metrics.csv").read_bytes()


def test_stats_scope_train_differs(benchmark_csvs):
    whole = harness.prepare(ExperimentConfig(dataset=str(benchmark_csvs["diabetes"])))
    train = harness.prepare(ExperimentConfig(dataset=str(benchmark_csvs["diabetes"]),
                                             stats_scope="train"))
    np.testing.assert_array_equal(train.stats.per_feature_max, train.split.train.features.max(0))
    assert np.all(whole.stats.per_feature_max >= train.stats.per_feature_max)


def test_failed_run_leaves_no_marker(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,c\n1,a\n")
    out = tmp_path / "run"
    out.mkdir()
    (out / "DONE").write_text("")
    with pytest.raises(Exception):
        harness.run_experiment(ExperimentConfig(dataset=str(bad), out=str(out), epochs=1))
    assert not (out / "DONE").exists()


def test_iris_seed7_example(benchmark_csvs, tmp_path):
    out = harness.run_experiment(cfg(benchmark_csvs["iris"], tmp_path, seed=7))
    rows = read_metrics(out / "metrics.csv")
    assert len(rows) == 4000
    assert rows[-1].split == "test" and rows[-1].accuracy >= 0.90


def test_breast_cancer_train_test_close(benchmark_csvs, tmp_path):
    out = harness.run_experiment(cfg(benchmark_csvs["breast_cancer"], tmp_path, seed=1))
    s = harness.summarize_run(out)
    assert abs(s.final_train - s.final_test) <= 0.05


# evaluate

def one_feature_split():
    x = np.array([[0.0], [1.0], [0.0], [1.0], [1.0]])
    return Dataset(x, np.array([0, 1, 0, 1, 1]), ("lo", "hi"))


def test_evaluate_perfect_model():
    split = one_feature_split()
    net = qnn.QnnNetwork([[[0.0]]], 2)  # y = sin(phi), phi in {0, pi/2}
    _, acc = harness.evaluate(net, split, compute_stats(split.features), angle_range=math.pi / 2)
    assert acc == 1.0


def test_evaluate_constant_model_gives_base_rate():
    x = np.column_stack([np.linspace(0, 1, 8), np.full(8, 3.0)])
    split = Dataset(x, np.array([0, 0, 0, 1, 1, 1, 1, 1]), ("a", "b"))
    net = qnn.QnnNetwork([[[0.4, 0.0]]], 2)  # constant feature gives sin(0) = 0
    _, acc = harness.evaluate(net, split, compute_stats(x))
    assert acc == pytest.approx(3 / 8)


@pytest.mark.parametrize("model", ["qnn", "nn"])
def test_evaluate_equals_independent_recount(benchmark_csvs, model):
    c = ExperimentConfig(dataset=str(benchmark_csvs["iris"]), model=model, epochs=30).resolved()
    prep = harness.prepare(c)
    trained, _ = harness.train_model(c, prep)
    split = prep.split.test
    _, acc = harness.evaluate(trained, split, prep.stats, c.angle_range)
    x = harness.model_inputs(trained, split, prep.stats, c.angle_range)
    correct = 0
    for row, label in zip(x, split.labels):
        if model == "qnn":
            pred = qnn.decode_class(qnn.forward(trained, row).y, 3)
        else:
            pred = int(np.argmax(mlp.mlp_forward(trained, row)))
        correct += int(pred == label)
    assert acc == correct / split.n_samples


def test_evaluate_dimension_mismatch():
    split = one_feature_split()
    with pytest.raises(ValueError):
        harness.evaluate(qnn.QnnNetwork([np.zeros((1, 2))], 2), split, compute_stats(split.features))
    with pytest.raises(TypeError):
        harness.evaluate(object(), split, compute_stats(split.features))


# compare_runs

def test_compare_self_and_table(benchmark_csvs, tmp_path):
    out = harness.run_experiment(cfg(benchmark_csvs["iris"], tmp_path, epochs=10))
    table = harness.compare_runs(out, out)
    assert table.gap_difference == 0.0 and table.smaller_gap == "tie"
    text = table.to_text()
    assert "final_test_acc" in text and text.count("\n") == 3
    rows = table.to_csv().splitlines()
    assert rows[0].startswith("run,name,model,final_train_acc")
    assert len(rows) == 3


def test_compare_rejects_incomplete(benchmark_csvs, tmp_path):
    out = harness.run_experiment(cfg(benchmark_csvs["iris"], tmp_path, epochs=2))
    (out / "DONE").unlink()
    with pytest.raises(RunIncompleteError):
        harness.compare_runs(out, out)


def test_compare_diabetes_nn_gap_exceeds_qnn(benchmark_csvs, tmp_path):
    path = benchmark_csvs["diabetes"]
    q = harness.run_experiment(ExperimentConfig(dataset=str(path), seed=1, out=str(tmp_path / "q")))
    n = harness.run_experiment(ExperimentConfig(dataset=str(path), model="nn", seed=1,
                                                out=str(tmp_path / "n")))
    table = harness.compare_runs(q, n)
    assert table.b.gap > table.a.gap and table.smaller_gap == "a"


def test_compare_iris_qnn_vs_nn(benchmark_csvs, tmp_path):
    path = benchmark_csvs["iris"]
    q = harness.run_experiment(ExperimentConfig(dataset=str(path), seed=4, out=str(tmp_path / "q")))
    n = harness.run_experiment(ExperimentConfig(dataset=str(path), model="nn", seed=4,
                                                out=str(tmp_path / "n")))
    table = harness.compare_runs(q, n)
    assert abs(table.a.gap) <= 0.05
    assert table.b.final_test < table.b.peak_test
