"""Experiment orchestration: configure, train, persist, compare.

A completed run directory contains ``config.json`` (the resolved config),
``metrics.csv``, ``model.json``, ``manifest.json`` and finally a ``DONE``
marker. A directory without ``DONE`` is a partial run.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels, mlp, qnn
from .data import Dataset, load_csv, stratified_split
from .encoding import FeatureStats, compute_stats, encode_sample, unit_scale
from .metrics import MetricsWriter, by_split, read_metrics

DONE = "DONE"

# keyed by dataset file stem
DATASET_DEFAULTS = {
    "breast_cancer": {"epochs": 1000, "qnn_lr": 0.5},
    "diabetes": {"epochs": 4000, "qnn_lr": 0.2},
    "iris": {"epochs": 2000, "qnn_lr": 1.0},
}
GENERIC_DEFAULTS = {"epochs": 1000, "qnn_lr": 0.5}
NN_DEFAULTS = {"lr": 0.05, "optimizer": "adam"}


class ConfigError(ValueError):
    pass


class RunIncompleteError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    model: str = "qnn"
    hidden: tuple = (10, 6)
    epochs: int | None = None
    lr: float | None = None
    seed: int = 0
    stats_scope: str = "whole"
    out: str = "runs/run"
    label_column: int | str = -1
    delimiter: str = ","
    train_fraction: float = 0.75
    # qnn
    angle_range: float = math.pi
    init: str = "halfpi"
    init_spread: float = 0.5
    # nn
    optimizer: str | None = None
    activation: str = "tanh"
    init_scale: float = 1.0

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "hidden" in d:
            d["hidden"] = parse_hidden(d["hidden"])
        return cls(**d)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["hidden"] = list(self.hidden)
        return d

    def resolved(self) -> "ExperimentConfig":
        """Fill unset epochs, lr and optimizer from the dataset and model defaults."""
        table = DATASET_DEFAULTS.get(Path(self.dataset).stem, GENERIC_DEFAULTS)
        changes = {}
        if self.epochs is None:
            changes["epochs"] = table["epochs"]
        if self.model == "nn":
            if self.lr is None:
                changes["lr"] = NN_DEFAULTS["lr"]
            if self.optimizer is None:
                changes["optimizer"] = NN_DEFAULTS["optimizer"]
        elif self.lr is None:
            changes["lr"] = table["qnn_lr"]
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.model not in ("qnn", "nn"):
            raise ConfigError("model must be 'qnn' or 'nn'")
        if self.stats_scope not in ("whole", "train"):
            raise ConfigError("stats_scope must be 'whole' or 'train'")
        if self.epochs is not None and (not isinstance(self.epochs, int) or self.epochs < 1):
            raise ConfigError("epochs must be an integer >= 1")
        if self.lr is not None and not (self.lr > 0 and math.isfinite(self.lr)):
            raise ConfigError("learning rate must be > 0")
        if not self.hidden or any(int(h) < 1 for h in self.hidden):
            raise ConfigError("hidden widths must be >= 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must lie in (0, 1)")
        if not (0.0 < self.angle_range <= 2 * math.pi):
            raise ConfigError("angle_range must lie in (0, 2*pi]")
        if self.init not in qnn.INIT_SCHEMES:
            raise ConfigError(f"init must be one of {qnn.INIT_SCHEMES}")
        if self.optimizer is not None and self.optimizer not in mlp.OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {mlp.OPTIMIZERS}")
        if self.model == "qnn" and self.optimizer not in (None, "gd"):
            raise ConfigError("the qnn model trains with plain gradient descent only")
        if self.activation not in mlp.ACTIVATIONS:
            raise ConfigError(f"activation must be one of {mlp.ACTIVATIONS}")


def parse_hidden(value) -> tuple:
    if isinstance(value, str):
        parts = [p for p in value.replace(" ", "").split(",") if p]
        try:
            value = [int(p) for p in parts]
        except ValueError:
            raise ConfigError(f"hidden widths must be integers, got {value!r}") from None
    return tuple(int(v) for v in value)


def load_config_file(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


@dataclass
class Prepared:
    """A split dataset with scaling statistics, ready for either model."""

    split: object
    stats: FeatureStats
    class_count: int


def prepare(cfg: ExperimentConfig, dataset: Dataset | None = None) -> Prepared:
    ds = dataset if dataset is not None else load_csv(cfg.dataset, cfg.label_column, cfg.delimiter)
    split = stratified_split(ds, cfg.train_fraction, cfg.seed)
    source = ds.features if cfg.stats_scope == "whole" else split.train.features
    return Prepared(split, compute_stats(source), ds.class_count)


def model_inputs(model, split: Dataset, stats: FeatureStats, angle_range: float) -> np.ndarray:
    if isinstance(model, qnn.QnnNetwork):
        return encode_sample(split.features, stats, angle_range)
    return unit_scale(split.features, stats)


def evaluate(model, split: Dataset, stats: FeatureStats, angle_range: float = math.pi):
    """Mean loss and accuracy of ``model`` on ``split``.

    QNN accuracy uses the binary-code decode, NN accuracy the argmax.
    """
    x = model_inputs(model, split, stats, angle_range)
    if isinstance(model, qnn.QnnNetwork):
        return qnn.evaluate(model, x, split.labels)
    if isinstance(model, mlp.MlpNetwork):
        return mlp.evaluate(model, x, split.labels)
    raise TypeError(f"unsupported model type {type(model).__name__}")


def build_model(cfg: ExperimentConfig, n_features: int, n_classes: int):
    if cfg.model == "qnn":
        return qnn.QnnNetwork.initialize(n_features, cfg.hidden, n_classes, cfg.seed,
                                         cfg.init, cfg.init_spread)
    return mlp.MlpNetwork.initialize(n_features, cfg.hidden, n_classes, cfg.seed,
                                     cfg.init_scale, cfg.activation)


def train_model(cfg: ExperimentConfig, prep: Prepared, on_epoch=None):
    """Build and train the configured model; returns ``(model, records)``."""
    split, stats = prep.split, prep.stats
    model = build_model(cfg, split.train.n_features, prep.class_count)
    xtr = model_inputs(model, split.train, stats, cfg.angle_range)
    xte = model_inputs(model, split.test, stats, cfg.angle_range)
    test = (xte, split.test.labels)
    if cfg.model == "qnn":
        return qnn.train(model, xtr, split.train.labels, cfg.lr, cfg.epochs, test, on_epoch)
    return mlp.mlp_train(model, xtr, split.train.labels, cfg.lr, cfg.epochs, cfg.optimizer,
                         test, on_epoch)


def model_summary(model) -> dict:
    if isinstance(model, qnn.QnnNetwork):
        return {"kind": "qnn", "shape": list(model.shape), "n_classes": model.n_classes,
                "layers": [w.tolist() for w in model.layers]}
    return {"kind": "nn", "activation": model.activation,
            "weights": [w.tolist() for w in model.weights],
            "biases": [b.tolist() for b in model.biases]}


def run_experiment(cfg: ExperimentConfig, dataset: Dataset | None = None) -> Path:
    """Train one configured model and persist its run directory; returns the path."""
    cfg = cfg.resolved()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / DONE).unlink(missing_ok=True)
    started = time.perf_counter()
    prep = prepare(cfg, dataset)
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")
    with MetricsWriter(out / "metrics.csv") as writer:
        def on_epoch(rows):
            for r in rows:
                writer.write(r)

        model, records = train_model(cfg, prep, on_epoch)
    (out / "model.json").write_text(json.dumps(model_summary(model)) + "\n", encoding="utf-8")
    final = {r.split: {"loss": r.loss, "accuracy": r.accuracy} for r in records[-2:]}
    manifest = {
        "seed": cfg.seed,
        "backend": kernels.BACKEND,
        "wall_time_s": round(time.perf_counter() - started, 3),
        "n_train": prep.split.train.n_samples,
        "n_test": prep.split.test.n_samples,
        "final": final,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    (out / DONE).write_text("", encoding="utf-8")
    return out


@dataclass(frozen=True)
class RunSummary:
    name: str
    model: str
    final_train: float
    final_test: float
    peak_test: float
    peak_train: float

    @property
    def gap(self) -> float:
        return self.final_train - self.final_test


def summarize_records(records, name="", model="") -> RunSummary:
    split = by_split(records)
    if not split.get("train") or not split.get("test"):
        raise ValueError("metrics need both train and test rows")
    tr, te = split["train"], split["test"]
    return RunSummary(name, model, tr[-1].accuracy, te[-1].accuracy,
                      max(r.accuracy for r in te), max(r.accuracy for r in tr))


def summarize_run(run_dir) -> RunSummary:
    run_dir = Path(run_dir)
    if not (run_dir / DONE).exists():
        raise RunIncompleteError(f"{run_dir} has no {DONE} marker; the run is incomplete")
    cfg = json.loads((run_dir / "config.json").read_text(encoding="utf-8"))
    return summarize_records(read_metrics(run_dir / "metrics.csv"), run_dir.name, cfg.get("model", ""))


@dataclass(frozen=True)
class Comparison:
    a: RunSummary
    b: RunSummary

    @property
    def smaller_gap(self) -> str:
        ga, gb = abs(self.a.gap), abs(self.b.gap)
        if ga == gb:
            return "tie"
        return "a" if ga < gb else "b"

    @property
    def gap_difference(self) -> float:
        return self.a.gap - self.b.gap

    def rows(self) -> list[list]:
        head = ["run", "name", "model", "final_train_acc", "final_test_acc", "peak_test_acc",
                "gap", "smaller_gap"]
        out = [head]
        for key, s in (("a", self.a), ("b", self.b)):
            out.append([key, s.name, s.model, f"{s.final_train:.4f}", f"{s.final_test:.4f}",
                        f"{s.peak_test:.4f}", f"{s.gap:.4f}",
                        "yes" if self.smaller_gap in (key, "tie") else "no"])
        return out

    def to_text(self) -> str:
        rows = self.rows()
        widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(self.rows())
        return buf.getvalue()


def compare_runs(a_dir, b_dir) -> Comparison:
    return Comparison(summarize_run(a_dir), summarize_run(b_dir))
