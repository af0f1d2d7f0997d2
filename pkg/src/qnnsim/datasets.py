"""Build the three benchmark CSVs from locally installed sources.

Nothing is downloaded. Sources:

* iris: the copy bundled with scikit-learn (150 x 4, 3 classes).
* breast_cancer: UCI Breast Cancer Wisconsin (original), in the KEEL
  repository form shipped inside the ``imbalanced-databases`` package
  (sample-code column dropped, the 16 rows with missing Bare Nuclei
  removed; 683 x 9, 2 classes).
* diabetes: Pima Indians Diabetes from the same package (768 x 8, 2 classes,
  zeros left as recorded).

``imbalanced-databases`` declares a dependency on the retired ``sklearn``
shim, so install it with ``pip install --no-deps imbalanced-databases`` or
pass the path of its wheel/sdist via ``source``.
"""
from __future__ import annotations

import importlib.util
import io
import tarfile
import zipfile
from pathlib import Path

import numpy as np

from .data import Dataset, DataError, write_csv

EXPECTED_SHAPES = {
    "breast_cancer": (683, 9, 2),
    "diabetes": (768, 8, 2),
    "iris": (150, 4, 3),
}

_KEEL = {
    "breast_cancer": ("wisconsin", {"negative": "benign", "positive": "malignant"}),
    "diabetes": ("pima", {"negative": "tested_negative", "positive": "tested_positive"}),
}


def _keel_text(name: str, source=None) -> str:
    member = f"imbalanced_databases/data/{name}/{name}.dat"
    if source is None:
        spec = importlib.util.find_spec("imbalanced_databases")
        if spec is None or not spec.submodule_search_locations:
            raise DataError(
                "imbalanced-databases is not installed; run "
                "`pip install --no-deps imbalanced-databases` or pass source=<wheel>")
        root = Path(list(spec.submodule_search_locations)[0]).parent
        return (root / member).read_text(encoding="utf-8")
    source = Path(source)
    try:
        if source.suffix == ".whl" or zipfile.is_zipfile(source):
            with zipfile.ZipFile(source) as zf:
                return zf.read(member).decode("utf-8")
        with tarfile.open(source) as tf:
            for m in tf.getmembers():
                if m.name.endswith(member):
                    return tf.extractfile(m).read().decode("utf-8")
    except (OSError, KeyError, zipfile.BadZipFile, tarfile.TarError) as exc:
        raise DataError(f"cannot read {member} from archive: {exc}", path=source) from exc
    raise DataError(f"{member} not found in archive", path=source)


def parse_keel(text: str, label_names: dict | None = None) -> Dataset:
    """Parse a KEEL ``.dat`` file (``@attribute`` header, comma-separated data)."""
    names, rows = [], []
    in_data = False
    for line in io.StringIO(text):
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.lower().startswith("@attribute"):
            names.append(line.split()[1])
        elif line.lower().startswith("@data"):
            in_data = True
        elif in_data:
            rows.append([c.strip() for c in line.split(",")])
    label_names = label_names or {}
    classes: list[str] = []
    labels, feats = [], []
    for r in rows:
        name = label_names.get(r[-1], r[-1])
        if name not in classes:
            classes.append(name)
        labels.append(classes.index(name))
        feats.append([float(v) for v in r[:-1]])
    return Dataset(np.array(feats), np.array(labels), tuple(classes), tuple(names[:-1]))


def load_iris_dataset() -> Dataset:
    from sklearn.datasets import load_iris

    bunch = load_iris()
    names = tuple(n.replace(" (cm)", "").replace(" ", "_") for n in bunch.feature_names)
    return Dataset(bunch.data, bunch.target, tuple(bunch.target_names), names)


def load_benchmark(name: str, source=None) -> Dataset:
    if name == "iris":
        ds = load_iris_dataset()
    elif name in _KEEL:
        keel, labels = _KEEL[name]
        ds = parse_keel(_keel_text(keel, source), labels)
    else:
        raise KeyError(f"unknown benchmark {name!r}; choose from {sorted(EXPECTED_SHAPES)}")
    got = (ds.n_samples, ds.n_features, ds.class_count)
    if got != EXPECTED_SHAPES[name]:
        raise DataError(f"{name}: expected shape {EXPECTED_SHAPES[name]}, got {got}")
    return ds


def prepare_all(out_dir, source=None, names=None) -> dict[str, Path]:
    """Write ``<name>.csv`` for each benchmark into ``out_dir``; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name in names or sorted(EXPECTED_SHAPES):
        path = out_dir / f"{name}.csv"
        write_csv(load_benchmark(name, source), path)
        paths[name] = path
    return paths
