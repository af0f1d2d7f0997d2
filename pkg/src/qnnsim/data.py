"""Dataset loading, label coding and stratified train/test splitting."""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

log = logging.getLogger(__name__)

MISSING_TOKENS = frozenset({"", "?", "na", "nan", "null"})


class DataError(ValueError):
    """Malformed or unusable input data."""

    def __init__(self, message, *, path=None, row=None, column=None):
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.path = path
        self.row = row
        self.column = column


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    class_names: tuple
    feature_names: tuple = ()
    dropped_rows: int = 0

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if x.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if y.shape != (x.shape[0],):
            raise DataError("labels are not aligned with feature rows")
        if y.size and (y.min() < 0 or y.max() >= len(self.class_names)):
            raise DataError("label index outside [0, class_count)")
        names = tuple(self.feature_names) or tuple(f"x{i}" for i in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise DataError("feature_names length does not match feature count")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "feature_names", names)

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, index) -> "Dataset":
        index = np.asarray(index, dtype=np.int64)
        return Dataset(self.features[index], self.labels[index],
                       self.class_names, self.feature_names)


@dataclass(frozen=True)
class SplitPair:
    train: Dataset
    test: Dataset
    seed: int
    train_index: np.ndarray = field(repr=False)
    test_index: np.ndarray = field(repr=False)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, label_column: int | str = -1, delimiter: str = ",",
             label_map: Sequence[str] | Mapping[str, int] | None = None) -> Dataset:
    """Read a numeric CSV with one label column.

    A header row is detected when any cell of the first row other than the
    label is non-numeric. Rows containing a missing cell (empty, ``?``,
    ``NA``) are dropped and counted in ``Dataset.dropped_rows``. Class
    indices follow first appearance unless ``label_map`` gives an explicit
    order (a sequence of names) or mapping (name -> index).
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh, delimiter=delimiter) if any(c.strip() for c in r)]
    except OSError as exc:
        raise DataError(f"cannot read file ({exc.strerror})", path=path) from exc
    except UnicodeDecodeError as exc:
        raise DataError("file is not valid UTF-8", path=path) from exc
    if not rows:
        raise DataError("file contains no rows", path=path)

    width = len(rows[0])
    header = None
    if isinstance(label_column, str):
        header = [c.strip() for c in rows[0]]
        if label_column not in header:
            raise DataError(f"label column {label_column!r} not in header", path=path)
        label_idx = header.index(label_column)
    else:
        label_idx = label_column % width if -width <= label_column < width else None
        if label_idx is None:
            raise DataError(f"label column {label_column} out of range", path=path)
        first = [c.strip() for i, c in enumerate(rows[0]) if i != label_idx]
        if any(c.lower() not in MISSING_TOKENS and not _is_number(c) for c in first):
            header = [c.strip() for c in rows[0]]
    body = rows[1:] if header is not None else rows
    first_line = 2 if header is not None else 1

    if isinstance(label_map, Mapping):
        mapping = dict(label_map)
        class_names = [None] * (max(mapping.values()) + 1 if mapping else 0)
        for name, idx in mapping.items():
            class_names[idx] = name
        if any(n is None for n in class_names):
            raise DataError("label_map indices must be contiguous from 0")
    elif label_map is not None:
        class_names = list(label_map)
        mapping = {name: i for i, name in enumerate(class_names)}
    else:
        mapping, class_names = {}, []

    feats, labels, dropped = [], [], 0
    for offset, row in enumerate(body):
        line = first_line + offset
        if len(row) != width:
            raise DataError(f"expected {width} cells, found {len(row)}", path=path, row=line)
        cells = [c.strip() for c in row]
        if any(c.lower() in MISSING_TOKENS for c in cells):
            dropped += 1
            continue
        values = []
        for col, cell in enumerate(cells):
            if col == label_idx:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                raise DataError(f"non-numeric feature value {cell!r}",
                                path=path, row=line, column=col) from None
        name = cells[label_idx]
        if name not in mapping:
            if label_map is not None:
                raise DataError(f"unknown label {name!r}", path=path, row=line, column=label_idx)
            mapping[name] = len(class_names)
            class_names.append(name)
        feats.append(values)
        labels.append(mapping[name])

    if dropped:
        log.warning("%s: dropped %d row(s) with missing cells", path, dropped)
    if not feats:
        raise DataError("no complete rows", path=path)
    feature_names = ()
    if header is not None:
        feature_names = tuple(h for i, h in enumerate(header) if i != label_idx)
    return Dataset(np.array(feats), np.array(labels), tuple(class_names),
                   feature_names, dropped_rows=dropped)


def write_csv(dataset: Dataset, path, label_name: str = "class") -> None:
    """Write ``dataset`` with a header row and the label in the last column."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*dataset.feature_names, label_name])
        for x, y in zip(dataset.features, dataset.labels):
            w.writerow([repr(float(v)) for v in x] + [dataset.class_names[y]])


def stratified_split(dataset: Dataset, train_fraction: float = 0.75, seed: int = 0) -> SplitPair:
    """Seeded per-class shuffle; floor(train_fraction * class size) rows go to train."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    train, test = [], []
    for c in range(dataset.class_count):
        idx = np.flatnonzero(dataset.labels == c)
        if idx.size == 0:
            continue
        if idx.size < 2:
            raise DataError(f"class {dataset.class_names[c]!r} has fewer than 2 samples")
        idx = rng.permutation(idx)
        k = math.floor(train_fraction * idx.size)
        train.append(idx[:k])
        test.append(idx[k:])
    train_index = np.sort(np.concatenate(train))
    test_index = np.sort(np.concatenate(test))
    return SplitPair(dataset.subset(train_index), dataset.subset(test_index), seed,
                     train_index, test_index)


def code_length(c: int) -> int:
    if c < 2:
        raise ValueError("at least two classes are required")
    return math.ceil(math.log2(c))


def label_to_code(class_index: int, c: int) -> tuple[int, ...]:
    """Big-endian binary code of ``class_index`` on ceil(log2 c) bits."""
    q = code_length(c)
    if not 0 <= class_index < c:
        raise ValueError(f"class index {class_index} outside [0, {c})")
    return tuple((class_index >> (q - 1 - i)) & 1 for i in range(q))


def code_table(c: int) -> np.ndarray:
    """Matrix whose row k is ``label_to_code(k, c)`` as floats."""
    return np.array([label_to_code(k, c) for k in range(c)], dtype=np.float64)
