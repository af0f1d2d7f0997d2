"""Per-epoch metrics rows and their CSV form (``epoch,split,loss,accuracy``)."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

HEADER = ("epoch", "split", "loss", "accuracy")
SPLITS = ("train", "test")


class MetricsFormatError(ValueError):
    pass


@dataclass(frozen=True)
class MetricsRecord:
    epoch: int
    split: str
    loss: float
    accuracy: float

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}")
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy outside [0, 1]")
        if not self.loss >= 0.0:
            raise ValueError("loss must be non-negative")


class MetricsWriter:
    """Append-only CSV writer; rows are flushed as they are written."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = self.path.open("w", newline="", encoding="utf-8")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(HEADER)

    def write(self, rec: MetricsRecord) -> None:
        # repr gives the shortest round-trip form, so reruns are byte-identical
        self._w.writerow([rec.epoch, rec.split, repr(float(rec.loss)), repr(float(rec.accuracy))])

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_metrics(path, records) -> None:
    with MetricsWriter(path) as w:
        for rec in records:
            w.write(rec)


def read_metrics(path) -> list[MetricsRecord]:
    """Parse and validate a metrics CSV; raises MetricsFormatError on any defect."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise MetricsFormatError(f"{path}: cannot read ({exc.strerror})") from exc
    if not rows:
        raise MetricsFormatError(f"{path}: empty file")
    if tuple(rows[0]) != HEADER:
        raise MetricsFormatError(f"{path}: header must be {','.join(HEADER)}")
    if len(rows) == 1:
        raise MetricsFormatError(f"{path}: no metrics rows")
    out = []
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise MetricsFormatError(f"{path}: line {n} has {len(row)} fields")
        try:
            out.append(MetricsRecord(int(row[0]), row[1], float(row[2]), float(row[3])))
        except ValueError as exc:
            raise MetricsFormatError(f"{path}: line {n}: {exc}") from None
    return out


def by_split(records) -> dict[str, list[MetricsRecord]]:
    out: dict[str, list[MetricsRecord]] = {}
    for rec in records:
        out.setdefault(rec.split, []).append(rec)
    return out
