"""CSV interchange for aggregated datasets.

Header: the 47 canonical feature names, then "label", then "trip_id".
Floats are written with repr so values round-trip exactly.
"""

import csv
import io
from pathlib import Path

import numpy as np

from .core import CANONICAL_FEATURE_NAMES, LabeledDataset
from .errors import MalformedRow, MissingColumn


def write_features_csv(dataset: LabeledDataset, sink) -> None:
    stream, owned = _open(sink, "w")
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(list(dataset.feature_names) + ["label", "trip_id"])
        for row, label, trip_id in zip(dataset.features, dataset.labels, dataset.trip_ids):
            writer.writerow([repr(float(v)) for v in row] + [int(label), trip_id])
    finally:
        if owned:
            stream.close()


def read_features_csv(source) -> LabeledDataset:
    stream, owned = _open(source, "r")
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        expected = list(CANONICAL_FEATURE_NAMES) + ["label", "trip_id"]
        if header != expected:
            missing = [c for c in expected if header is None or c not in header]
            raise MissingColumn(missing[0] if missing else "header mismatch")
        width = len(CANONICAL_FEATURE_NAMES)
        rows, labels, trip_ids = [], [], []
        for line_no, row in enumerate(reader, start=2):
            try:
                rows.append([float(v) for v in row[:width]])
                labels.append(int(row[width]))
                trip_ids.append(row[width + 1])
            except (ValueError, IndexError) as exc:
                raise MalformedRow(line_no, str(exc)) from exc
        return LabeledDataset(
            features=np.array(rows, dtype=np.float64).reshape(len(rows), width),
            labels=np.array(labels, dtype=np.int64),
            feature_names=CANONICAL_FEATURE_NAMES,
            trip_ids=tuple(trip_ids),
        )
    finally:
        if owned:
            stream.close()


def _open(target, mode):
    if isinstance(target, (str, Path)):
        return open(target, mode, encoding="utf-8", newline=""), True
    if isinstance(target, io.TextIOBase):
        return target, False
    wrapper = io.TextIOWrapper(target, encoding="utf-8", newline="")
    return wrapper, False
