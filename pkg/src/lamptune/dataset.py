"""Labelled datasets: CSV ingestion, min-max scaling, distances and k-NN."""

import csv
import dataclasses
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InvalidK, MissingLabelColumn, ParseError, RaggedRow

RAW = "raw"
BUNDLED = ("iris", "wine", "vehicle", "segment")


@dataclasses.dataclass(frozen=True)
class LabeledDataset:
    name: str
    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {x.shape}")
        labels = np.asarray(self.labels)
        if labels.shape != (x.shape[0],):
            raise ValueError(f"{labels.shape[0]} labels for {x.shape[0]} rows")
        if not np.all(np.isfinite(x)):
            raise ValueError("features contain non-finite values")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    def label_codes(self):
        """Integer class codes (sorted label order) and the number of classes."""
        classes, codes = np.unique(self.labels, return_inverse=True)
        return codes.astype(np.int64), len(classes)

    def with_features(self, features):
        return dataclasses.replace(self, features=features)


def parse_scale(text):
    """``"raw"`` or a positive real."""
    if isinstance(text, str) and text.strip().lower() == RAW:
        return RAW
    value = float(text)
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"scale must be 'raw' or a positive real, got {text!r}")
    return value


def format_scale(scale):
    return RAW if scale == RAW else repr(float(scale))


def bundled_path(name):
    """Path of one of the CSV datasets shipped with the package."""
    if name not in BUNDLED:
        raise FileNotFoundError(f"no bundled dataset named {name!r}; have {BUNDLED}")
    return Path(str(resources.files("lamptune") / "data" / f"{name}.csv"))


def resolve_data_path(spec):
    """Existing file path, else a bundled dataset name."""
    path = Path(spec)
    if path.exists() or spec not in BUNDLED:
        return path
    return bundled_path(spec)


def load_csv(path, label_column="class", columns=None, name=None):
    """Read a header-first, comma-separated file into a :class:`LabeledDataset`.

    ``label_column`` is a header name or a 0-based index. Every other column is
    parsed as a float unless ``columns`` restricts the feature set.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file", row=0)
    header = [h.strip() for h in rows[0]]

    label_idx = _column_index(header, label_column)
    if label_idx is None:
        raise MissingLabelColumn(f"{path}: no label column {label_column!r} in {header}")
    if columns is None:
        feat_idx = [i for i in range(len(header)) if i != label_idx]
    else:
        feat_idx = []
        for col in columns:
            idx = _column_index(header, col)
            if idx is None or idx == label_idx:
                raise ParseError(f"{path}: no feature column {col!r}", row=0)
            feat_idx.append(idx)

    features = []
    labels = []
    for lineno, row in enumerate(rows[1:], start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise RaggedRow(
                f"{path}: row {lineno} has {len(row)} fields, header has {len(header)}",
                row=lineno,
            )
        values = []
        for j in feat_idx:
            cell = row[j].strip()
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(
                    f"{path}: row {lineno}, column {header[j]!r}: not a number: {cell!r}",
                    row=lineno, column=header[j],
                ) from None
            if not np.isfinite(value):
                raise ParseError(
                    f"{path}: row {lineno}, column {header[j]!r}: non-finite value",
                    row=lineno, column=header[j],
                )
            values.append(value)
        features.append(values)
        labels.append(row[label_idx].strip())

    if len(features) < 2:
        raise ParseError(f"{path}: need at least 2 data rows, got {len(features)}")
    x = np.array(features, dtype=np.float64).reshape(len(features), len(feat_idx))
    return LabeledDataset(
        name=name or path.stem,
        features=x,
        labels=np.array(labels),
        feature_names=[header[j] for j in feat_idx],
    )


def _column_index(header, column):
    if isinstance(column, int):
        return column if 0 <= column < len(header) else None
    column = str(column).strip()
    if column in header:
        return header.index(column)
    if column.lstrip("-").isdigit():
        idx = int(column)
        return idx if 0 <= idx < len(header) else None
    return None


def minmax_scale(data, scale):
    """Map every feature onto ``[0, scale]``; ``RAW`` returns ``data`` unchanged.

    Constant features map to 0.
    """
    if scale == RAW:
        return data
    s = float(scale)
    if not s > 0:
        raise ValueError(f"scale must be positive, got {scale!r}")
    x = data.features
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    flat = span == 0
    scaled = s * (x - lo) / np.where(flat, 1.0, span)
    scaled[:, flat] = 0.0
    return data.with_features(scaled)


def pairwise_distances(features):
    """Euclidean distance matrix; symmetric with an exact zero diagonal."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {x.shape}")
    return kernels.pairwise_distances(x)


def knn_indices(distances, k):
    """Indices of the ``k`` nearest other rows, ties broken by ascending index."""
    n = distances.shape[0]
    if not 1 <= k <= n - 1:
        raise InvalidK(f"k must lie in [1, {n - 1}], got {k}")
    return kernels.knn_indices(distances, k)
