"""Fit the learned-metric weights to graded projections and score the fit."""

import csv
import dataclasses
import math

import numpy as np

from .errors import ParseError, TooFewSamples
from .linalg import lu_solve
from .metrics import MetricVector, MetricWeights

HIST_WIDTH = 0.25
HIST_MAX = 4.0
GRADE_FIELDS = ("m1", "m2", "m3", "grade", "dataset", "scale", "seed")


@dataclasses.dataclass(frozen=True)
class GradedProjection:
    metrics: MetricVector
    grade: int
    dataset: str = ""
    scale: str = ""
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.grade <= 5:
            raise ValueError(f"grade must lie in 1..5, got {self.grade}")


@dataclasses.dataclass(frozen=True)
class TrainTestSplit:
    train: list
    test: list
    seed: int
    ratio: float

    def counts_by_dataset(self):
        """``{dataset: (n_train, n_test, n_total)}`` in first-seen order."""
        out = {}
        for part, samples in ((0, self.train), (1, self.test)):
            for s in samples:
                row = out.setdefault(s.dataset, [0, 0, 0])
                row[part] += 1
                row[2] += 1
        return {k: tuple(v) for k, v in out.items()}


@dataclasses.dataclass(frozen=True)
class ErrorStats:
    mae: float
    median: float
    std: float
    histogram: np.ndarray

    @property
    def bin_edges(self):
        return np.linspace(0.0, HIST_MAX, len(self.histogram) + 1)


def _design(samples):
    x = np.array([s.metrics.as_array() for s in samples], dtype=np.float64).reshape(-1, 3)
    y = np.array([s.grade for s in samples], dtype=np.float64)
    return x, y


def build_normal_system(samples):
    """Gram matrix ``a = X^T X`` and ``b = X^T y`` of the no-intercept model."""
    if len(samples) < 3:
        raise TooFewSamples(f"need at least 3 graded samples, got {len(samples)}")
    x, y = _design(samples)
    a = np.zeros((3, 3))
    b = np.zeros(3)
    # sample-by-sample accumulation keeps the summation order fixed
    for row, grade in zip(x, y):
        a += np.outer(row, row)
        b += grade * row
    return a, b


def fit_weights(samples):
    a, b = build_normal_system(samples)
    w = lu_solve(a, b)
    return MetricWeights(float(w[0]), float(w[1]), float(w[2]))


def predict(samples, w):
    x, _ = _design(samples)
    return x @ w.as_array()


def squared_loss(samples, w):
    x, y = _design(samples)
    r = x @ w.as_array() - y
    return float(r @ r)


def split_train_test(samples, ratio, seed, by_dataset=False):
    """Seeded shuffle, then the first ``floor(ratio * N)`` samples train.

    With ``by_dataset`` the rule is applied within each dataset separately,
    which keeps per-dataset proportions fixed.
    """
    samples = list(samples)
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    if len(samples) < 2:
        raise TooFewSamples(f"need at least 2 samples to split, got {len(samples)}")
    rng = np.random.default_rng(seed)
    if by_dataset:
        groups = {}
        for s in samples:
            groups.setdefault(s.dataset, []).append(s)
    else:
        groups = {None: samples}
    train, test = [], []
    for members in groups.values():
        order = rng.permutation(len(members))
        cut = math.floor(ratio * len(members) + 1e-9)
        train.extend(members[i] for i in order[:cut])
        test.extend(members[i] for i in order[cut:])
    return TrainTestSplit(train=train, test=test, seed=seed, ratio=ratio)


def evaluate(samples, w):
    """Absolute-error statistics of the weighted sum against the grades.

    ``std`` is the population standard deviation. The histogram has bins of
    width 0.25 over [0, 4]; errors above 4 are counted in the last bin.
    """
    if len(samples) < 1:
        raise TooFewSamples("evaluate needs at least one sample")
    _, y = _design(samples)
    err = np.abs(y - predict(samples, w))
    nbins = int(round(HIST_MAX / HIST_WIDTH))
    hist, _ = np.histogram(np.minimum(err, HIST_MAX), bins=nbins, range=(0.0, HIST_MAX))
    return ErrorStats(
        mae=float(np.mean(err)),
        median=float(np.median(err)),
        std=float(np.std(err)),
        histogram=hist,
    )


def read_grades(path):
    """Read ``m1,m2,m3,grade,dataset,scale,seed`` rows."""
    samples = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(GRADE_FIELDS[:4]) - set(reader.fieldnames or ())
        if missing:
            raise ParseError(f"{path}: missing columns {sorted(missing)}", row=0)
        for lineno, row in enumerate(reader, start=1):
            try:
                metrics = MetricVector(float(row["m1"]), float(row["m2"]),
                                       float(row["m3"]), k_used=0)
                grade = float(row["grade"])
                if not grade.is_integer():
                    raise ValueError(f"grade {row['grade']!r} is not an integer")
                grade = int(grade)
                seed = int(row.get("seed") or 0)
                samples.append(GradedProjection(
                    metrics=metrics, grade=grade, dataset=row.get("dataset") or "",
                    scale=row.get("scale") or "", seed=seed,
                ))
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{path}: row {lineno}: {exc}", row=lineno) from None
            if not np.all(np.isfinite(metrics.as_array())):
                raise ParseError(f"{path}: row {lineno}: non-finite metric", row=lineno)
    return samples


def write_grades(path, samples):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GRADE_FIELDS)
        for s in samples:
            m = s.metrics
            w.writerow([repr(float(m.m1)), repr(float(m.m2)), repr(float(m.m3)), s.grade, s.dataset, s.scale, s.seed])
