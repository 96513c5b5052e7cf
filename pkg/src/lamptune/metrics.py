"""Projection quality: silhouette, neighbourhood preservation, silhouette
ratio and their learned linear combination."""

import dataclasses

import numpy as np

from . import kernels
from .dataset import knn_indices, pairwise_distances
from .errors import DegenerateDenominator, InvalidK, ShapeMismatch, SingleClass

DEFAULT_K = 7
EPS_DENOMINATOR = 1e-9


@dataclasses.dataclass(frozen=True)
class MetricVector:
    m1: float
    m2: float
    m3: float
    k_used: int

    def __post_init__(self):
        for name in ("m1", "m2", "m3"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def as_array(self):
        return np.array([self.m1, self.m2, self.m3])


@dataclasses.dataclass(frozen=True)
class MetricWeights:
    w1: float
    w2: float
    w3: float

    def as_array(self):
        return np.array([self.w1, self.w2, self.w3])

    def to_dict(self):
        return {"w1": self.w1, "w2": self.w2, "w3": self.w3}

    @classmethod
    def from_dict(cls, obj):
        return cls(float(obj["w1"]), float(obj["w2"]), float(obj["w3"]))


# weights of the published learned metric
PUBLISHED_WEIGHTS = MetricWeights(5.7097, 3.77416, -0.0106)


def _codes(labels):
    classes, codes = np.unique(np.asarray(labels), return_inverse=True)
    return codes.astype(np.int64), len(classes)


def silhouette(distances, labels):
    """Mean silhouette with separation = distance to the nearest other-class point.

    Members of singleton classes, and points whose cohesion and separation are
    both zero, contribute 0.
    """
    codes, n_classes = _codes(labels)
    if distances.shape != (len(codes), len(codes)):
        raise ShapeMismatch(f"{distances.shape} distances for {len(codes)} labels")
    if n_classes < 2:
        raise SingleClass("silhouette needs at least two distinct labels")
    return float(np.mean(kernels.silhouette_terms(distances, codes, n_classes)))


def neighborhood_preservation(high_distances, low_distances, k):
    """Mean fraction of each row's k nearest neighbours kept in the other space."""
    if high_distances.shape != low_distances.shape:
        raise ShapeMismatch(
            f"distance matrices differ: {high_distances.shape} vs {low_distances.shape}"
        )
    n = high_distances.shape[0]
    if not 1 <= k <= n - 1:
        raise InvalidK(f"k must lie in [1, {n - 1}], got {k}")
    high = knn_indices(high_distances, k)
    low = knn_indices(low_distances, k)
    shared = int((high[:, :, None] == low[:, None, :]).any(axis=2).sum())
    return shared / (n * k)


def silhouette_ratio(high_distances, low_distances, labels):
    """silhouette(projected) / silhouette(original)."""
    denom = silhouette(high_distances, labels)
    if abs(denom) <= EPS_DENOMINATOR:
        raise DegenerateDenominator(
            f"silhouette of the original data is {denom:.3e}; ratio undefined"
        )
    return silhouette(low_distances, labels) / denom


def combined_metric(m, w):
    return w.w1 * m.m1 + w.w2 * m.m2 + w.w3 * m.m3


def score_projection(data, coords, k=DEFAULT_K, weights=PUBLISHED_WEIGHTS):
    """Compute (m1, m2, m3) for ``coords`` against ``data`` and the combined score.

    ``coords`` may be a ``Projection2D`` or an (n, 2) array row-aligned with
    ``data``.
    """
    coords = np.asarray(getattr(coords, "coords", coords), dtype=np.float64)
    if coords.shape != (data.n, 2):
        raise ShapeMismatch(f"projection has shape {coords.shape}, data has {data.n} rows")
    high = pairwise_distances(data.features)
    low = pairwise_distances(coords)
    m1 = silhouette(low, data.labels)
    m2 = neighborhood_preservation(high, low, k)
    base = silhouette(high, data.labels)
    if abs(base) <= EPS_DENOMINATOR:
        raise DegenerateDenominator(
            f"silhouette of the original data is {base:.3e}; ratio undefined"
        )
    m3 = m1 / base
    metrics = MetricVector(m1=m1, m2=m2, m3=m3, k_used=int(k))
    return metrics, combined_metric(metrics, weights)
