"""LAMP: per-instance orthogonal mappings fitted by moving least squares."""

import csv
import dataclasses
import math
from pathlib import Path

import numpy as np

from . import kernels
from .dataset import RAW, minmax_scale
from .errors import InputError, ParseError, RankCollapse, TooFewPoints
from .linalg import pca_top2

EPS_WEIGHT = 1e-12
EPS_CONTROL = 1e-9
COLLAPSE_TOL = 1e-14
# side of the visual box control anchors are fitted into by the pipeline
DEFAULT_EXTENT = 1.0


@dataclasses.dataclass(frozen=True)
class ControlPointSet:
    indices: np.ndarray
    anchors: np.ndarray
    source_dim: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        anchors = np.asarray(self.anchors, dtype=np.float64)
        if len(np.unique(idx)) != len(idx):
            raise InputError("control indices must be distinct")
        if len(idx) < 3:
            raise TooFewPoints(f"need at least 3 control points, got {len(idx)}")
        if anchors.shape != (len(idx), 2) or not np.all(np.isfinite(anchors)):
            raise InputError(f"anchors must be a finite ({len(idx)}, 2) array")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "anchors", anchors)


@dataclasses.dataclass(frozen=True)
class Projection2D:
    coords: np.ndarray
    dataset_name: str
    scale_used: object
    control: ControlPointSet
    seed: int
    mappings: np.ndarray = None


def default_control_count(n, n_classes):
    return min(n, max(math.ceil(math.sqrt(n)), 3, n_classes))


def select_control_points(data, count, seed):
    """Stratified random choice of ``count`` row indices.

    Each class receives a share proportional to its size (largest remainder),
    with at least one point per class whenever ``count`` allows it. The result
    is sorted and depends only on the labels, ``count`` and ``seed``.
    """
    n = data.n
    if not 3 <= count <= n:
        raise TooFewPoints(f"control count must lie in [3, {n}], got {count}")
    if count == n:
        return np.arange(n)
    codes, n_classes = data.label_codes()
    sizes = np.bincount(codes, minlength=n_classes)
    quota = count * sizes / n
    alloc = np.floor(quota).astype(np.int64)
    if count >= n_classes:
        alloc = np.maximum(alloc, 1)
    # hand out or take back the remainder, largest fractional parts first
    order = np.lexsort((np.arange(n_classes), -(quota - np.floor(quota))))
    while alloc.sum() < count:
        for c in order:
            if alloc.sum() == count:
                break
            if alloc[c] < sizes[c]:
                alloc[c] += 1
    while alloc.sum() > count:
        for c in np.argsort(-alloc, kind="stable"):
            if alloc.sum() == count:
                break
            if alloc[c] > 1:
                alloc[c] -= 1
    rng = np.random.default_rng(seed)
    chosen = []
    for c in range(n_classes):
        members = np.flatnonzero(codes == c)
        chosen.append(rng.choice(members, size=alloc[c], replace=False))
    return np.sort(np.concatenate(chosen))


def seed_control_projection(data, indices, anchors=None, extent=None):
    """Place the control points in the plane.

    By default the anchors are the PCA coordinates of the control rows. With
    ``extent`` set they are additionally translated and uniformly rescaled so
    their bounding box fits ``[0, extent]^2`` (aspect ratio kept); this pins the
    visual scale independently of the feature scale. An explicit ``anchors``
    array, e.g. from :func:`read_anchors`, is used verbatim.
    """
    idx = np.asarray(indices, dtype=np.int64)
    if idx.min(initial=0) < 0 or idx.max(initial=0) >= data.n:
        raise InputError("control index out of range")
    if anchors is None:
        anchors = pca_top2(data.features[idx])
        if extent is not None:
            anchors = fit_to_box(anchors, extent)
    return ControlPointSet(indices=idx, anchors=anchors, source_dim=data.d)


def fit_to_box(points, extent):
    lo = points.min(axis=0)
    span = float((points.max(axis=0) - lo).max())
    if span == 0.0:
        return np.zeros_like(points)
    return (points - lo) * (extent / span)


def lamp_project(data, control, scale=RAW, seed=0, return_mappings=False):
    """Project every row of ``data`` through its own orthogonal mapping.

    Control rows are placed on their anchors exactly. ``return_mappings``
    keeps the per-row d x 2 orthogonal matrices (zeros on rows that hit a
    control point) in ``Projection2D.mappings``.
    """
    if control.source_dim != data.d:
        raise InputError(
            f"control points live in {control.source_dim} dimensions, data in {data.d}"
        )
    xc = data.features[control.indices]
    coords, hits, top_sv, maps = kernels.lamp_map(
        data.features, xc, control.anchors, EPS_WEIGHT, EPS_CONTROL, return_mappings
    )
    collapsed = np.flatnonzero(top_sv <= COLLAPSE_TOL)
    if collapsed.size:
        raise RankCollapse(
            f"weighted cross-covariance vanishes for {collapsed.size} rows "
            f"(first: row {collapsed[0]})"
        )
    coords[control.indices] = control.anchors
    return Projection2D(
        coords=coords,
        dataset_name=data.name,
        scale_used=scale,
        control=control,
        seed=seed,
        mappings=maps if return_mappings else None,
    )


def project_dataset(data, scale=RAW, seed=0, controls=None, anchors=None,
                    extent=DEFAULT_EXTENT, indices=None, return_mappings=False):
    """Scale, pick controls, seed anchors and run LAMP in one call.

    ``indices`` overrides the control choice (the tuner passes the set it drew
    on the unscaled data); ``anchors`` overrides the anchor seeding.
    """
    if indices is None:
        _, n_classes = data.label_codes()
        count = controls or default_control_count(data.n, n_classes)
        indices = select_control_points(data, count, seed)
    scaled = minmax_scale(data, scale)
    control = seed_control_projection(scaled, indices, anchors=anchors, extent=extent)
    return scaled, lamp_project(scaled, control, scale=scale, seed=seed,
                                return_mappings=return_mappings)


def read_anchors(path):
    """Read an anchors override file with columns ``index,x,y``."""
    indices, xy = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"index", "x", "y"} <= set(reader.fieldnames):
            raise ParseError(f"{path}: anchors file needs columns index,x,y", row=0)
        for lineno, row in enumerate(reader, start=1):
            try:
                indices.append(int(row["index"]))
                xy.append((float(row["x"]), float(row["y"])))
            except (TypeError, ValueError):
                raise ParseError(f"{path}: bad anchor on row {lineno}", row=lineno) from None
    return np.array(indices, dtype=np.int64), np.array(xy, dtype=np.float64).reshape(-1, 2)


def write_projection(path, proj, labels):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "x", "y", "label"])
        for i, (x, y) in enumerate(proj.coords):
            w.writerow([i, repr(float(x)), repr(float(y)), labels[i]])


def read_projection(path):
    """Read ``row,x,y,label``; returns coordinates ordered by row and labels."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"row", "x", "y"} <= set(reader.fieldnames):
            raise ParseError(f"{path}: projection file needs columns row,x,y[,label]", row=0)
        for lineno, row in enumerate(reader, start=1):
            try:
                rows.append((int(row["row"]), float(row["x"]), float(row["y"]),
                             row.get("label") or ""))
            except (TypeError, ValueError):
                raise ParseError(f"{path}: bad projection row {lineno}", row=lineno) from None
    rows.sort(key=lambda r: r[0])
    if [r[0] for r in rows] != list(range(len(rows))):
        raise ParseError(f"{Path(path)}: rows must be numbered 0..n-1")
    coords = np.array([(r[1], r[2]) for r in rows], dtype=np.float64).reshape(-1, 2)
    return coords, np.array([r[3] for r in rows])
