"""LAMP projections scored by a learned quality metric, with scale tuning."""

__version__ = "0.1.0"

from ._accel import get_backend, set_backend, use_backend
from .dataset import (
    RAW, LabeledDataset, bundled_path, knn_indices, load_csv, minmax_scale,
    pairwise_distances,
)
from .lamp import (
    ControlPointSet, Projection2D, lamp_project, project_dataset,
    seed_control_projection, select_control_points,
)
from .linalg import lu_solve, pca_top2, thin_svd_tall
from .metrics import (
    PUBLISHED_WEIGHTS, MetricVector, MetricWeights, combined_metric,
    neighborhood_preservation, score_projection, silhouette, silhouette_ratio,
)
from .trainer import (
    ErrorStats, GradedProjection, build_normal_system, evaluate, fit_weights,
    split_train_test,
)
from .tuner import SweepConfig, SweepTable, best_scale, sweep, uniform_scales
