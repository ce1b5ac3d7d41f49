"""prefkit: turn binary preference surveys into fixed-size item kits.

Two clustering pipelines over an n x m 0/1 survey matrix: damped k-means with
silhouette sweeps, and truncated-SVD sign clustering.  Either yields one kit
per cluster; users are then reassigned to their lowest-loss kit and the
dissatisfaction is reported per kit under normal and exponential averaging.
"""

from .assignment import (
    INITIAL,
    REASSIGNED,
    Assignment,
    ClusterLosses,
    LossReport,
    assignment_from_clusters,
    cluster_losses,
    loss_report,
    reassign,
    user_loss,
)
from .errors import (
    CatalogError,
    DuplicateItemIdError,
    DuplicateUserIdError,
    EmptyCategoryError,
    EmptyMatrixError,
    MalformedRowError,
    NonBinaryEntryError,
    PreferenceFormatError,
    PrefkitError,
    RankOutOfRangeError,
    UnknownCategoryError,
    WidthMismatchError,
)
from .io import (
    load_catalog,
    load_ground_truth,
    load_preferences,
    write_ground_truth,
    write_preferences,
)
from .kits import (
    FrequencyProfile,
    Kit,
    design_all,
    design_kit,
    frequency_profile,
    top_items,
    validate_kit,
)
from .kmeans import (
    KMeansConfig,
    KMeansRun,
    SilhouetteReport,
    SweepTable,
    compute_centroids,
    find_closest_centroids,
    init_centroids,
    kits_from_centroids,
    run_kmeans,
    silhouette,
    silhouette_from_labels,
    sweep,
)
from .model import (
    Category,
    Item,
    ItemCatalog,
    PreferenceMatrix,
    RowViolation,
    SelectionConstraint,
    validate_constraint,
)
from .seeding import derive_seed, generator
from .signs import (
    ITEMS,
    USERS,
    SignClustering,
    cluster_count_table,
    item_sign_clusters,
    user_sign_clusters,
)
from .svd import SvdFactors, TruncatedSvd, scree, svd, truncate
from .synthetic import SyntheticSpec, generate_synthetic, random_kits

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "Category",
    "CatalogError",
    "ClusterLosses",
    "DuplicateItemIdError",
    "DuplicateUserIdError",
    "EmptyCategoryError",
    "EmptyMatrixError",
    "FrequencyProfile",
    "INITIAL",
    "ITEMS",
    "Item",
    "ItemCatalog",
    "KMeansConfig",
    "KMeansRun",
    "Kit",
    "LossReport",
    "MalformedRowError",
    "NonBinaryEntryError",
    "PreferenceFormatError",
    "PreferenceMatrix",
    "PrefkitError",
    "REASSIGNED",
    "RankOutOfRangeError",
    "RowViolation",
    "SelectionConstraint",
    "SignClustering",
    "SilhouetteReport",
    "SvdFactors",
    "SweepTable",
    "SyntheticSpec",
    "TruncatedSvd",
    "USERS",
    "UnknownCategoryError",
    "WidthMismatchError",
    "assignment_from_clusters",
    "cluster_count_table",
    "cluster_losses",
    "compute_centroids",
    "derive_seed",
    "design_all",
    "design_kit",
    "find_closest_centroids",
    "frequency_profile",
    "generate_synthetic",
    "generator",
    "init_centroids",
    "item_sign_clusters",
    "kits_from_centroids",
    "load_catalog",
    "load_ground_truth",
    "load_preferences",
    "loss_report",
    "random_kits",
    "reassign",
    "run_kmeans",
    "scree",
    "silhouette",
    "silhouette_from_labels",
    "svd",
    "sweep",
    "top_items",
    "truncate",
    "user_loss",
    "user_sign_clusters",
    "validate_constraint",
    "validate_kit",
    "write_ground_truth",
    "write_preferences",
]
