"""Feature encoding, from-scratch classifiers, and cross-validated grid search."""

from .encoding import EncoderState, LabeledMatrix, encode, fit_encoder
from .ensemble import (
    AdaBoostModel,
    ForestModel,
    GBoostModel,
    TreeModel,
    adaboost_fit,
    forest_fit,
    gboost_fit,
    log_loss,
    tree_fit,
)
from .knn import KnnModel, knn_fit, knn_predict, neighbor_scores
from .selection import (
    FAMILIES,
    GridSearchResult,
    ModelSpec,
    default_grids,
    fit_model,
    grid_search_cv,
    reduced_grids,
    stratified_fold_indices,
)
from .tree import Tree, fit_classification_tree, fit_regression_tree

__all__ = [
    "AdaBoostModel",
    "EncoderState",
    "FAMILIES",
    "ForestModel",
    "GBoostModel",
    "GridSearchResult",
    "KnnModel",
    "LabeledMatrix",
    "ModelSpec",
    "Tree",
    "TreeModel",
    "adaboost_fit",
    "default_grids",
    "encode",
    "fit_classification_tree",
    "fit_encoder",
    "fit_model",
    "fit_regression_tree",
    "forest_fit",
    "gboost_fit",
    "grid_search_cv",
    "knn_fit",
    "knn_predict",
    "log_loss",
    "neighbor_scores",
    "reduced_grids",
    "stratified_fold_indices",
    "tree_fit",
]
