"""RBF-kernel support vector classification built on an in-house SMO solver."""

from .io import load_model, save_model
from .kernel import kernel_matrix, rbf_kernel
from .metrics import EvalMetrics, classification_metrics, evaluate
from .multiclass import SvmModel, predict, train_multiclass
from .search import (
    DEFAULT_C_GRID,
    DEFAULT_GAMMA_GRID,
    REFERENCE_PARAMS,
    GridSearchResult,
    fit_best,
    grid_search,
    stratified_split,
    write_grid_csv,
)
from .smo import BinarySvm, RbfParams, solve_smo, train_binary

__all__ = [
    "BinarySvm", "EvalMetrics", "GridSearchResult", "DEFAULT_C_GRID", "DEFAULT_GAMMA_GRID",
    "REFERENCE_PARAMS", "RbfParams", "SvmModel", "classification_metrics", "evaluate",
    "fit_best", "grid_search", "kernel_matrix", "load_model", "predict", "rbf_kernel",
    "save_model", "solve_smo", "stratified_split", "train_binary", "train_multiclass",
    "write_grid_csv",
]
