"""Bank credit-rating prediction from fused interbank and persistence networks.

The package builds two bank graphs per quarter, one from aggregate
interbank totals via a minimum-density heuristic and one from persistent
homology over bank-statement features, fuses them into a two-relation
graph, and trains a relation-weighted GCN to predict next-quarter
ratings.
"""

from .data_model import (
    QuarterParseError,
    QuarterSnapshot,
    SyntheticConfig,
    bucket_ratings,
    gen_synthetic,
    load_quarter_csv,
    scale_features,
    write_quarter_csv,
)
from .distance import cosine_distance_matrix
from .filtration import Filtration, PhConfig, Simplex, build_rips_filtration
from .gcn import (
    GcnModel,
    HeteroGraph,
    TrainConfig,
    backward,
    build_hetero_graph,
    cross_entropy_loss,
    forward,
    load_model,
    normalize_adjacency,
    predict,
    save_model,
    train,
)
from .mdm import (
    BalanceError,
    InfeasibleMarketError,
    MdmConfig,
    brute_force_min_support,
    check_balance,
    infer_loan_matrix,
    loan_matrix_to_edges,
)
from .metrics import (
    TTestResult,
    ZeroVarianceError,
    classification_metrics,
    confusion_matrix,
    homophily_ratio,
    paired_t_test,
    student_t_sf,
)
from .persistence_graph import extract_edges, mst_edges
from .pipeline import ExperimentConfig, load_experiment_config, run_experiment, run_variant
from .reduction import PersistencePair, filter_persistent, lifespan, reduce_boundary_matrix

__version__ = "0.1.0"

__all__ = [
    "QuarterParseError",
    "QuarterSnapshot",
    "SyntheticConfig",
    "bucket_ratings",
    "gen_synthetic",
    "load_quarter_csv",
    "scale_features",
    "write_quarter_csv",
    "cosine_distance_matrix",
    "Filtration",
    "PhConfig",
    "Simplex",
    "build_rips_filtration",
    "GcnModel",
    "HeteroGraph",
    "TrainConfig",
    "backward",
    "build_hetero_graph",
    "cross_entropy_loss",
    "forward",
    "load_model",
    "normalize_adjacency",
    "predict",
    "save_model",
    "train",
    "BalanceError",
    "InfeasibleMarketError",
    "MdmConfig",
    "brute_force_min_support",
    "check_balance",
    "infer_loan_matrix",
    "loan_matrix_to_edges",
    "TTestResult",
    "ZeroVarianceError",
    "classification_metrics",
    "confusion_matrix",
    "homophily_ratio",
    "paired_t_test",
    "student_t_sf",
    "extract_edges",
    "mst_edges",
    "ExperimentConfig",
    "load_experiment_config",
    "run_experiment",
    "run_variant",
    "PersistencePair",
    "filter_persistent",
    "lifespan",
    "reduce_boundary_matrix",
    "__version__",
]
