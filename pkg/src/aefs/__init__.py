"""Unsupervised feature selection by a row-sparse autoencoder.

Train a two-layer autoencoder whose encoder rows are driven to exact zero
by an l2,1 penalty (proximal gradient descent), rank features by encoder
row norms, and evaluate selections with clustering/classification
accuracy against a linear self-representation baseline.
"""

from .baselines import RsrConfig, linear_aefs_objective, linear_aefs_train, rsr_objective, rsr_solve
from .data import (
    Dataset,
    SyntheticSpec,
    gen_synthetic,
    load_csv,
    load_ranking,
    normalize,
    save_ranking,
    source_sign_labels,
    write_dataset_csv,
    write_report_csv,
)
from .evaluation import (
    EvalReport,
    LabelVector,
    best_map_accuracy,
    derive_seed,
    kmeans,
    nn_classify_accuracy,
    run_experiment,
)
from .model import (
    AutoencoderParams,
    Gradients,
    Hyperparams,
    finite_difference_gradient,
    forward,
    objective,
    smooth_gradients,
    smooth_objective,
)
from .numerics import activate, activate_derivative, frobenius_norm_sq, l21_norm, row_norms
from .prox import (
    BacktrackingStep,
    FixedStep,
    TrainConfig,
    TrainTrace,
    group_soft_threshold,
    proximal_gradient_descent,
    proximal_step,
    seeded_init,
    train,
    vector_soft_threshold,
)
from .selector import FeatureRanking, rank_features, reconstruct_from_selected, select_top

__version__ = "0.1.0"

__all__ = [
    "AutoencoderParams",
    "BacktrackingStep",
    "Dataset",
    "EvalReport",
    "FeatureRanking",
    "FixedStep",
    "Gradients",
    "Hyperparams",
    "LabelVector",
    "RsrConfig",
    "SyntheticSpec",
    "TrainConfig",
    "TrainTrace",
    "activate",
    "activate_derivative",
    "best_map_accuracy",
    "derive_seed",
    "finite_difference_gradient",
    "forward",
    "frobenius_norm_sq",
    "gen_synthetic",
    "group_soft_threshold",
    "kmeans",
    "l21_norm",
    "linear_aefs_objective",
    "linear_aefs_train",
    "load_csv",
    "load_ranking",
    "nn_classify_accuracy",
    "normalize",
    "objective",
    "proximal_gradient_descent",
    "proximal_step",
    "rank_features",
    "reconstruct_from_selected",
    "row_norms",
    "rsr_objective",
    "rsr_solve",
    "run_experiment",
    "save_ranking",
    "seeded_init",
    "select_top",
    "smooth_gradients",
    "smooth_objective",
    "source_sign_labels",
    "train",
    "vector_soft_threshold",
    "write_dataset_csv",
    "write_report_csv",
]
