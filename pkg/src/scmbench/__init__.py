"""scmbench: causal-DAG-grounded benchmark tables and structural scoring.

Generate tabular datasets from known structural causal models, then score
any synthetic twin of those tables on how much causal structure it
preserves: skeleton recovery, conditional-independence patterns, edge
directions, full LiNGAM orientation, and downstream interventional /
counterfactual fidelity.
"""

from .errors import DegenerateDataError, DomainError, ParameterError
from .graphs import (
    CiTriple,
    Dag,
    Skeleton,
    ci_benchmark_triples,
    d_separated,
    direction_eval_edges,
    minimal_separating_sets,
    random_dag,
    skeleton_of,
    topological_order,
)
from .scm import (
    Dataset,
    MechanismFamily,
    Scm,
    append_binary_column,
    derive_seed,
    discretize_column,
    generate,
    generate_do,
    ground_truth_counterfactual,
    sample_scm,
)
from .stats import (
    RegressionFit,
    TestResult,
    fisher_z_test,
    hsic_test,
    kci_test,
    ols_fit,
    partial_correlation,
    poly_regress,
    roc_auc,
)
from .discovery import (
    BestOfResult,
    DirectionVerdict,
    anm_hsic_direction,
    best_of_direction,
    direct_lingam,
    igci_direction,
    pc_skeleton,
    reci_direction,
)
from .metrics import AmaeInputs, GraphScore, amae, ci_auc_score, dag_score, direction_accuracy, skeleton_score
from .downstream import (
    DownstreamConfig,
    DownstreamResult,
    FittedScm,
    InterventionGrid,
    counterfactual_predict,
    downstream_eval,
    fit_anm,
    interventional_expectations,
    quantile_grid,
)
from .harness import BenchConfig, bootstrap_resample, cmd_baseline, cmd_evaluate, cmd_generate, cmd_report

__version__ = "0.1.0"
