"""
marginal-pgm: estimate a discrete distribution from noisy linear measurements
of its marginals and answer new queries from a compact graphical model.
"""
from .core.clique_vector import CliqueVector
from .core.domain import Clique, Domain
from .core.errors import PGMError
from .core.estimation import (
    EstimationReport,
    EstimatorConfig,
    StepRule,
    accelerated_estimate,
    estimate,
    mirror_descent,
)
from .core.factor import Factor, factor_product, factor_project, log_normalize
from .core.inference import (
    FactoredQuery,
    QueryAnswer,
    answer_factored_query,
    model_marginal,
    sample_synthetic,
)
from .core.junction_tree import (
    JunctionTree,
    ModelSize,
    build_junction_tree,
    marginal_oracle,
    tree_entropy,
)
from .core.loss import LossSpec, loss_value_and_gradient
from .core.measurements import (
    LinearMeasurement,
    estimate_total,
    lipschitz_constant,
    rescale_measurements,
)
from .core.mechanisms import (
    PrivacyAccountant,
    exponential_select,
    laplace_measure,
    sensitivity,
)
from .core.model import GraphicalModel
from .core.mwem import mwem_pgm
from .core.query_blocks import BlockKind, build_block
from .core.workloads import (
    Workload,
    adjacent_triples_workload,
    all_kway_workload,
    workload_error,
)

__version__ = "1.0.0"

__all__ = [
    "BlockKind", "Clique", "CliqueVector", "Domain", "EstimationReport", "EstimatorConfig",
    "Factor", "FactoredQuery", "GraphicalModel", "JunctionTree", "LinearMeasurement",
    "LossSpec", "ModelSize", "PGMError", "PrivacyAccountant", "QueryAnswer", "StepRule",
    "Workload", "accelerated_estimate", "adjacent_triples_workload", "all_kway_workload",
    "answer_factored_query", "build_block", "build_junction_tree", "estimate",
    "estimate_total", "exponential_select", "factor_product", "factor_project",
    "laplace_measure", "lipschitz_constant", "log_normalize", "loss_value_and_gradient",
    "marginal_oracle", "mirror_descent", "model_marginal", "mwem_pgm",
    "rescale_measurements", "sample_synthetic", "sensitivity", "tree_entropy",
    "workload_error",
]
