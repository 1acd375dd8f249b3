"""Tree-decomposable (third-order) approximations of binary joint distributions."""

from .distribution import (
    JointTable,
    TripletStats,
    ZeroProbabilityEvidence,
    entropy,
    marginal,
    posterior,
    random_table,
    triplet_stats,
    validate,
)
from .search import SearchOptions, SearchReport, branch_and_bound, brute_force, chow_liu, greedy
from .star import (
    StarDegenerate,
    StarNoRealSolution,
    StarParams,
    is_proper,
    star_forward,
    star_posterior,
    star_reroot,
    star_residual,
    star_solve,
)
from .structure import (
    Component,
    FittedModel,
    ProjectionError,
    Topology,
    i_divergence,
    log_score,
    model_joint,
    project_parameters,
    quadratic_score,
    reroot,
    spherical_score,
    validate_topology,
    weight_sum,
)
from .weights import WeightCatalog, build_catalog, mi_pair, mi_triple

__version__ = "0.1.0"
