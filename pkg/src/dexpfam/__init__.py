"""Exponential families on finite state spaces: MLE existence and fitting.

The package decides, for a finite state space and a linear span of
exponents, whether the maximum likelihood density for a sample exists; it
computes the genuine MLE when it does and the reduced (extended) MLE on the
closure of the support when it does not, and it estimates existence
probabilities and sample-size thresholds by Monte Carlo.
"""

from . import errors
from .expfam import DensityTable, density, log_likelihood, log_partition, moments
from .families import (
    CubeSpace,
    GraphParams,
    GraphSpace,
    coupon_coverage_probability,
    cube_space,
    edge_probabilities,
    eisenberg_bounds,
    exists_probability_graphs,
    exists_probability_rademacher,
    full_span,
    graph_exists,
    graph_family,
    graph_params,
    graph_space,
    parity_exists,
    rademacher_exists,
    rademacher_span,
    sample_graph,
    walsh_span,
)
from .linspan import LinearSpan, build_span, contains_constants, evaluate, oscillation
from .lp import LpOutcome, LpProblem, LpStatus, solve_feasibility
from .mle import MleKind, MleResult, check_exists, fit, reduced_family
from .montecarlo import (
    ExperimentConfig,
    ExperimentSummary,
    FullFamily,
    GraphFamily,
    RademacherFamily,
    WalshFamily,
    estimate_existence_probability,
    estimate_nu_uniq,
    replicate_rng,
    threshold_sweep,
)
from .statespace import Sample, StateSpace, build_space, make_sample, sample_support
from .uniqueness import (
    UniquenessReport,
    closure,
    is_set_of_uniqueness,
    monotonicity_check,
)

__version__ = "0.1.0"
