"""Nonasymptotic growth and concentration bounds for products of random matrices.

The library evaluates closed-form moment, expectation, and tail bounds for
products Z_n = Y_n ... Y_1 Z_0 of independent (or adapted) random factors,
simulates such products with reproducible counter-based streams, enumerates
finite-support products exactly, and certifies every inequality empirically.
"""

from .bounds import (
    BoundResult,
    Condition,
    ProductStats,
    ScenarioLT,
    SchattenParams,
    concentration_moment_bound,
    contraction_bounds,
    expectation_concentration_bound,
    expectation_growth_bound,
    growth_from_concentration,
    growth_moment_bound,
    inverse_perturbation_stats,
    lowrank_moment_bounds,
    perturbation_bounds,
    product_stats_from_ensembles,
    scalar_reference_bounds,
    scenario_lt_bounds,
    spectral_radius_expectation_bound,
    tail_concentration_bound,
    tail_growth_bound,
    uniform_moment_bounds,
)
from .ensembles import (
    FactorEnsemble,
    FactorStats,
    ensemble_from_config,
    ensemble_to_config,
    estimate_factor_stats,
    householder_direction,
    make_bounded_perturbation,
    make_rademacher_rank_one,
    make_random_projector_contraction,
    projected_deviation_stat,
    support_stats,
)
from .errors import (
    EnumerationInfeasibleError,
    InvalidConstructionError,
    InvalidInputError,
    InvalidParameterError,
    MatprodError,
    MissingUniformBoundsError,
    NothingToCheckError,
    UnsupportedEnsembleError,
)
from .schatten import (
    matrix_from_csv,
    matrix_from_json,
    matrix_to_csv,
    matrix_to_json,
    moment_norm,
    schatten_norm,
    singular_values,
    smoothness_gap,
    spectral_norm,
    spectral_radius,
)
from .simulate import (
    EnumerationReport,
    HistoryFreeHook,
    MCEstimate,
    NormBiasedTwoPointHook,
    ProductSpec,
    SimulationResult,
    TailEstimate,
    clopper_pearson,
    conjugated_spec,
    enumerate_product,
    estimate_norm_statistics,
    expected_product,
    simulate_product,
    spec_from_config,
    spec_to_config,
    tail_frequencies,
    triangular_array_run,
)
from .streams import DEFAULT_SEED, substream
from .verify import (
    CheckReport,
    CompareRow,
    check_bound_dominance,
    check_factor_contraction,
    check_martingale_bound,
    check_number_inequality,
    check_subquadratic,
    check_uniform_smoothness,
    comparison_rows,
    default_suite,
    projected_product_stats,
    sharpness_probe,
)

__version__ = "0.1.0"
