"""Statistically significant pattern mining under ordinal utility preferences.

The package mines labeled categorical transaction data for patterns that are
both statistically significant (familywise error rate controlled) and
maximally preferred under a user-defined partial order.  It ships the
iterative utility-aware procedure, the classical baselines it is measured
against, and a Monte-Carlo harness that calibrates all of them.
"""

__version__ = "0.1.0"

from .exact_tests import (
    ContingencyTable,
    Sidedness,
    fisher_p_value,
    hypergeom_pmf,
    min_attainable_p,
)
from .utility import (
    EmptyOrder,
    ExplicitComparator,
    FamilyDominance,
    Ordering,
    PreferenceOrder,
    SetComparison,
    UtilityKey,
    compare,
    compare_sets,
    dominating_subset,
    less_useful_count_weights,
    utility_measure,
)
from .procedures import (
    Hypothesis,
    IterationRecord,
    ProcedureResult,
    bonferroni,
    holm,
    invalid_spur,
    spur,
    spur_closed_form_oracle,
    t_bonferroni,
    tarone_threshold,
    weighted_bonferroni,
)
from .patterns import (
    BinRule,
    CategoricalSchema,
    DataError,
    TargetSpec,
    TransactionTable,
    VariableSpec,
    build_hypotheses,
    enumerate_patterns,
    ingest_csv,
    validate_disjointness,
)
from .bench import BenchReport, SyntheticConfig, gen_pvalues, run_benchmark
from .mining import (
    ConfigError,
    InternalInvariantError,
    MiningReport,
    RunConfig,
    load_run_config,
    run_mining,
)

__all__ = [
    "__version__",
    "ContingencyTable",
    "Sidedness",
    "hypergeom_pmf",
    "fisher_p_value",
    "min_attainable_p",
    "UtilityKey",
    "Ordering",
    "SetComparison",
    "PreferenceOrder",
    "FamilyDominance",
    "ExplicitComparator",
    "EmptyOrder",
    "compare",
    "dominating_subset",
    "utility_measure",
    "compare_sets",
    "less_useful_count_weights",
    "Hypothesis",
    "IterationRecord",
    "ProcedureResult",
    "tarone_threshold",
    "bonferroni",
    "weighted_bonferroni",
    "holm",
    "t_bonferroni",
    "spur",
    "invalid_spur",
    "spur_closed_form_oracle",
    "BinRule",
    "VariableSpec",
    "TargetSpec",
    "CategoricalSchema",
    "TransactionTable",
    "DataError",
    "ingest_csv",
    "enumerate_patterns",
    "build_hypotheses",
    "validate_disjointness",
    "SyntheticConfig",
    "BenchReport",
    "gen_pvalues",
    "run_benchmark",
    "RunConfig",
    "MiningReport",
    "ConfigError",
    "InternalInvariantError",
    "load_run_config",
    "run_mining",
]
