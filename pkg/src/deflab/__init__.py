"""deflab: deficient sets in random finite groupoids and d-ary algebras.

Exact combinatorics for the class counts and limit rates, configuration
diagrams with a realizability decision procedure, and a reproducible
counter-based Monte Carlo engine that converges to the closed-form limits.
"""
from .combinatorics import (
    binomial,
    disjoint_pair_class_count,
    disjoint_triple_class_count,
    expected_count,
    falling,
    limit_probability,
    limit_rate,
    multifactorial,
    nondisjoint_class_bound,
    partial_ie_sum,
    perfect_matching_count,
    rate_dary,
    rate_exceedance,
    stirling2,
)
from .core import (
    CellSignature,
    OperationTable,
    PairType,
    SubsetQuery,
    TableFormatError,
    cell_signature,
    classify_pair,
    deficient_subsets,
    exceedance,
    image,
    parse_table,
    serialize_table,
)
from .diagrams import (
    Configuration,
    ConstraintSystem,
    Diagram,
    DiagramStats,
    canonicalize,
    compile_constraints,
    config_of_table,
    count_diagrams,
    diagram_of,
    enumerate_diagrams,
    equivalent,
    realizable,
    stats,
    verify_lemma3,
    witness_groupoid,
)
from .estimation import (
    CountHistogram,
    EstimateRecord,
    ExactResult,
    SamplerKey,
    SweepRow,
    cell_value,
    count_distribution,
    exact_probability,
    independence_check,
    mc_probability,
    pair_statistics,
    per_type_presence,
    sample_indicator,
    sampled_table,
    sweep,
)

__version__ = "0.1.0"
