"""Conditional entropy of finite measurable covers and partitions on
symbolic dynamical systems, with numerical verification of the associated
identities, inequalities, and variational principles at desk scale."""

from .systems import (
    FactorMap,
    SymbolicSystem,
    admissible_words,
    full_shift,
    golden_mean,
    identity_code,
    permutation,
    power_system,
    sft,
    word_count_growth,
)
from .families import (
    FamilyDelta,
    SetFamily,
    UStarBudgetExceeded,
    UStarEnumeration,
    cylinder_partition,
    dynamical_join,
    ext_partitions,
    extend_window,
    family_delta,
    family_of_points,
    family_of_words,
    finer,
    join,
    pullback,
    trivial_partition,
    ustar_enumerate,
    view_in_window,
)
from .measures import (
    ConditionalMeasure,
    ErgodicComponent,
    InvariantMeasure,
    PushforwardMeasure,
    ReducibleChainError,
    bernoulli,
    condition_on,
    cycle_measure,
    cylinder_mass,
    ergodic_decompose,
    markov,
    mix,
    power_measure,
    stationary_of,
    uniform_cycle_measure,
)
from .static_entropy import (
    EntropyValue,
    RouteDisagreement,
    conditional_cover_entropy,
    conditional_entropy,
    cover_entropy,
    covering_number,
    covering_number_exhaustive,
    shannon,
)
from .dynamic_entropy import (
    EntropyEstimate,
    PowerIdentityReport,
    RefinementSearchResult,
    SubadditivityError,
    block_recode,
    covering_rate,
    entropy_rate,
    joined_cover_rate,
    power_identity_check,
    refining_partition_rate,
    subadditive_estimate,
)
from .principles import (
    PrincipleReport,
    cover_rate_bracket,
    ergodic_additivity_check,
    factor_conditioned_profile,
    factor_invariance_check,
    minmax_check,
    pushforward,
    variational_search,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
