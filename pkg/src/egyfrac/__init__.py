"""egyfrac: counting and constructing exact unit-fraction representations.

Given n and a positive rational x, the package counts subsets A of {1..n}
with sum(1/a for a in A) equal to (or at most) x, bounds the count through
a max-entropy profile, simulates the matching product-Bernoulli model, and
constructs explicit representations through modular cancellation plus an
exact reservoir finish.
"""

__version__ = "0.1.0"

from .exactmath import (
    FactorSieve,
    Rational,
    harmonic,
    is_powersmooth,
    lcm_range,
    max_prime_power_factor,
    powersmooth_count,
    prime_powers_in,
    reciprocal_sum,
    smooth_density_linear,
)
from .counting import (
    CountQuery,
    CountResult,
    count_brute,
    count_mitm,
    enumerate_representations,
)
from .entropy import (
    ContinuousConstants,
    EntropyProfile,
    binary_entropy,
    continuous_lambda,
    cx_constant,
    discrete_profile,
    entropy_upper_bound,
)
from .modelsim import (
    ModelSample,
    MomentSummary,
    ProbEstimate,
    estimate_prob_at_most,
    model_moments,
    sample_model,
)
from .modular import (
    ModInstance,
    ModSubsetSolution,
    ShrinkResult,
    dirichlet_shrink,
    make_instance,
    min_subset_inverse_sum,
    mod_inverse,
    residue_coverage,
)
from .absorption import (
    AbsorptionConfig,
    AbsorptionTrace,
    build_config,
    cancel_prime_powers,
    construct_representation,
    reservoir_decompose,
    sample_base_set,
    verify_representation,
)
