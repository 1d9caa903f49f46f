"""Sampling and moment formulas for the product-Bernoulli subset model.

A profile from `egyfrac.entropy` assigns each m in [1, n] an independent
inclusion probability p_m; the random reciprocal sum is Z = sum over included
m of 1/m. Moments of Z have closed forms in the p_m. Sampling uses the
counter-based Philox generator keyed by (seed, trial), so every trial's draw
vector is reproducible in isolation: batch size and evaluation order cannot
change any outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .entropy import EntropyProfile
from .exactmath import reciprocal_sum

# Trials whose float sum lands within this band of the threshold are
# recomputed in exact rational arithmetic. The float error of a dot product
# over 1e5 terms is ~1e-11, so the band is two orders wider.
_EXACT_BAND = 1e-9

__all__ = [
    "MomentSummary",
    "ModelSample",
    "ProbEstimate",
    "model_moments",
    "sample_model",
    "sample_z_values",
    "estimate_prob_at_most",
]


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    third_abs_sum: float


@dataclass(frozen=True)
class ModelSample:
    subset: tuple[int, ...]
    z: Fraction


@dataclass(frozen=True)
class ProbEstimate:
    estimate: float
    stderr: float
    trials: int
    seed: int
    exact_fallbacks: int


def model_moments(profile: EntropyProfile) -> MomentSummary:
    """Exact closed forms for E[Z], Var[Z] and the summed third absolute moments.

    Per index m the summand of Z is 1/m with probability p_m and 0 otherwise,
    so the centered third absolute moment is
    p_m*((1-p_m)/m)**3 + (1-p_m)*(p_m/m)**3.
    """
    m = np.arange(1, profile.n + 1, dtype=np.float64)
    p = profile.p
    mean = float(np.dot(p, 1.0 / m))
    variance = float(np.dot(p * (1.0 - p), 1.0 / (m * m)))
    third = float(np.sum(p * ((1.0 - p) / m) ** 3 + (1.0 - p) * (p / m) ** 3))
    return MomentSummary(mean=mean, variance=variance, third_abs_sum=third)


def _check_seed(seed: int) -> int:
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must fit in 64 bits, got {seed}")
    return int(seed)


def _trial_uniforms(seed: int, trial: int, n: int) -> np.ndarray:
    key = np.array([seed, trial], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random(n)


def sample_model(profile: EntropyProfile, seed: int) -> ModelSample:
    """One subset drawn from the model, with its exact rational sum."""
    seed = _check_seed(seed)
    u = _trial_uniforms(seed, 0, profile.n)
    idx = np.flatnonzero(u < profile.p) + 1
    subset = tuple(int(i) for i in idx)
    return ModelSample(subset=subset, z=reciprocal_sum(subset))


def sample_z_values(profile: EntropyProfile, trials: int, seed: int) -> np.ndarray:
    """Float64 Z values for trials 0..trials-1 (trial t uses key (seed, t))."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    seed = _check_seed(seed)
    inv = 1.0 / np.arange(1, profile.n + 1, dtype=np.float64)
    out = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        u = _trial_uniforms(seed, t, profile.n)
        out[t] = np.dot(u < profile.p, inv)
    return out


def estimate_prob_at_most(
    profile: EntropyProfile, x: Fraction, trials: int, seed: int, trial_offset: int = 0
) -> ProbEstimate:
    """Monte Carlo estimate of Pr[Z <= x] with a binomial standard error.

    The comparison is decided in float arithmetic except within a narrow
    band around the threshold, where the trial is replayed and the subset
    sum is recomputed exactly, so rational thresholds are never misjudged
    by rounding. Trial t draws with key (seed, trial_offset + t), so a run
    split into batches reproduces the unbatched run.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    seed = _check_seed(seed)
    x = Fraction(x)
    xf = float(x)
    band = _EXACT_BAND * max(1.0, abs(xf))
    inv = 1.0 / np.arange(1, profile.n + 1, dtype=np.float64)
    hits = 0
    fallbacks = 0
    for t in range(trial_offset, trial_offset + trials):
        u = _trial_uniforms(seed, t, profile.n)
        included = u < profile.p
        z = float(np.dot(included, inv))
        if abs(z - xf) <= band:
            fallbacks += 1
            members = tuple(int(i) for i in np.flatnonzero(included) + 1)
            if reciprocal_sum(members) <= x:
                hits += 1
        elif z <= xf:
            hits += 1
    phat = hits / trials
    stderr = math.sqrt(phat * (1.0 - phat) / trials)
    return ProbEstimate(
        estimate=phat, stderr=stderr, trials=trials, seed=seed, exact_fallbacks=fallbacks
    )
