"""Entropy profiles for random subsets weighted toward a reciprocal-sum target.

The discrete side solves, by bisection on c > 0, for the product-Bernoulli
distribution with inclusion probabilities p_m = 1/(1 + exp(c*n/m)) whose mean
reciprocal sum equals x; its Shannon entropy H (in bits) upper-bounds the
log-count of subsets with sum at most x. When x is at least half the full
harmonic mass the unconstrained maximizer p_m = 1/2 already satisfies the
constraint and H equals the support size.

The continuous side solves the n -> infinity limit: lambda is the root of

    integral_0^1 dy / (y * (1 + exp(lambda / y))) = x

and c_x integrates the binary entropy of the same logistic profile. As
x grows, c_x increases strictly toward 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad
from scipy.special import xlogy

LOG2E = math.log2(math.e)

# Bisection bracket for the continuous lambda solve.
_LAMBDA_LO = 1e-12
_LAMBDA_HI = 1e2
_LAMBDA_MAX_ITER = 200
_INTEGRAL_RTOL = 1e-8

__all__ = [
    "EntropyProfile",
    "ContinuousConstants",
    "binary_entropy",
    "discrete_profile",
    "entropy_upper_bound",
    "continuous_lambda",
    "cx_constant",
]


@dataclass(frozen=True)
class EntropyProfile:
    n: int
    x: float
    c: float
    p: np.ndarray
    H: float


@dataclass(frozen=True)
class ContinuousConstants:
    x: float
    lam: float
    c_x: float


def binary_entropy(p: float) -> float:
    """h(p) = -p*log2(p) - (1-p)*log2(1-p), with the limits h(0) = h(1) = 0."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if p <= 1e-300 or 1.0 - p <= 1e-300:
        return 0.0
    return float(-p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p))


def _logistic_profile(c: float, n: int, members: np.ndarray) -> np.ndarray:
    """p_m = 1/(1 + exp(c*n/m)) evaluated stably for c >= 0."""
    t = c * n / members
    e = np.exp(-t)
    return e / (1.0 + e)


def _entropy_bits(p: np.ndarray) -> float:
    return float(np.sum(-xlogy(p, p) - xlogy(1.0 - p, 1.0 - p)) / math.log(2))


def discrete_profile(n: int, x: float, support=None) -> EntropyProfile:
    """Solve the constrained max-entropy profile on [1, n] (or a subset of it).

    Returns p as a length-n array indexed by m-1; entries off the support are
    zero and contribute nothing to H or to the constraint. The converged
    profile satisfies sum(p_m / m) = x to within 1e-10 relative.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"x must be positive and finite, got {x}")
    if support is None:
        members = np.arange(1, n + 1, dtype=np.float64)
    else:
        members = np.unique(np.asarray(list(support), dtype=np.int64))
        if members.size == 0:
            raise ValueError("support must be nonempty")
        if members[0] < 1 or members[-1] > n:
            raise ValueError("support must lie within [1, n]")
        members = members.astype(np.float64)

    inv = 1.0 / members
    half_mass = 0.5 * float(inv.sum())

    if x >= half_mass:
        c = 0.0
        p_members = np.full(members.size, 0.5)
    else:

        def constraint(c_try: float) -> float:
            return float(np.dot(_logistic_profile(c_try, n, members), inv))

        hi = 1.0
        for _ in range(200):
            if constraint(hi) < x:
                break
            hi *= 2.0
        else:
            raise RuntimeError("failed to bracket the profile constant c")
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if constraint(mid) > x:
                lo = mid
            else:
                hi = mid
        c = 0.5 * (lo + hi)
        p_members = _logistic_profile(c, n, members)
        residual = abs(float(np.dot(p_members, inv)) - x)
        if residual > 1e-10 * x:
            raise RuntimeError(
                f"profile constraint residual {residual:.3e} exceeds 1e-10 relative"
            )

    p = np.zeros(n, dtype=np.float64)
    p[members.astype(np.int64) - 1] = p_members
    return EntropyProfile(n=n, x=x, c=c, p=p, H=_entropy_bits(p_members))


def entropy_upper_bound(n: int, x) -> float:
    """H plus enough slack that 2**bound dominates the true subset count.

    The slack covers the solver residual (dH/dx at the optimum is c*n*log2(e))
    and floating-point summation error in H itself.
    """
    xf = float(Fraction(x)) if not isinstance(x, float) else x
    prof = discrete_profile(n, xf)
    members = np.arange(1, n + 1, dtype=np.float64)
    residual = abs(float(np.dot(prof.p, 1.0 / members)) - xf)
    slack = prof.c * n * LOG2E * residual + n * 1e-14 + 1e-9
    return prof.H + slack


def _lambda_integrand(u: float, lam: float) -> float:
    # 1/(u*(1+exp(lam*u))) written via exp(-lam*u) so large lam*u underflows
    # to zero instead of overflowing.
    t = lam * u
    if t > 745.0:
        return 0.0
    e = math.exp(-t)
    return e / (u * (1.0 + e))


def _lambda_integral(lam: float) -> float:
    """integral_1^inf du/(u*(1+exp(lam*u))), truncated where the tail is tiny.

    The tail beyond U is below exp(-lam*U)/(lam*U), so U is doubled until
    that bound drops under 1e-14 (comfortably below the 1e-12 target).
    """
    upper = 2.0
    while math.exp(-lam * upper) / (lam * upper) > 1e-14:
        upper *= 2.0
        if upper > 1e18:
            break
    breaks = [b for b in (1.0 / lam, 10.0 / lam, 100.0 / lam) if 1.0 < b < upper]
    val, _ = quad(
        _lambda_integrand,
        1.0,
        upper,
        args=(lam,),
        points=breaks or None,
        limit=400,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return float(val)


def continuous_lambda(x: float) -> float:
    """Root of the logistic-mass equation; strictly decreasing in x."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"x must be positive and finite, got {x}")
    lo, hi = _LAMBDA_LO, _LAMBDA_HI
    if _lambda_integral(lo) <= x:
        raise RuntimeError(f"x={x} is outside the solvable bracket [{lo}, {hi}]")
    if _lambda_integral(hi) >= x:
        raise RuntimeError(f"x={x} is outside the solvable bracket [{lo}, {hi}]")
    for _ in range(_LAMBDA_MAX_ITER):
        mid = math.sqrt(lo * hi) if hi / lo > 4.0 else 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _lambda_integral(mid) > x:
            lo = mid
        else:
            hi = mid
        if (hi - lo) < 1e-14 * hi:
            break
    lam = 0.5 * (lo + hi)
    residual = abs(_lambda_integral(lam) - x)
    if residual > _INTEGRAL_RTOL * max(1.0, x):
        raise RuntimeError(f"lambda solve residual {residual:.3e} exceeds tolerance")
    return lam


def _cx_integrand(y: float, lam: float) -> float:
    if y <= 0.0:
        return 0.0
    t = lam / y
    if t > 745.0:
        return 0.0
    p = 1.0 / (1.0 + math.exp(t))
    return binary_entropy(p)


def cx_constant(x: float) -> ContinuousConstants:
    """The exponent constant c_x: entropy of the limiting logistic profile."""
    x = float(x)
    lam = continuous_lambda(x)
    breaks = sorted(
        {b for b in (0.1 * lam, lam, 10.0 * lam, 100.0 * lam, 1000.0 * lam) if 0.0 < b < 1.0}
    )
    val, _ = quad(
        _cx_integrand,
        0.0,
        1.0,
        args=(lam,),
        points=breaks or None,
        limit=400,
        epsabs=1e-12,
        epsrel=1e-12,
    )
    c_x = float(val)
    if not 0.0 < c_x < 1.0:
        raise RuntimeError(f"c_x = {c_x} fell outside (0, 1); lambda = {lam}")
    return ContinuousConstants(x=x, lam=lam, c_x=c_x)
