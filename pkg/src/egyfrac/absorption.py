"""Constructive pipeline assembling an exact representation x = sum 1/a.

Stages, each exact-rational end to end:

1.  Sample a base set A0 from a max-entropy profile restricted to a
    universe of reservoir-free, moderately powersmooth integers, rejecting
    until s(A0) <= (1 - eta) * x, so a slice of mass is held back.
2.  Cancel denominator prime powers of the remainder x0 = x - s(A0) in
    descending order: for the largest prime power q > L dividing den(x_i),
    pick a small set B of cofactors b (coprime to q, each maximal prime
    power of b below q) whose inverse sum hits u * (v/q)^(-1) mod q where
    x_i = u/v. Subtracting sum(1/(q*b)) then removes the prime of q from
    the denominator entirely, and any prime power the cofactors introduce
    is strictly below q, so the sweep terminates.
3.  The final remainder x_f has denominator dividing K = lcm(prime powers
    <= L); finish exactly inside the reserved multiples of K by writing
    K * x_f as a sum of distinct reciprocals from [1, n // K].

Element disjointness across stages is enforced by a shared used-set: the
reservoir never appears in stage 1 or 2, and stage 2 consults the used-set
before taking any multiple.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .entropy import EntropyProfile, discrete_profile
from .exactmath import (
    factor_bounded,
    lcm_range,
    max_prime_power_table,
    prime_powers_in,
    primes_upto,
    reciprocal_sum,
)
from .modular import iter_solutions, make_instance, mod_inverse

__all__ = [
    "AbsorptionConfig",
    "AbsorptionStep",
    "AbsorptionTrace",
    "CancelStepError",
    "build_config",
    "sample_base_set",
    "cancel_prime_powers",
    "reservoir_decompose",
    "construct_representation",
    "verify_representation",
    "trace_to_dict",
    "replay_trace",
]


class CancelStepError(RuntimeError):
    """A denominator prime power could not be cancelled from the remainder."""

    def __init__(self, q: int, message: str):
        super().__init__(message)
        self.q = q


@dataclass(frozen=True, eq=False)
class AbsorptionConfig:
    n: int
    x: Fraction
    L: int
    K: int
    eta: Fraction
    seed: int
    reservoir: frozenset[int]
    universe: tuple[int, ...]
    pools: dict[int, tuple[int, ...]] = field(repr=False)
    primes: tuple[int, ...] = field(repr=False)
    base_profile: EntropyProfile = field(repr=False)
    s_max: int = 12
    max_attempts: int = 50
    alt_limit: int = 10
    pool_margin: int = 24


@dataclass(frozen=True)
class AbsorptionStep:
    q: int
    cofactors: tuple[int, ...]
    x_after: Fraction

    def elements(self) -> tuple[int, ...]:
        return tuple(self.q * b for b in self.cofactors)


@dataclass(frozen=True)
class AbsorptionTrace:
    n: int
    x: Fraction
    seed: int
    attempt: int
    success: bool
    base_set: tuple[int, ...]
    steps: tuple[AbsorptionStep, ...]
    x_f: Fraction | None
    d_indices: tuple[int, ...] | None
    elements: tuple[int, ...]
    reason: str | None = None


def build_config(
    n: int,
    x,
    L: int = 4,
    eta=Fraction(1, 4),
    seed: int = 0,
    s_max: int = 12,
    max_attempts: int = 50,
    alt_limit: int = 10,
    pool_margin: int = 24,
) -> AbsorptionConfig:
    """Precompute the reservoir, sampling universe and per-prime-power pools.

    The universe keeps only m whose maximal prime powers are at most
    max(L, n // pool_margin): every prime power the base set can push into
    the denominator then has at least pool_margin candidate multiples left
    for the cancellation stage. Pools are ordered by descending cofactor
    so the witness search proposes the lightest subsets first; otherwise
    the sweep spends its mass budget on early steps and the small prime
    powers at the tail cannot be cancelled without going negative.
    """
    x = Fraction(x)
    if x <= 0:
        raise ValueError(f"x must be positive, got {x}")
    if L < 2:
        raise ValueError(f"L must be >= 2 so K has at least one prime power, got {L}")
    eta = Fraction(eta)
    if not 0 < eta < 1:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    K = lcm_range(L)
    if n < 4 * K:
        raise ValueError(f"n={n} is too small: need n >= 4*K = {4 * K} for a usable reservoir")

    primes = tuple(primes_upto(n))
    try:
        den_parts = [p**a for p, a in factor_bounded(x.denominator, primes)]
    except ValueError as exc:
        raise ValueError(f"denominator of x={x} has a prime factor above n={n}") from exc
    oversized = [q for q in den_parts if q > n // 2]
    if oversized:
        raise ValueError(
            f"denominator prime power {max(oversized)} of x={x} exceeds n/2 = {n // 2}"
        )

    mppf = max_prime_power_table(n)
    reservoir = frozenset(range(K, n + 1, K))
    t_u = max(L, n // pool_margin)
    universe = tuple(
        m for m in range(1, n + 1) if m not in reservoir and mppf[m] <= t_u
    )
    if not universe:
        raise ValueError("sampling universe is empty; increase n or pool_margin")

    pools: dict[int, tuple[int, ...]] = {}
    for _, q in prime_powers_in(2, n // 2):
        if q <= L:
            continue
        pool = tuple(
            b
            for b in range(n // q, 0, -1)
            if gcd(b, q) == 1 and (q * b) not in reservoir and mppf[b] < q
        )
        pools[q] = pool

    target = (1 - eta) * x
    base_profile = discrete_profile(n, float(target), support=universe)

    return AbsorptionConfig(
        n=n,
        x=x,
        L=L,
        K=K,
        eta=eta,
        seed=int(seed),
        reservoir=reservoir,
        universe=universe,
        pools=pools,
        primes=primes,
        base_profile=base_profile,
        s_max=s_max,
        max_attempts=max_attempts,
        alt_limit=alt_limit,
        pool_margin=pool_margin,
    )


def sample_base_set(config: AbsorptionConfig, attempt: int = 0) -> tuple[int, ...]:
    """Draw A0 from the restricted profile until s(A0) <= (1 - eta) * x.

    The acceptance test is exact rational; the profile mean equals the
    target, so roughly half of all draws pass.
    """
    target = (1 - config.eta) * config.x
    members = np.asarray(config.universe, dtype=np.int64)
    p = config.base_profile.p[members - 1]
    key = np.array([config.seed, attempt], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    for _ in range(200):
        u = rng.random(members.size)
        chosen = members[u < p]
        a0 = tuple(int(v) for v in chosen)
        if reciprocal_sum(a0) <= target:
            return a0
    raise RuntimeError("base-set sampling failed the mass bound 200 times in a row")


def _excess_prime_powers(v: int, primes: Sequence[int], L: int) -> list[int]:
    """Maximal prime powers of v that exceed L, descending."""
    parts = [p**a for p, a in factor_bounded(v, primes)]
    return sorted((q for q in parts if q > L), reverse=True)


def cancel_prime_powers(
    config: AbsorptionConfig, x0: Fraction, used: Iterable[int] | None = None
) -> tuple[list[AbsorptionStep], Fraction]:
    """Sweep denominator prime powers above L out of x0, largest first.

    Each step must keep the remainder positive (a candidate B is rejected
    when s(q*B) >= x_i and the solver is asked for the next witness, up to
    alt_limit of them). Raises CancelStepError when a prime power cannot be
    cancelled; the caller decides whether to resample.
    """
    x_i = Fraction(x0)
    if x_i <= 0:
        raise ValueError(f"x0 must be positive, got {x0}")
    taken = set(used) if used is not None else set()
    steps: list[AbsorptionStep] = []
    prev_q: int | None = None

    while True:
        excess = _excess_prime_powers(x_i.denominator, config.primes, config.L)
        if not excess:
            break
        q = excess[0]
        if prev_q is not None and q >= prev_q:
            raise RuntimeError(f"prime-power sweep failed to descend: {q} after {prev_q}")
        prev_q = q
        if q not in config.pools:
            raise ValueError(
                f"denominator prime power {q} exceeds n/2 = {config.n // 2}; "
                f"no cancellation pool exists"
            )
        u, v = x_i.numerator, x_i.denominator
        w = (v // q) % q
        target = (u * mod_inverse(w, q)) % q
        if target == 0:
            raise RuntimeError(f"cancellation target for q={q} degenerated to zero")

        avail = [b for b in config.pools[q] if (q * b) not in taken]
        instance = make_instance(q, avail, config.s_max)
        chosen = None
        mass = None
        for cand in iter_solutions(instance, target, limit=config.alt_limit):
            cand_mass = sum(Fraction(1, q * b) for b in cand)
            if cand_mass < x_i:
                chosen, mass = cand, cand_mass
                break
        if chosen is None:
            raise CancelStepError(
                q,
                f"no witness for q={q} (target {target}, {len(avail)} candidates) "
                f"kept the remainder positive",
            )

        x_next = x_i - mass
        p_root = _prime_root(q)
        if x_next <= 0 or x_next.denominator % p_root == 0:
            raise RuntimeError(f"cancellation step for q={q} failed to clear prime {p_root}")
        taken.update(q * b for b in chosen)
        steps.append(AbsorptionStep(q=q, cofactors=tuple(chosen), x_after=x_next))
        x_i = x_next

    return steps, x_i


def _prime_root(q: int) -> int:
    for p in (2, 3, 5, 7):
        if q % p == 0:
            return p
    p = 11
    while p * p <= q:
        if q % p == 0:
            return p
        p += 2
    return q


def reservoir_decompose(
    config: AbsorptionConfig,
    x_f: Fraction,
    available: Iterable[int] | None = None,
    node_budget: int = 2_000_000,
) -> tuple[int, ...] | None:
    """Indices D within [1, n // K] with sum(1/d) = K * x_f exactly, or None.

    Branch and bound over indices in increasing order (largest reciprocal
    first): include an index when it fits, prune when the remaining tail
    mass cannot cover the remainder. Greedy-first descent finds typical
    targets quickly; the node budget bounds pathological searches.
    """
    x_f = Fraction(x_f)
    if x_f < 0:
        raise ValueError(f"x_f must be >= 0, got {x_f}")
    goal = x_f * config.K
    if goal.denominator != 1:
        raise ValueError(f"K * x_f = {goal} is not an integer; cancellation is incomplete")
    if goal == 0:
        return ()
    top = config.n // config.K
    avail = sorted(set(available)) if available is not None else list(range(1, top + 1))
    if avail and (avail[0] < 1 or avail[-1] > top):
        raise ValueError(f"available indices must lie in [1, {top}]")
    count = len(avail)
    tails = [Fraction(0)] * (count + 1)
    for i in range(count - 1, -1, -1):
        tails[i] = tails[i + 1] + Fraction(1, avail[i])

    out: list[int] = []
    nodes = 0
    limit_hit = False
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old_limit, count + 200))

    def walk(i: int, rem: Fraction) -> bool:
        nonlocal nodes, limit_hit
        if rem == 0:
            return True
        if i == count or tails[i] < rem:
            return False
        nodes += 1
        if nodes > node_budget:
            limit_hit = True
            return False
        d = avail[i]
        if Fraction(1, d) <= rem:
            out.append(d)
            if walk(i + 1, rem - Fraction(1, d)):
                return True
            out.pop()
            if limit_hit:
                return False
        return walk(i + 1, rem)

    try:
        found = walk(0, Fraction(goal))
    finally:
        sys.setrecursionlimit(old_limit)
    return tuple(out) if found else None


def verify_representation(elements: Iterable[int], n: int, x) -> bool:
    """True iff the elements are distinct, lie in [1, n], and sum to x exactly."""
    x = Fraction(x)
    items = [int(e) for e in elements]
    if len(set(items)) != len(items):
        return False
    if any(e < 1 or e > n for e in items):
        return False
    return reciprocal_sum(items) == x


def construct_representation(
    n: int,
    x,
    L: int = 4,
    eta=Fraction(1, 4),
    seed: int = 0,
    s_max: int = 12,
    max_attempts: int = 50,
    alt_limit: int = 10,
    pool_margin: int = 24,
    deadline: float | None = None,
) -> AbsorptionTrace:
    """Run the full pipeline; resample the base set on failure.

    Returns a successful trace (verified end to end) or, after max_attempts
    failures, a failure trace whose reason names the last obstacle. A
    deadline (time.monotonic value) stops further attempts and reports a
    truncated failure.
    """
    config = build_config(
        n,
        x,
        L=L,
        eta=eta,
        seed=seed,
        s_max=s_max,
        max_attempts=max_attempts,
        alt_limit=alt_limit,
        pool_margin=pool_margin,
    )
    return construct_from_config(config, deadline=deadline)


def construct_from_config(
    config: AbsorptionConfig, deadline: float | None = None
) -> AbsorptionTrace:
    reason = "no attempts made"
    base: tuple[int, ...] = ()
    steps: tuple[AbsorptionStep, ...] = ()
    for attempt in range(config.max_attempts):
        if deadline is not None and time.monotonic() > deadline:
            reason = "budget exhausted before attempt %d" % attempt
            break
        try:
            base = sample_base_set(config, attempt=attempt)
        except RuntimeError as exc:
            reason = str(exc)
            continue
        x0 = config.x - reciprocal_sum(base)
        try:
            step_list, x_f = cancel_prime_powers(config, x0, used=base)
        except CancelStepError as exc:
            reason = str(exc)
            continue
        steps = tuple(step_list)
        used = set(base)
        for step in steps:
            used.update(step.elements())
        d_indices = reservoir_decompose(config, x_f)
        if d_indices is None:
            reason = f"reservoir decomposition failed for K*x_f = {x_f * config.K}"
            continue
        elements = sorted(
            list(base)
            + [e for step in steps for e in step.elements()]
            + [config.K * d for d in d_indices]
        )
        if len(set(elements)) != len(elements):
            reason = "element collision across stages"
            continue
        if not verify_representation(elements, config.n, config.x):
            reason = "final verification failed"
            continue
        return AbsorptionTrace(
            n=config.n,
            x=config.x,
            seed=config.seed,
            attempt=attempt,
            success=True,
            base_set=base,
            steps=steps,
            x_f=x_f,
            d_indices=d_indices,
            elements=tuple(elements),
            reason=None,
        )
    return AbsorptionTrace(
        n=config.n,
        x=config.x,
        seed=config.seed,
        attempt=config.max_attempts,
        success=False,
        base_set=base,
        steps=steps,
        x_f=None,
        d_indices=None,
        elements=(),
        reason=reason,
    )


def _frac_str(f: Fraction | None) -> str | None:
    if f is None:
        return None
    return f"{f.numerator}/{f.denominator}"


def trace_to_dict(trace: AbsorptionTrace) -> dict:
    """JSON-ready form: rationals as "p/q" strings, sets as sorted lists."""
    return {
        "n": trace.n,
        "x": _frac_str(trace.x),
        "base_set": sorted(trace.base_set),
        "steps": [
            {
                "q": step.q,
                "B": sorted(step.cofactors),
                "x_after": _frac_str(step.x_after),
            }
            for step in trace.steps
        ],
        "x_f": _frac_str(trace.x_f),
        "D": sorted(trace.d_indices) if trace.d_indices is not None else None,
        "A": sorted(trace.elements),
        "verified": bool(trace.success),
    }


def replay_trace(data: dict) -> bool:
    """Re-run a trace dict's arithmetic and structure checks exactly.

    Verifies the step chain x_{i+1} = x_i - s(q*B_i), the final remainder,
    the disjoint union structure of A, and the total reciprocal sum.
    """
    x = Fraction(data["x"])
    base = [int(e) for e in data["base_set"]]
    cur = x - reciprocal_sum(base)
    pieces = [set(base)]
    for step in data["steps"]:
        q = int(step["q"])
        elems = [q * int(b) for b in step["B"]]
        cur = cur - reciprocal_sum(elems)
        if cur != Fraction(step["x_after"]):
            return False
        pieces.append(set(elems))
    if data["x_f"] is None or Fraction(data["x_f"]) != cur:
        return False
    claimed = set(int(e) for e in data["A"])
    staged = set().union(*pieces) if pieces else set()
    leftover = sorted(claimed - staged)
    d_sorted = sorted(int(d) for d in (data["D"] or []))
    if len(leftover) != len(d_sorted):
        return False
    if d_sorted:
        if leftover[0] % d_sorted[0] != 0:
            return False
        k = leftover[0] // d_sorted[0]
        if [k * d for d in d_sorted] != leftover:
            return False
        if cur != reciprocal_sum(leftover):
            return False
    elif cur != 0:
        return False
    if sum(len(p) for p in pieces) + len(leftover) != len(claimed):
        return False
    return verify_representation(claimed, int(data["n"]), x)
