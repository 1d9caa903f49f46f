"""Exact rational arithmetic over unit fractions, plus prime-power sieves.

Everything in this module is integer-exact. Reciprocal sums are held as
`fractions.Fraction` values so that equality against a target is a true
equality, never a tolerance check. The sieve side provides smallest-prime-
factor factorization and the powersmooth predicate: m is t-powersmooth when
every maximal prime power p**a dividing m is at most t.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, log
from typing import Iterable, Sequence

import numpy as np

# Exact rationals are stdlib fractions: normalized num/den, den >= 1, gcd 1.
Rational = Fraction

__all__ = [
    "Rational",
    "FactorSieve",
    "reciprocal_sum",
    "harmonic",
    "lcm_range",
    "max_prime_power_factor",
    "is_powersmooth",
    "powersmooth_count",
    "max_prime_power_table",
    "prime_powers_in",
    "smooth_density_linear",
    "factor_bounded",
    "primes_upto",
]


def _check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return value


def reciprocal_sum(elements: Iterable[int]) -> Fraction:
    """Exact sum of 1/m over distinct positive integers m."""
    items = [_check_positive_int(m, "element") for m in elements]
    if len(set(items)) != len(items):
        raise ValueError("elements must be distinct")
    total = Fraction(0)
    for m in items:
        total += Fraction(1, m)
    return total


def harmonic(n: int) -> Fraction:
    """H(n) = 1 + 1/2 + ... + 1/n, exactly.

    Balanced merging keeps intermediate denominators small, which is much
    faster than a left fold once n reaches the thousands.
    """
    n = _check_positive_int(n, "n")

    def merge(lo: int, hi: int) -> Fraction:
        if lo == hi:
            return Fraction(1, lo)
        mid = (lo + hi) // 2
        return merge(lo, mid) + merge(mid + 1, hi)

    return merge(1, n)


def primes_upto(n: int) -> list[int]:
    """All primes <= n via a plain byte sieve."""
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for p in range(2, isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return [i for i in range(2, n + 1) if flags[i]]


def lcm_range(n: int) -> int:
    """lcm(1, 2, ..., n): the product of the maximal prime powers <= n."""
    n = _check_positive_int(n, "n")
    out = 1
    for p in primes_upto(n):
        pk = p
        while pk * p <= n:
            pk *= p
        out *= pk
    return out


class FactorSieve:
    """Smallest-prime-factor table supporting factorization up to `limit`."""

    def __init__(self, limit: int):
        if limit < 2:
            raise ValueError(f"sieve limit must be >= 2, got {limit}")
        self.limit = int(limit)
        spf = np.arange(self.limit + 1, dtype=np.int64)
        for p in range(2, isqrt(self.limit) + 1):
            if spf[p] == p:
                block = spf[p * p :: p]
                np.minimum(block, p, out=block)
        self.spf = spf

    def smallest_prime_factor(self, m: int) -> int:
        if not 2 <= m <= self.limit:
            raise ValueError(f"m must be in [2, {self.limit}], got {m}")
        return int(self.spf[m])

    def factor(self, m: int) -> list[tuple[int, int]]:
        """Prime factorization [(p, a), ...] with p ascending; [] for m = 1."""
        if not 1 <= m <= self.limit:
            raise ValueError(f"m must be in [1, {self.limit}], got {m}")
        out = []
        m = int(m)
        while m > 1:
            p = int(self.spf[m])
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            out.append((p, a))
        return out

    def prime_power_parts(self, m: int) -> list[int]:
        """Maximal prime-power divisors p**a of m, ascending by prime."""
        return [p**a for p, a in self.factor(m)]

    def primes(self) -> list[int]:
        idx = np.arange(2, self.limit + 1)
        return [int(p) for p in idx[self.spf[2:] == idx]]


def _trial_division_parts(m: int) -> list[int]:
    parts = []
    rem = m
    p = 2
    while p * p <= rem:
        if rem % p == 0:
            pk = 1
            while rem % p == 0:
                rem //= p
                pk *= p
            parts.append(pk)
        p += 1 if p == 2 else 2
    if rem > 1:
        parts.append(rem)
    return parts


def max_prime_power_factor(m: int, sieve: FactorSieve | None = None) -> int:
    """Largest maximal prime-power divisor of m. By convention 1 for m = 1."""
    m = _check_positive_int(m, "m")
    if m == 1:
        return 1
    if sieve is not None and m <= sieve.limit:
        return max(sieve.prime_power_parts(m))
    return max(_trial_division_parts(m))


def is_powersmooth(m: int, t: int, sieve: FactorSieve | None = None) -> bool:
    """True iff every maximal prime power dividing m is at most t."""
    t = _check_positive_int(t, "t")
    return max_prime_power_factor(m, sieve) <= t


def max_prime_power_table(n: int) -> np.ndarray:
    """Array a with a[m] = max_prime_power_factor(m) for 0 <= m <= n (a[0] = 0).

    Built by marking every multiple of every prime power pk <= n with pk and
    keeping a running maximum. For m with p-part p**a the marks p, p**2, ...,
    p**a arrive in increasing order, so the final value is the true maximum
    over the maximal prime-power divisors.
    """
    n = _check_positive_int(n, "n")
    table = np.ones(n + 1, dtype=np.int64)
    table[0] = 0
    for p in primes_upto(n):
        pk = p
        while pk <= n:
            block = table[pk::pk]
            np.maximum(block, pk, out=block)
            pk *= p
    return table


def powersmooth_count(n: int, t: int) -> int:
    """How many m in [1, n] are t-powersmooth."""
    n = _check_positive_int(n, "n")
    t = _check_positive_int(t, "t")
    table = max_prime_power_table(n)
    return int(np.count_nonzero(table[1:] <= t))


def prime_powers_in(lo: int, hi: int) -> list[tuple[int, int]]:
    """All (p, p**a) with lo <= p**a <= hi, sorted descending by the power."""
    if lo < 2:
        raise ValueError(f"lo must be >= 2, got {lo}")
    if hi < lo:
        raise ValueError(f"need lo <= hi, got [{lo}, {hi}]")
    out = []
    for p in primes_upto(hi):
        pk = p
        while pk <= hi:
            if pk >= lo:
                out.append((p, pk))
            pk *= p
    out.sort(key=lambda pair: (-pair[1], pair[0]))
    return out


def smooth_density_linear(u: float) -> float:
    """Density of n**u-powersmooth integers for 1/2 < u <= 1.

    In this range an integer can carry at most one maximal prime power above
    n**u, so inclusion-exclusion collapses to a single logarithm: the density
    is 1 + ln(u).
    """
    u = float(u)
    if not 0.5 < u <= 1.0:
        raise ValueError(f"u must lie in (1/2, 1], got {u}")
    return 1.0 + log(u)


def factor_bounded(v: int, primes: Sequence[int]) -> list[tuple[int, int]]:
    """Factor v over the supplied primes; error if anything is left over.

    Intended for large integers known to be smooth with respect to `primes`
    (for example denominators of reciprocal sums over [1, n]).
    """
    if v < 1:
        raise ValueError(f"v must be >= 1, got {v}")
    out = []
    rem = v
    for p in primes:
        if rem == 1:
            break
        if rem % p == 0:
            a = 0
            while rem % p == 0:
                rem //= p
                a += 1
            out.append((p, a))
    if rem != 1:
        raise ValueError(f"v has a prime factor outside the supplied table (left {rem})")
    return out
