"""Exact counting of reciprocal-sum representations inside [1, n].

Two independent routes are kept deliberately separate so they can serve as
oracles for each other:

* count_brute walks the subset tree with Fraction partial sums, and
* count_mitm scales everything by lcm(1..n) and meets in the middle over
  integer subset sums.

Both count subsets A of {1..n} with sum of 1/a equal to x (mode "exact") or
at most x (mode "atmost", boundary ties included).
"""

from __future__ import annotations

import time
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .exactmath import lcm_range

MODE_EXACT = "exact"
MODE_AT_MOST = "atmost"

BRUTE_CAP = 25
MITM_CAP = 48
ENUM_CAP = 40

__all__ = [
    "MODE_EXACT",
    "MODE_AT_MOST",
    "BRUTE_CAP",
    "MITM_CAP",
    "ENUM_CAP",
    "CountQuery",
    "CountResult",
    "count_brute",
    "count_mitm",
    "enumerate_representations",
]


@dataclass(frozen=True)
class CountQuery:
    n: int
    x: Fraction
    mode: str

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        object.__setattr__(self, "x", Fraction(self.x))
        if self.x <= 0:
            raise ValueError(f"x must be positive, got {self.x}")
        if self.mode not in (MODE_EXACT, MODE_AT_MOST):
            raise ValueError(f"mode must be {MODE_EXACT!r} or {MODE_AT_MOST!r}, got {self.mode!r}")


@dataclass(frozen=True)
class CountResult:
    query: CountQuery
    count: int
    method: str
    elapsed: float


def count_brute(query: CountQuery, cap: int = BRUTE_CAP) -> CountResult:
    """Count by exhaustive traversal of the subset tree with exact sums.

    Two exact shortcuts keep the traversal honest but affordable: a branch
    whose partial sum already exceeds x is dead (reciprocals only add), and
    in mode "atmost" a branch whose partial sum plus the whole remaining
    tail stays within x contributes a full 2**k block.
    """
    if query.n > cap:
        raise ValueError(
            f"count_brute refuses n={query.n}: cap is {cap} (2**n subsets); "
            f"pass cap explicitly to override"
        )
    start = time.perf_counter()
    n, x, mode = query.n, query.x, query.mode
    rec = [Fraction(1, m) for m in range(1, n + 1)]
    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + rec[i]
    at_most = mode == MODE_AT_MOST

    def walk(i: int, s: Fraction) -> int:
        if s > x:
            return 0
        rest = suffix[i]
        if at_most:
            if s + rest <= x:
                return 1 << (n - i)
        else:
            total = s + rest
            if total < x:
                return 0
            if total == x:
                return 1
        if i == n:
            return 1 if at_most or s == x else 0
        return walk(i + 1, s + rec[i]) + walk(i + 1, s)

    count = walk(0, Fraction(0))
    return CountResult(query, count, "brute", time.perf_counter() - start)


def _subset_sums(weights: list[int]) -> list[int]:
    sums = [0]
    for w in weights:
        sums += [s + w for s in sums]
    return sums


def count_mitm(query: CountQuery, cap: int = MITM_CAP) -> CountResult:
    """Meet-in-the-middle count over reciprocals scaled to integers.

    With L = lcm(1..n) every subset sum becomes an integer k/L, so mode
    "exact" is a hash join between the two halves of [1, n] and mode
    "atmost" is a prefix count against the sorted right half. Python
    integers keep the scaled sums exact at any n the cap allows.
    """
    if query.n > cap:
        raise ValueError(
            f"count_mitm refuses n={query.n}: cap is {cap} (2**(n/2) half sums); "
            f"pass cap explicitly to override"
        )
    start = time.perf_counter()
    n, x, mode = query.n, query.x, query.mode
    scale = lcm_range(n)
    weights = [scale // m for m in range(1, n + 1)]
    half = n // 2
    left = _subset_sums(weights[:half])
    right = _subset_sums(weights[half:])

    if mode == MODE_EXACT:
        scaled = x * scale
        if scaled.denominator != 1:
            count = 0
        else:
            target = scaled.numerator
            table = Counter(right)
            count = sum(table[target - s] for s in left if target - s in table)
    else:
        threshold = (x.numerator * scale) // x.denominator
        right.sort()
        count = 0
        for s in left:
            count += bisect_right(right, threshold - s)
    return CountResult(query, count, "mitm", time.perf_counter() - start)


def enumerate_representations(
    n: int, x: Fraction, limit: int, cap: int = ENUM_CAP
) -> list[tuple[int, ...]]:
    """Up to `limit` subsets of [1, n] with reciprocal sum exactly x.

    Results come out in lexicographic order of the sorted element tuples.
    Pruning is exact: a branch dies when its partial sum exceeds x or when
    even taking the whole tail cannot reach x.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > cap:
        raise ValueError(f"enumerate_representations refuses n={n}: cap is {cap}")
    if limit < 0:
        raise ValueError(f"limit must be >= 0, got {limit}")
    x = Fraction(x)
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    rec = [Fraction(1, m) for m in range(1, n + 1)]
    suffix = [Fraction(0)] * (n + 2)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + rec[i]
    out: list[tuple[int, ...]] = []

    def walk(start: int, s: Fraction, chosen: list[int]) -> None:
        if len(out) >= limit:
            return
        if s == x:
            out.append(tuple(chosen))
            return
        for m in range(start, n + 1):
            ns = s + rec[m - 1]
            if ns > x:
                continue
            if ns + suffix[m] < x:
                break
            chosen.append(m)
            walk(m + 1, ns, chosen)
            chosen.pop()
            if len(out) >= limit:
                return

    if limit > 0:
        walk(1, Fraction(0), [])
    return out
