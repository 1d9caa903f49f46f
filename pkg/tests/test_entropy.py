"""Entropy profile tests.

The continuous integrals get an independent composite-Simpson oracle; the
discrete solver is checked against its defining constraint, against a
first-order optimality (exchange) argument, and against the continuous
limit at large n.
"""

import math
import random

import numpy as np
import pytest

from egyfrac.counting import MODE_AT_MOST, CountQuery, count_mitm
from egyfrac.entropy import (
    _lambda_integral,
    binary_entropy,
    continuous_lambda,
    cx_constant,
    discrete_profile,
    entropy_upper_bound,
)

# Frozen reference values, computed twice by independent quadrature routes.
LAMBDA_1 = 0.1271909151247070
C_1 = 0.9111665894411178


def simpson_mass_integral(lam, n_pts=2**21):
    """integral_1^inf du/(u*(1+exp(lam*u))) by composite Simpson."""
    upper = 2.0
    while math.exp(-lam * upper) / (lam * upper) > 1e-16:
        upper *= 2.0
    u = np.linspace(1.0, upper, n_pts + 1)
    t = np.minimum(lam * u, 745.0)
    e = np.exp(-t)
    f = e / (u * (1.0 + e))
    h = (upper - 1.0) / n_pts
    w = np.ones(n_pts + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((f * w).sum() * h / 3.0)


def simpson_entropy_integral(lam, n_pts=2**20):
    """integral_0^1 h(1/(1+exp(lam/y))) dy by composite Simpson."""
    y = np.linspace(1e-12, 1.0, n_pts + 1)
    t = np.minimum(lam / y, 745.0)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        p = 1.0 / (1.0 + np.exp(t))
        h = -p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p)
    h = np.nan_to_num(h)
    w = np.ones(n_pts + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    step = (1.0 - 1e-12) / n_pts
    return float((h * w).sum() * step / 3.0)


def test_binary_entropy_values():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.25) == pytest.approx(0.8112781244591328, abs=1e-15)
    for p in (0.01, 0.2, 0.37):
        assert binary_entropy(p) == pytest.approx(binary_entropy(1.0 - p), abs=1e-12)
    with pytest.raises(ValueError):
        binary_entropy(-0.1)
    with pytest.raises(ValueError):
        binary_entropy(1.1)


@pytest.mark.parametrize("n,x", [(1, 0.4), (5, 0.8), (30, 1.0), (200, 1.5), (1000, 0.25)])
def test_profile_meets_constraint(n, x):
    prof = discrete_profile(n, x)
    mean = float(np.dot(prof.p, 1.0 / np.arange(1, n + 1)))
    assert mean == pytest.approx(x, rel=1e-9)
    assert prof.c > 0.0
    # tiny m can underflow to exactly zero once c*n/m overflows exp
    assert np.all(prof.p >= 0.0)
    assert prof.p[-1] > 0.0
    assert np.all(prof.p < 0.5)
    # p_m = 1/(1+exp(c*n/m)) grows with m
    assert np.all(np.diff(prof.p) >= 0.0)
    if n > 1:
        assert prof.p[-1] > prof.p[0]


def test_profile_saturates_at_half_mass():
    # H(10)/2 is about 1.464, so x = 1.5 lands in the unconstrained regime
    prof = discrete_profile(10, 1.5)
    assert prof.c == 0.0
    assert np.all(prof.p == 0.5)
    assert prof.H == pytest.approx(10.0, abs=1e-9)


def test_profile_entropy_matches_direct_sum():
    for n, x in ((7, 0.9), (40, 1.2), (150, 0.5)):
        prof = discrete_profile(n, x)
        direct = sum(binary_entropy(float(pm)) for pm in prof.p)
        assert prof.H == pytest.approx(direct, rel=1e-12)


def test_profile_is_entropy_optimal_under_exchange():
    """Moving constraint mass between two coordinates cannot raise H."""
    prof = discrete_profile(25, 1.0)
    p = prof.p.copy()
    base = sum(binary_entropy(float(v)) for v in p)
    rng = random.Random(5)
    for _ in range(40):
        i, j = rng.sample(range(25), 2)
        delta = rng.uniform(-1.0, 1.0) * 0.05
        qi = p[i] + delta * (i + 1)
        qj = p[j] - delta * (j + 1)
        if not (0.0 <= qi <= 1.0 and 0.0 <= qj <= 1.0):
            continue
        q = p.copy()
        q[i], q[j] = qi, qj
        perturbed = sum(binary_entropy(float(v)) for v in q)
        assert perturbed <= base + 1e-9


def test_profile_restricted_support():
    support = [2, 4, 6, 9]
    prof = discrete_profile(10, 0.3, support=support)
    off = [m for m in range(1, 11) if m not in support]
    assert all(prof.p[m - 1] == 0.0 for m in off)
    mean = sum(prof.p[m - 1] / m for m in support)
    assert mean == pytest.approx(0.3, rel=1e-9)
    direct = sum(binary_entropy(float(prof.p[m - 1])) for m in support)
    assert prof.H == pytest.approx(direct, rel=1e-12)


def test_profile_validation():
    with pytest.raises(ValueError):
        discrete_profile(0, 1.0)
    with pytest.raises(ValueError):
        discrete_profile(5, 0.0)
    with pytest.raises(ValueError):
        discrete_profile(5, float("nan"))
    with pytest.raises(ValueError):
        discrete_profile(5, 1.0, support=[])
    with pytest.raises(ValueError):
        discrete_profile(5, 1.0, support=[0, 2])
    with pytest.raises(ValueError):
        discrete_profile(5, 1.0, support=[2, 7])


def test_upper_bound_dominates_exact_counts():
    for n, x in ((10, 1.0), (16, 0.5), (22, 1.5)):
        count = count_mitm(CountQuery(n, x, MODE_AT_MOST)).count
        bound = entropy_upper_bound(n, x)
        assert math.log2(count) <= bound
        assert bound >= discrete_profile(n, x).H


def test_mass_integral_against_simpson():
    for lam in (0.1, 0.5, 1.0, 5.0):
        assert _lambda_integral(lam) == pytest.approx(
            simpson_mass_integral(lam), abs=1e-12
        )


def test_continuous_lambda_reference_value():
    lam = continuous_lambda(1.0)
    assert lam == pytest.approx(LAMBDA_1, abs=1e-9)
    assert _lambda_integral(lam) == pytest.approx(1.0, abs=1e-8)


def test_continuous_lambda_monotone_in_x():
    xs = (0.25, 0.5, 1.0, 2.0, 4.0)
    lams = [continuous_lambda(x) for x in xs]
    assert all(a > b for a, b in zip(lams, lams[1:]))
    for x, lam in zip(xs, lams):
        assert _lambda_integral(lam) == pytest.approx(x, abs=1e-8)


def test_continuous_lambda_rejects_unreachable_x():
    with pytest.raises(ValueError):
        continuous_lambda(0.0)
    with pytest.raises(RuntimeError, match="bracket"):
        continuous_lambda(1e6)


def test_cx_reference_value():
    consts = cx_constant(1.0)
    assert consts.c_x == pytest.approx(C_1, abs=1e-6)
    assert consts.c_x == pytest.approx(0.91117, abs=1e-4)
    assert consts.lam == pytest.approx(LAMBDA_1, abs=1e-9)


def test_cx_against_simpson():
    for x in (0.5, 1.0, 2.0):
        consts = cx_constant(x)
        oracle = simpson_entropy_integral(consts.lam)
        assert consts.c_x == pytest.approx(oracle, abs=1e-9)


def test_cx_strictly_increasing_toward_one():
    xs = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0)
    vals = [cx_constant(x).c_x for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert all(0.0 < v < 1.0 for v in vals)


def test_discrete_profile_converges_to_continuous():
    prof = discrete_profile(50_000, 1.0)
    assert prof.c == pytest.approx(LAMBDA_1, abs=1e-4)
    assert prof.H / prof.n == pytest.approx(C_1, abs=1e-3)
