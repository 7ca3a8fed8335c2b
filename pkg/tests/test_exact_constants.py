import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from martbounds.exact_constants import (
    B_1980,
    B_2m_sym,
    burkholder_C,
    burkholder_objective,
    family_1980,
    gamma_growth_check,
    gamma_jm,
    partitions_into,
    rademacher_even_moment_exact,
    rademacher_moment,
    sym_poisson_moment,
    sym_poisson_moment_cumulant,
    sym_poisson_moment_formula,
    two_point_even_moment,
    uv_conditions,
)
from martbounds.moment_bounds import BoundQuery, check_B


def brute_rademacher(n, m):
    """E(eps_1 + ... + eps_n)^{2m} over all sign patterns, as an exact integer."""
    total = sum(sum(s) ** (2 * m) for s in itertools.product((-1, 1), repeat=n))
    assert total % 2**n == 0
    return total // 2**n


def set_partition_count(j, m):
    """Number of ways to split 2m labelled points into j unordered even blocks (recursive oracle)."""

    def count(points, blocks):
        if points == 0:
            return 1 if blocks == 0 else 0
        if blocks == 0:
            return 0
        # the block holding the first point takes it plus an odd number of others
        return sum(math.comb(points - 1, size - 1) * count(points - size, blocks - 1)
                   for size in range(2, points + 1, 2))

    return count(2 * m, j)


@pytest.mark.parametrize("j, m, value", [(1, 1, 1), (1, 2, 1), (2, 2, 3), (2, 3, 15), (3, 3, 15)])
def test_gamma_examples(j, m, value):
    g = gamma_jm(j, m)
    assert g.value == value and isinstance(g.value, Fraction)


@pytest.mark.parametrize("m", range(1, 13))
def test_gamma_edge_identities(m):
    assert gamma_jm(1, m).value == 1
    assert gamma_jm(m, m).value == Fraction(math.factorial(2 * m), math.factorial(m) * 2**m)


@pytest.mark.parametrize("m", range(1, 9))
def test_gamma_counts_even_set_partitions(m):
    for j in range(1, m + 1):
        assert gamma_jm(j, m).value == set_partition_count(j, m)


def test_gamma_egf():
    # sum_j Gamma_{j,m} y^j / (2m)! is the x^{2m} coefficient of exp(y (cosh x - 1)); check at y = 1
    bell_even = [1, 1, 4, 31, 379, 6556]  # number of partitions of [2m] into even blocks
    for m in range(1, 6):
        assert sum(gamma_jm(j, m).value for j in range(1, m + 1)) == bell_even[m]


def test_gamma_domain():
    for j, m in [(0, 2), (3, 2)]:
        with pytest.raises(ValueError):
            gamma_jm(j, m)
    with pytest.raises(TypeError):
        gamma_jm(1.5, 2)


def test_partitions_are_exact_and_distinct():
    for m in range(1, 12):
        for j in range(1, m + 1):
            parts = list(partitions_into(m, j))
            for part in parts:
                sizes = [s for s, _ in part]
                assert sizes == sorted(set(sizes), reverse=True)
                assert sum(s * k for s, k in part) == m and sum(k for _, k in part) == j
            assert len(parts) == len(set(parts))


def test_gamma_independent_of_enumeration_order():
    for m in range(2, 10):
        for j in range(1, m + 1):
            parts = list(partitions_into(m, j))
            random.Random(m * 31 + j).shuffle(parts)
            total = Fraction(0)
            for part in parts:
                denom = 1
                for size, mult in part:
                    denom *= math.factorial(mult) * math.factorial(2 * size) ** mult
                total += Fraction(1, denom)
            assert total * math.factorial(2 * m) == gamma_jm(j, m).value


def test_gamma_large_m_not_memoized_still_exact():
    assert gamma_jm(1, 70).value == 1


def test_growth_examples():
    assert gamma_growth_check(1, 7) == pytest.approx(1.0, rel=1e-15)
    assert gamma_growth_check(2, 2) == pytest.approx(3**0.25 / 2**0.5, rel=1e-14)
    assert gamma_growth_check(2, 2) == pytest.approx(0.9306, abs=1e-4)


def test_growth_window():
    ratios = [gamma_growth_check(j, m) for m in range(1, 31) for j in range(1, m + 1)]
    assert 0.25 <= min(ratios) and max(ratios) <= 4


@pytest.mark.parametrize("n", range(1, 13))
@pytest.mark.parametrize("m", range(1, 7))
def test_rademacher_matches_brute_force(n, m):
    assert rademacher_even_moment_exact(n, m) == brute_rademacher(n, m)


def test_rademacher_examples():
    assert rademacher_moment(1, 5) == pytest.approx(1.0)
    assert rademacher_moment(2, 2) == pytest.approx(8**0.25)
    assert rademacher_moment(3, 3) == pytest.approx(183 ** (1 / 6))
    assert rademacher_moment(3, 3, u=2.0) == pytest.approx(2 * 183 ** (1 / 6))


@pytest.mark.parametrize("n", [13, 25, 40])
@pytest.mark.parametrize("m", [1, 4, 8])
def test_rademacher_matches_binomial_sum(n, m):
    exact = sum(math.comb(n, b) * (2 * b - n) ** (2 * m) for b in range(n + 1))
    assert rademacher_even_moment_exact(n, m) * 2**n == exact


def test_two_point_moment_reduces_to_rademacher():
    assert two_point_even_moment(5, 3, 1.0) == pytest.approx(rademacher_even_moment_exact(5, 3), rel=1e-14)


def test_two_point_moment_brute_force():
    n, m, q, u = 4, 3, 0.3, 1.7
    law = {u: q / 2, -u: q / 2, 0.0: 1 - q}
    total = 0.0
    for path in itertools.product(law, repeat=n):
        total += math.prod(law[x] for x in path) * sum(path) ** (2 * m)
    assert two_point_even_moment(n, m, q, u) == pytest.approx(total, rel=1e-12)


def test_B2m_sym_examples():
    assert B_2m_sym(1, 1, 2) == pytest.approx(2**0.5, rel=1e-15)
    assert B_2m_sym(3, 5, 1) == 5
    with pytest.raises(ValueError):
        B_2m_sym(0, 1, 2)


@given(b1=st.floats(0.1, 10), b2=st.floats(0.1, 10), m=st.integers(2, 6), f=st.floats(1.01, 3))
def test_B2m_sym_increasing(b1, b2, m, f):
    base = B_2m_sym(b1, b2, m)
    assert B_2m_sym(b1 * f, b2, m) > base
    assert B_2m_sym(b1, b2 * f, m) > base


def test_sym_poisson_examples():
    assert sym_poisson_moment(3.0, 2.0, 1) == pytest.approx(math.sqrt(3) * 2, rel=1e-14)
    assert sym_poisson_moment(1.0, 1.0, 2) == pytest.approx(4**0.25, rel=1e-14)
    assert sym_poisson_moment_cumulant(2.0, 1.0, 3) == pytest.approx(sym_poisson_moment_formula(2.0, 1.0, 3),
                                                                    rel=1e-10)


def test_sym_poisson_against_skellam():
    from scipy.stats import skellam

    t, m = 1.7, 3
    k = np.arange(-80, 81)
    direct = float(np.sum(skellam.pmf(k, t / 2, t / 2) * k.astype(float) ** (2 * m))) ** (1 / (2 * m))
    assert sym_poisson_moment(t, 1.0, m) == pytest.approx(direct, rel=1e-10)


@pytest.mark.parametrize("p", [1, 2, 4, 8])
def test_burkholder_bracket(p):
    c1, c2 = burkholder_C(1, p), burkholder_C(2, p)
    assert p / 4 < c1.value <= c2.value <= 12 * math.e * p


def test_burkholder_argmin_is_feasible_and_consistent():
    c = burkholder_C(2, 4)
    beta, delta = c.argmin
    assert burkholder_objective(2, 4, beta, delta) == pytest.approx(c.value, rel=1e-9)


def test_burkholder_witness_point():
    # delta = 1/(4p), beta = 1 + 1/p keeps the constraint below 2/3
    for p in [1, 2, 4, 16, 64]:
        delta, beta = 1 / (4 * p), 1 + 1 / p
        w = 2 * beta**p * delta**2 / (beta - 1 - delta) ** 2
        assert w < 2 / 3
        assert burkholder_C(2, p).value <= burkholder_objective(2, p, beta, delta)


def test_burkholder_against_dense_grid():
    p = 3.0
    best = math.inf
    for beta in np.linspace(1.01, 4, 600):
        for delta in np.linspace(1e-3, beta - 1 - 1e-3, 200):
            best = min(best, burkholder_objective(1, p, beta, delta))
    assert burkholder_C(1, p).value <= best * (1 + 1e-9)
    assert burkholder_C(1, p).value >= best * (1 - 1e-2)


def test_burkholder_domain():
    with pytest.raises(ValueError):
        burkholder_C(3, 4)
    with pytest.raises(ValueError):
        burkholder_C(1, 0.5)


def test_family_validation_p6():
    pt = family_1980(6, 1, 1)
    conds = uv_conditions(pt)
    assert set(conds) == {6, 4, 2}
    for s, row in conds.items():
        if s > 2:
            assert row["u"] >= 1 and row["v"] >= 1
        if s > 3:
            assert row["power_sum"] <= 1


def test_family_example_p4():
    v = B_1980(4, 1, 1)
    assert math.isfinite(v) and v > 0
    assert v >= check_B(BoundQuery(4, 1, 1))[0]


def test_family_refinement_only_lowers():
    for p, q in [(2.5, 0.1), (4, 1), (7, 3), (16, 0.01)]:
        assert B_1980(p, 1, q, refine=True) <= B_1980(p, 1, q) * (1 + 1e-12)


def test_family_small_a2_limit():
    # with optimized weights and p not even, the a_2 terms vanish as a_2 -> 0
    p = 5.0
    vals = []
    for a2 in [1e-4, 1e-8, 1e-12]:
        pt = family_1980(p, 1.0, a2, refine=True)
        vals.append(pt.value / pt.c1 ** (1 / p))
    assert vals[-1] == pytest.approx(1.0, rel=1e-3)
    assert abs(vals[-1] - 1) <= abs(vals[0] - 1)


def test_family_domain():
    with pytest.raises(ValueError):
        family_1980(2.0, 1, 1)
    with pytest.raises(ValueError):
        family_1980(3.0, 0, 1)
