import itertools
import math

import numpy as np
import pytest

from martbounds.constructions import (
    INFINITE,
    TwoPointIncrement,
    build_extremal,
    build_rademacher,
    even_moment_interpolation,
    exact_sum_norm,
    lattice_pmf,
    limit_construction,
    log_g,
    rademacher_s_norm,
    rademacher_sum_norm,
    solve_t,
    sym_moment_floor,
)
from martbounds.exact_constants import rademacher_moment, sym_poisson_moment, two_point_even_moment
from martbounds.moment_bounds import chung_bound


def bisect(f, lo, hi, iters=200):
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_t_infinite_example():
    t = solve_t(4, 1.0, INFINITE)
    oracle = bisect(lambda t: 1 - math.exp(-t) - t * t, 0.1, 1.0)
    assert t == pytest.approx(oracle, rel=1e-12)
    assert t == pytest.approx(0.7146, abs=1e-3)


@pytest.mark.parametrize("n", [None, math.inf, "inf"])
def test_infinite_aliases(n):
    assert solve_t(4, 1.0, n) == solve_t(4, 1.0, INFINITE)


def test_g_is_decreasing():
    ts = np.linspace(0.01, 9.9, 100)
    vals = [log_g(3.0, t, 10) for t in ts]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_large_target_gives_small_t():
    ts = [solve_t(4, target, 50) for target in (1e2, 1e4, 1e8)]
    assert ts[0] > ts[1] > ts[2] > 0
    assert ts[2] < 1e-3


def test_precondition():
    with pytest.raises(ValueError):
        solve_t(4, 1.0, 1)
    with pytest.raises(ValueError):
        solve_t(2.0, 1.0, 10)
    with pytest.raises(ValueError):
        build_extremal(4, 1.0, 3.0, 9)


def test_monotone_ladder():
    ts = [solve_t(5.0, 0.5, 2**k) for k in range(1, 21)]
    assert all(b < a for a, b in zip(ts, ts[1:]))
    assert ts[-1] - solve_t(5.0, 0.5, INFINITE) < 1e-6


@pytest.mark.parametrize("p", [2.5, 4.0, 9.0])
@pytest.mark.parametrize("ratio", [0.05, 0.5, 1.0, 3.0, 20.0])
@pytest.mark.parametrize("n", [500, 1000, 10**4, 10**6])
def test_construction_identities(p, ratio, n):
    s = build_extremal(p, 1.0, ratio, n)
    q, u = s.increment.q, s.increment.u
    assert n * q * u**2 == pytest.approx(ratio**2, rel=1e-9)
    hit = -math.expm1(n * math.log1p(-q))
    assert u**p * hit == pytest.approx(1.0, rel=1e-9)
    assert s.d_star_norm() == pytest.approx(1.0, rel=1e-9)
    assert s.s2_norm() == pytest.approx(ratio, rel=1e-9)


def test_example_p4_n100():
    s = build_extremal(4, 1, 1, 100)
    assert 100 * s.increment.q * s.u**2 == pytest.approx(1, rel=1e-9)
    assert s.u**4 * (1 - (1 - s.increment.q) ** 100) == pytest.approx(1, rel=1e-9)


def test_dense_regime():
    n = 50
    s = build_extremal(4, 1.0, 7.0, n)  # a_2^2 / a_p^2 = 49, just below n
    assert s.increment.q > 0.9
    assert s.u == pytest.approx(7.0 / math.sqrt(s.t))


def test_limit_example():
    lim = limit_construction(4, 1, 1)
    assert lim.t == pytest.approx(0.7146, abs=1e-3)
    assert lim.u == pytest.approx(1.183, abs=1e-3)


def test_limit_heavy_jump():
    small = limit_construction(4, 100.0, 1.0)
    assert small.t < 1e-6 and small.u > 100


@pytest.mark.parametrize("p, m", [(4.5, 2), (4.0, 2), (7.0, 3), (12.0, 6), (12.0, 2), (12.0, 1)])
def test_sym_moment_floor_when_a2_small(p, m):
    for ratio in (0.01, 0.1, 1.0):
        lhs, rhs = sym_moment_floor(p, 1.0, ratio, m)
        assert lhs >= rhs * (1 - 1e-12)


@pytest.mark.parametrize("p", [4.5, 7.0, 12.0])
def test_sym_moment_floor_top_order(p):
    m = int(p // 2)
    for ratio in (0.1, 1.0, 5.0, 40.0):
        lhs, rhs = sym_moment_floor(p, 1.0, ratio, m)
        assert lhs >= rhs * (1 - 1e-12)


def test_sym_moment_floor_can_fail_below_top_order():
    # for 1 < m < p/2 the bound needs a_p >= a_2; here a_2 = 5 a_p breaks it
    lhs, rhs = sym_moment_floor(12.0, 1.0, 5.0, 2)
    assert lhs < rhs


@pytest.mark.parametrize("p, m", [(4.5, 2), (12.0, 2), (12.0, 4), (9.0, 3)])
def test_sym_moment_floor_with_matching_exponents(p, m):
    # ||S_p||_p >= a_p and t u^2 = a_2^2 give t u^{2m} >= a_p^{p(2m-2)/(p-2)} a_2^{2(p-2m)/(p-2)}
    for ratio in (0.1, 1.0, 5.0, 40.0):
        lim = limit_construction(p, 1.0, ratio)
        lhs = lim.t * lim.u ** (2 * m)
        rhs = ratio ** (2 * (p - 2 * m) / (p - 2))
        assert lhs >= rhs * (1 - 1e-12)


@pytest.mark.parametrize("p", [3.0, 4.0, 7.5])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_even_moment_interpolation(p, m):
    s = build_extremal(p, 1.0, 2.0, 1000)
    lhs, rhs = even_moment_interpolation(s, m)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    assert s.s_norm(2 * m) == pytest.approx(s.t ** ((1 - m) / (2 * m)) * s.a_2, rel=1e-12)


def test_two_point_increment():
    inc = TwoPointIncrement(2.0, 0.3)
    vals, probs = inc.support()
    assert probs @ vals == 0
    assert probs @ vals**2 == pytest.approx(inc.abs_moment(2))
    assert probs @ np.abs(vals) ** 5 == pytest.approx(inc.abs_moment(5))
    with pytest.raises(ValueError):
        TwoPointIncrement(1.0, 0.0)


def test_lattice_matches_enumeration():
    n, q, u = 5, 0.4, 1.3
    k, pmf = lattice_pmf(n, q)
    law = {1: q / 2, -1: q / 2, 0: 1 - q}
    brute = {}
    for path in itertools.product(law, repeat=n):
        brute[sum(path)] = brute.get(sum(path), 0.0) + math.prod(law[x] for x in path)
    for kk, pp in zip(k, pmf):
        assert pp == pytest.approx(brute.get(kk, 0.0), abs=1e-15)
    assert exact_sum_norm(n, q, u, 4) ** 4 == pytest.approx(two_point_even_moment(n, 2, q, u), rel=1e-12)


@pytest.mark.parametrize("r", [3.0, 4.0, 7.5])
def test_binomial_mixture_agrees_with_lattice(r):
    from martbounds.constructions import _binomial_mixture_abs_moment

    k, pmf = lattice_pmf(64, 0.2)
    assert _binomial_mixture_abs_moment(64, 0.2, r) == pytest.approx(float(np.sum(pmf * np.abs(k) ** r)), rel=1e-10)


def test_moments_converge_to_limit():
    p, m = 5.0, 2
    lim = limit_construction(p, 1.0, 1.5)
    target = sym_poisson_moment(lim.t, lim.u, m)
    gaps = [abs(build_extremal(p, 1.0, 1.5, n).sum_norm(2 * m) - target) for n in (8, 16, 32, 64, 512, 8192)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3 * target


def test_limit_norm_paths_agree():
    lim = limit_construction(4, 1, 1)
    assert lim.norm(4) == pytest.approx(lim.even_norm(2), rel=1e-10)
    assert build_extremal(4, 1, 1, INFINITE).sum_norm(4) == pytest.approx(lim.norm(4))


def test_characteristic_function():
    lim = limit_construction(4, 1, 1)
    assert lim.characteristic_function(0.0) == 1.0
    assert 0 < lim.characteristic_function(1.0) < 1


def test_rademacher_builder():
    spec = build_rademacher(4, 1.0)
    assert spec.family == "rademacher" and spec.n == 4
    assert rademacher_s_norm(4, 1.0, 3.0) == pytest.approx(4 ** (1 / 3))
    assert rademacher_sum_norm(2, 1.0, 4) == pytest.approx(8**0.25)
    for n, m in [(3, 3), (7, 2), (10, 4)]:
        assert rademacher_sum_norm(n, 1.3, 2 * m) == pytest.approx(rademacher_moment(n, m, 1.3), rel=1e-12)


def test_rademacher_chung_ratio():
    n, p = 16, 4.0
    ratio = rademacher_sum_norm(n, 1.0, p) / chung_bound(p, n, rademacher_s_norm(n, 1.0, p))
    assert 0.25 <= ratio <= 1
