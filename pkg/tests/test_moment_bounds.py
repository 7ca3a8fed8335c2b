import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from martbounds.moment_bounds import (
    BoundQuery,
    c_p_solve,
    check_B,
    check_B_bruteforce,
    chung_bound,
    cond_symmetric_moment_bound,
    critical_interval,
    curve_ratio,
    hat_B,
    independent_sum_bound,
    minimality_ratio,
    q_curve,
    spectrum_term,
    star_B,
    with_proof_constant,
    z_alpha_solve,
)

Q11 = BoundQuery(4, 1, 1)


@pytest.mark.parametrize("c, expected", [(4, 4 + 2 * math.e), (1, 1 + math.e**4)])
def test_spectrum_examples(c, expected):
    assert spectrum_term(Q11, c).value == pytest.approx(expected, rel=1e-14)


def test_spectrum_without_second_term():
    assert spectrum_term(BoundQuery(4, 2, 0), 3).value == 6


def test_spectrum_out_of_range():
    with pytest.raises(ValueError):
        spectrum_term(Q11, 4.5)


def test_query_validation():
    with pytest.raises(ValueError):
        BoundQuery(1.5, 1, 1)
    with pytest.raises(ValueError):
        BoundQuery(3, -1, 1)


def _dense_hat(q, points=100_001):
    c = np.linspace(1, q.p, points)
    v = c * q.a_p + np.sqrt(c) * np.exp(q.p / c) * q.a_2
    k = int(np.argmin(v))
    lo, hi = c[max(k - 1, 0)], c[min(k + 1, points - 1)]
    fine = np.linspace(lo, hi, 100_001)
    return float(np.min(fine * q.a_p + np.sqrt(fine) * np.exp(q.p / fine) * q.a_2))


def test_hat_example():
    v, c = hat_B(Q11)
    assert v == pytest.approx(9.363, abs=5e-4)
    assert c == pytest.approx(3.6, abs=0.05)
    assert v == pytest.approx(_dense_hat(Q11), rel=1e-10)


@pytest.mark.parametrize("p, q", [(2.5, 1e-3), (3, 0.5), (8, 0.01), (16, 3.0), (64, 1e-20), (32, 40.0)])
def test_hat_matches_dense_oracle(p, q):
    Q = BoundQuery(p, 1.0, q)
    assert hat_B(Q)[0] == pytest.approx(_dense_hat(Q), rel=1e-10)


def test_hat_limits():
    v, c = hat_B(BoundQuery(4, 1, 1e-30))
    assert v == pytest.approx(1.0, rel=1e-9) and c == pytest.approx(1.0, abs=1e-6)
    v, c = hat_B(BoundQuery(4, 1e-30, 1))
    assert v == pytest.approx(2 * math.e, rel=1e-9) and c == pytest.approx(4.0, abs=1e-6)


@given(p=st.floats(2.01, 64), lq=st.floats(-20, 4), c=st.floats(0, 1))
def test_hat_is_minimum(p, lq, c):
    Q = BoundQuery(p, 1.0, math.exp(lq))
    cc = 1 + c * (p - 1)
    assert hat_B(Q)[0] <= spectrum_term(Q, cc).value * (1 + 1e-12)


def test_check_example():
    v, a = check_B(Q11)
    assert v == pytest.approx(2.38, abs=5e-3)
    assert a == pytest.approx(0.71, abs=5e-3)


def test_check_below_interval():
    assert check_B(BoundQuery(4, 1, 1e-3)) == (1.0, 0.0)


def test_check_above_interval():
    v, a = check_B(BoundQuery(2.5, 1, 2))
    assert a == 1.0 and v == pytest.approx(math.sqrt(3.5) * 2, rel=1e-15)


@pytest.mark.parametrize("p", [2.5, 3, 4, 8, 16, 32, 64])
@pytest.mark.parametrize("where", [0.3, 0.7, 1.0, 1.3])
def test_check_matches_grid_oracle(p, where):
    lo, hi = critical_interval(p)
    # where < 1 and > 1 put q inside or above the critical interval; small 'where' falls below
    q = math.exp(math.log(lo) + where * (math.log(hi) - math.log(lo))) if where <= 1 else hi * 3
    q = q if where != 0.3 else lo * 0.1
    Q = BoundQuery(p, 1.0, q)
    exact = check_B(Q)[0]
    assert exact >= check_B_bruteforce(Q)[0] * (1 - 1e-14)
    assert exact == pytest.approx(check_B_bruteforce(Q)[0], rel=1e-8)


def test_q_curve_is_increasing_and_maps_interval():
    a = np.linspace(0, 1, 200)
    vals = [q_curve(6.0, x) for x in a]
    assert all(b > a_ for a_, b in zip(vals, vals[1:]))
    lo, hi = critical_interval(6.0)
    assert vals[0] == pytest.approx(lo) and vals[-1] == pytest.approx(hi)


def test_check_degenerate_inputs():
    assert check_B(BoundQuery(4, 0, 2)) == (math.sqrt(5) * 2, 1.0)
    assert check_B(BoundQuery(4, 3, 0)) == (3, 0.0)


def test_star_example():
    assert star_B(Q11) == pytest.approx(1 + 2 + 4 / math.log(4), rel=1e-14)
    assert star_B(Q11) == pytest.approx(5.88539, abs=1e-5)


def test_star_limits():
    assert star_B(BoundQuery(4, 1e-300, 1)) == pytest.approx(2.0, rel=1e-12)
    big = 1e8
    assert star_B(BoundQuery(4, 1, big)) - 2 * big == pytest.approx(1 + 4 / math.log(2), abs=1e-5)


def test_c_p_examples():
    assert c_p_solve(4) == pytest.approx(4.982, abs=1e-3)
    c = c_p_solve(4)
    assert c * math.log(c) == pytest.approx(8, rel=1e-12)
    assert c_p_solve(math.e**2) == pytest.approx(math.e**2, rel=1e-12)
    assert 0.8 <= c_p_solve(100) / (200 / math.log(100)) <= 1.6


@pytest.mark.parametrize("p", [2.5, 4, 8, 32])
def test_z_alpha(p):
    amax = p / math.log(math.e * p)
    assert z_alpha_solve(p, 1.0) == pytest.approx(1.0)
    for alpha in np.linspace(1, amax, 9):
        z = z_alpha_solve(p, alpha)
        assert 1 <= z <= p
        assert z < 2 * alpha
        if 1 < z < p:
            assert 0.5 * math.log(z) + p / z == pytest.approx(p / alpha, rel=1e-12)


def test_z_alpha_domain():
    with pytest.raises(ValueError):
        z_alpha_solve(8, 0.5)


@pytest.mark.parametrize("p, n, expected", [(4, 1, 1.0), (4, 16, 4.0), (100, 4, 2 * 4 ** (49 / 100))])
def test_chung_examples(p, n, expected):
    assert chung_bound(p, n, 1.0) == pytest.approx(expected, rel=1e-14)


def test_small_helpers():
    assert cond_symmetric_moment_bound(1, 1, 1) == 1
    assert cond_symmetric_moment_bound(4, math.sqrt(3), 2) == pytest.approx(4 * math.sqrt(3))
    assert cond_symmetric_moment_bound(4, 1, 0) == 0
    assert with_proof_constant(1) == 60 and with_proof_constant(0) == 0
    assert with_proof_constant(spectrum_term(Q11, 4).value) == pytest.approx(60 * (4 + 2 * math.e))
    assert independent_sum_bound(Q11, 4) == spectrum_term(Q11, 4).value
    assert independent_sum_bound(Q11, 4, double_dstar=True) == pytest.approx(8 + 2 * math.e)


@pytest.mark.parametrize("p", [2.5, 4, 8, 16, 64])
def test_spectrum_members_all_needed(p):
    for c in np.linspace(1, p, 15):
        assert minimality_ratio(p, c) <= 2 * math.e


@pytest.mark.parametrize("p", [2.5, 4, 16, 64])
def test_curve_ratio_bounded(p):
    vals = [curve_ratio(p, a) for a in np.linspace(0, 1, 21)]
    assert max(vals) < 8 and min(vals) >= 1 - 1e-12
