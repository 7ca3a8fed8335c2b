"""Exact and optimized constants.

* ``gamma_jm``: the number of ways to split 2m labelled points into j
  unordered blocks of even size, computed exactly from the partitions of
  m into j parts. It is the building block of every even moment of a sum of
  independent symmetric variables.
* Closed-form even moments built from it: the optimal symmetric moment
  bound, the symmetrized Poisson law and Rademacher sums.
* The two Burkholder good-lambda constants, as numerical infima.
* The older two-coefficient bound family ``(c1 a_p^p + c2 a_2^p)^{1/p}``
  with its explicit admissible coefficient functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp

from martbounds.moment_bounds import check_B_alpha, log_g

GAMMA_MEMO_MAX_M = 64


@dataclass(frozen=True)
class PartitionConstant:
    j: int
    m: int
    value: Fraction
    partitions: tuple  # each entry: ((m_1, j_1), (m_2, j_2), ...) with m_1 > m_2 > ...

    def __int__(self):
        return int(self.value)

    def __float__(self):
        return float(self.value)


@dataclass
class BurkholderConstant:
    i: int
    p: float
    value: float
    argmin: tuple  # (beta, delta)


@dataclass
class Family1980Point:
    p: float
    q: float
    m: int
    b: list
    y: dict = field(default_factory=dict)
    u: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    log_c1: float = math.nan
    log_c2: float = math.nan
    value: float = math.nan

    @property
    def c1(self):
        return _safe_exp(self.log_c1)

    @property
    def c2(self):
        return _safe_exp(self.log_c2)


def _safe_exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def partitions_into(m, j, largest=None):
    """Partitions of ``m`` into exactly ``j`` positive parts as ``((size, mult), ...)``.

    Sizes are strictly decreasing; the parts are generated by recursive
    descent over the distinct sizes.
    """
    if largest is None:
        largest = m
    if j == 0:
        if m == 0:
            yield ()
        return
    if m < j or m > j * largest:
        return
    for size in range(min(largest, m - j + 1), 0, -1):
        for mult in range(min(j, m // size), 0, -1):
            rest_m, rest_j = m - size * mult, j - mult
            for tail in partitions_into(rest_m, rest_j, size - 1):
                yield ((size, mult),) + tail


@lru_cache(maxsize=None)
def _gamma(j, m):
    parts = tuple(partitions_into(m, j))
    total = Fraction(0)
    for part in parts:
        denom = 1
        for size, mult in part:
            denom *= math.factorial(mult) * math.factorial(2 * size) ** mult
        total += Fraction(1, denom)
    return total * math.factorial(2 * m), parts


def gamma_jm(j, m) -> PartitionConstant:
    if not (isinstance(j, (int, np.integer)) and isinstance(m, (int, np.integer))):
        raise TypeError("j and m must be integers")
    if j < 1 or j > m:
        raise ValueError(f"need 1 <= j <= m, got j={j}, m={m}")
    if m <= GAMMA_MEMO_MAX_M:
        value, parts = _gamma(int(j), int(m))
    else:
        value, parts = _gamma.__wrapped__(int(j), int(m))
    return PartitionConstant(int(j), int(m), value, parts)


def _log_fraction(x: Fraction):
    return math.log(x.numerator) - math.log(x.denominator)


def gamma_growth_check(j, m) -> float:
    """``Gamma_{j,m}^{1/(2m)} / j^{1 - j/(2m)}``; stays within absolute constants."""
    g = gamma_jm(j, m).value
    return math.exp(_log_fraction(g) / (2 * m) - (1 - j / (2 * m)) * math.log(j))


def B_2m_sym(b_2m, b_2, m) -> float:
    """Largest ``||f_n||_{2m}`` for symmetric independent increments with given ``||S_{2m}||_{2m}``, ``||S_2||_2``.

    For m = 1 the two arguments describe the same quantity and the value is ``b_2``.
    """
    if b_2m <= 0 or b_2 <= 0:
        raise ValueError("arguments must be positive")
    if m < 1:
        raise ValueError("m must be a positive integer")
    if m == 1:
        return float(b_2)
    expo = 2 * m / (m - 1)
    lb2m, lb2 = math.log(b_2m), math.log(b_2)
    logs = [
        _log_fraction(gamma_jm(j, m).value) + expo * ((m - j) * lb2m + (j - 1) * lb2)
        for j in range(1, m + 1)
    ]
    return math.exp(logsumexp(logs) / (2 * m))


def sym_poisson_moment_cumulant(t, u, m) -> float:
    """``||Z||_{2m}`` for ``Z = u (N_1 - N_2)``, N_i iid Poisson(t/2), from the cumulants.

    Every even cumulant of ``N_1 - N_2`` equals t and every odd one vanishes,
    so the moments follow from ``mu_n = sum_k C(n-1, k-1) kappa_k mu_{n-k}``.
    """
    n_max = 2 * m
    mu = [1.0] + [0.0] * n_max
    for n in range(1, n_max + 1):
        acc = 0.0
        for k in range(2, n + 1, 2):
            acc += math.comb(n - 1, k - 1) * t * mu[n - k]
        mu[n] = acc
    return u * mu[n_max] ** (1.0 / n_max)


def sym_poisson_moment_formula(t, u, m) -> float:
    """The same norm through the optimal symmetric bound at ``(t^{1/2m} u, t^{1/2} u)``."""
    return B_2m_sym(t ** (1.0 / (2 * m)) * u, math.sqrt(t) * u, m)


def sym_poisson_moment(t, u, m, rtol=1e-10) -> float:
    """``||Z||_{2m}`` for the symmetrized Poisson variable; both computations must agree."""
    if t <= 0 or u <= 0:
        raise ValueError("t and u must be positive")
    a = sym_poisson_moment_cumulant(t, u, m)
    b = sym_poisson_moment_formula(t, u, m)
    if abs(a - b) > rtol * abs(a):
        raise ArithmeticError(f"symmetrized Poisson moments disagree: {a!r} vs {b!r}")
    return a


def rademacher_even_moment_exact(n, m) -> int:
    """``E(eps_1 + ... + eps_n)^{2m}`` as an exact integer."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    total = Fraction(0)
    for j in range(1, min(m, n) + 1):
        total += math.comb(n, j) * math.factorial(j) * gamma_jm(j, m).value
    assert total.denominator == 1
    return int(total)


def rademacher_moment(n, m, u=1.0) -> float:
    """``||u (eps_1 + ... + eps_n)||_{2m}``."""
    exact = rademacher_even_moment_exact(n, m)
    return u * math.exp(math.log(exact) / (2 * m))


def two_point_even_moment(n, m, q, u=1.0) -> float:
    """``E f_n^{2m}`` for n iid increments equal to ``+-u`` w.p. ``q/2`` each, else 0."""
    total = 0.0
    for j in range(1, min(m, n) + 1):
        total += math.comb(n, j) * math.factorial(j) * float(gamma_jm(j, m).value) * q**j
    return total * u ** (2 * m)


# ---------------------------------------------------------------------------
# Burkholder good-lambda constants


def _burkholder_log_objective(i, p, log_delta, log_k):
    delta = np.exp(log_delta)
    k = np.exp(log_k)
    beta = 1.0 + delta * (1.0 + k)
    log_w = math.log(i) + p * np.log(beta) - 2.0 * log_k
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.log(beta) - log_delta - np.log1p(-np.exp(log_w)) / p
    return np.where(log_w < 0, out, np.inf)


def burkholder_C(i, p, grid=200, refinements=3) -> BurkholderConstant:
    """Infimum of ``(beta/delta) / [1 - i beta^p delta^2 / (beta-1-delta)^2]^{1/p}``.

    Search is over ``delta`` and ``k = (beta - 1 - delta)/delta`` on a log grid,
    refined around the best cell and finished with a Nelder-Mead polish.
    """
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    if p < 1:
        raise ValueError("p must be >= 1")
    ld_lo, ld_hi = math.log(1e-4), 0.0
    lk_lo, lk_hi = math.log(1e-2), math.log(1e2)
    best = None
    for _ in range(refinements + 1):
        ld = np.linspace(ld_lo, ld_hi, grid)
        lk = np.linspace(lk_lo, lk_hi, grid)
        LD, LK = np.meshgrid(ld, lk, indexing="ij")
        vals = _burkholder_log_objective(i, p, LD, LK)
        a, b = np.unravel_index(np.argmin(vals), vals.shape)
        if not np.isfinite(vals[a, b]):
            raise ValueError("no feasible point found")
        best = (float(vals[a, b]), float(ld[a]), float(lk[b]))
        hd, hk = ld[1] - ld[0], lk[1] - lk[0]
        ld_lo, ld_hi = ld[a] - hd, ld[a] + hd
        lk_lo, lk_hi = lk[b] - hk, lk[b] + hk

    def f(x):
        return float(_burkholder_log_objective(i, p, x[0], x[1]))

    res = minimize(f, [best[1], best[2]], method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
    if res.fun < best[0]:
        best = (float(res.fun), float(res.x[0]), float(res.x[1]))
    delta = math.exp(best[1])
    beta = 1.0 + delta * (1.0 + math.exp(best[2]))
    return BurkholderConstant(i, float(p), math.exp(best[0]), (beta, delta))


def burkholder_objective(i, p, beta, delta):
    """Direct evaluation of the Burkholder objective (inf when infeasible)."""
    gap = beta - 1.0 - delta
    if gap <= 0 or delta <= 0:
        return math.inf
    w = i * beta**p * delta**2 / gap**2
    if w >= 1:
        return math.inf
    return (beta / delta) / (1.0 - w) ** (1.0 / p)


# ---------------------------------------------------------------------------
# Two-coefficient bound family


def _log_falling(p, k):
    return sum(math.log(p - r) for r in range(k))


def family_1980(p, a_p, a_2, refine=False) -> Family1980Point:
    """Build the admissible coefficients ``(c1, c2)`` and the resulting bound.

    ``y_s`` is the maximum over alpha of ``(s alpha + 1)^{1 - alpha/2} q^alpha``;
    ``u(s) = e^3 y_s^2 / (s q^2)`` and ``v(s) = 10^s y_s^{s-2}``. The default
    weights are ``b_i = q^{-p/(p-2)}``; ``refine=True`` replaces them with the
    per-term optimum, which can only lower the bound.
    """
    if not p > 2:
        raise ValueError("p must be > 2")
    if a_p <= 0 or a_2 <= 0:
        raise ValueError("a_p and a_2 must be positive")
    q = a_2 / a_p
    lq = math.log(q)
    m = int(math.floor(p / 2))
    point = Family1980Point(p=p, q=q, m=m, b=[])
    s_values = [p - 2 * k for k in range(m)]
    log_u, log_v = {}, {}
    for s in s_values:
        ly = log_g(s, check_B_alpha(s, q), q)
        point.y[s] = math.exp(ly)
        log_u[s] = 3.0 + 2.0 * ly - math.log(s) - 2.0 * lq
        log_v[s] = s * math.log(10.0) + (s - 2.0) * ly
        point.u[s] = _safe_exp(log_u[s])
        point.v[s] = _safe_exp(log_v[s])
    _validate_uv(s_values, log_u, log_v)

    lap, la2 = math.log(a_p), math.log(a_2)
    log_b_default = -p / (p - 2) * lq
    c1_terms, c2_terms, total_terms = [], [], []
    log_u_prod = 0.0
    for i in range(m):
        log_ci = log_v[p - 2 * i] - i * math.log(2.0) + _log_falling(p, 2 * i) + log_u_prod
        log_u_prod += log_u[p - 2 * i]
        log_w = log_ci - math.lgamma(i + 1)
        lb = _best_log_b(i, p, lap, la2) if refine else log_b_default
        point.b.append(_safe_exp(lb) if lb is not None else (0.0 if i == 0 else math.inf))
        t1 = log_w - 2 * i * lb if lb is not None else (log_w if i == 0 else -math.inf)
        t2 = log_w + (p - 2 * i - 2) * lb if lb is not None else _limit_c2_term(i, p, log_w)
        c1_terms.append(t1)
        c2_terms.append(t2)
        total_terms += [t1 + p * lap, t2 + p * la2]
    log_cm = -m * math.log(2.0) + _log_falling(p, 2 * m) + log_u_prod - math.lgamma(m + 1)
    c2_terms.append(log_cm)
    total_terms.append(log_cm + p * la2)
    point.log_c1 = float(logsumexp(c1_terms))
    point.log_c2 = float(logsumexp(c2_terms))
    point.value = math.exp(float(logsumexp(total_terms)) / p)
    return point


def _limit_c2_term(i, p, log_w):
    # b_i pushed to its limit: 0 for i = 0, infinity when the exponent p-2i-2 vanishes
    if i == 0:
        return -math.inf
    return log_w  # p - 2i - 2 == 0, b^0 = 1


def _best_log_b(i, p, lap, la2):
    """Log of the minimizer of ``b^{-2i} a_p^p + b^{p-2i-2} a_2^p``, or None at a limit."""
    e = p - 2 * i - 2
    if i == 0 or e <= 0:
        return None
    # derivative zero: b^{p-2} = 2i a_p^p / ((p-2i-2) a_2^p)
    return (math.log(2 * i) + p * lap - math.log(e) - p * la2) / (p - 2)


def _validate_uv(s_values, log_u, log_v, tol=1e-12):
    for s in s_values:
        lu, lv = log_u[s], log_v[s]
        if abs(s - 2) < 1e-12:
            if not math.exp(lu) + math.exp(lv) >= 1 - tol:
                raise ArithmeticError(f"u(2) + v(2) < 1 at s={s}")
            continue
        if lu < -tol or lv < -tol:
            raise ArithmeticError(f"u(s) or v(s) below 1 at s={s}")
        if s > 3:
            lhs = math.exp(lu / (3 - s)) + math.exp(lv / (3 - s))
            if lhs > 1 + tol:
                raise ArithmeticError(f"u(s)^(1/(3-s)) + v(s)^(1/(3-s)) = {lhs} > 1 at s={s}")


def uv_conditions(point: Family1980Point):
    """Per-s check values of the admissibility conditions (for reporting)."""
    out = {}
    for s in point.u:
        u, v = point.u[s], point.v[s]
        row = {"u": u, "v": v}
        if s > 3:
            row["power_sum"] = math.exp(math.log(u) / (3 - s)) + math.exp(math.log(v) / (3 - s))
        out[s] = row
    return out


def B_1980(p, a_p, a_2, refine=False) -> float:
    return family_1980(p, a_p, a_2, refine=refine).value
