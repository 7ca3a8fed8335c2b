"""Extremal martingales for the moment bounds.

The main construction uses n independent increments equal to ``+-u`` with
probability ``q/2`` each and 0 otherwise. Given ``(p, a_p, a_2)`` the pair
``(q, u)`` is tuned so that ``||d*||_p = a_p`` and ``||S_2||_2 = a_2``; this
reduces to one scalar equation ``g_n(t) = (a_p / a_2)^p`` in ``t = n q``.
As n grows the sum converges to ``u (N_1 - N_2)`` with independent
Poisson(t/2) counts. Rademacher sums cover the n-dependent bounds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp
from scipy.stats import binom, skellam

LATTICE_MAX_N = 64


class Horizon(enum.Enum):
    """Marker for the infinite-horizon (Poisson limit) variant."""

    INFINITE = "infinite"

    def __repr__(self):
        return "INFINITE"


INFINITE = Horizon.INFINITE


def _as_horizon(n):
    if n is None or n is INFINITE or (isinstance(n, float) and math.isinf(n)):
        return INFINITE
    if isinstance(n, str) and n.lower() in ("inf", "infinite", "infinity"):
        return INFINITE
    if int(n) != n or n < 1:
        raise ValueError(f"horizon must be a positive integer or INFINITE, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class TwoPointIncrement:
    u: float
    q: float

    def __post_init__(self):
        if not self.u > 0:
            raise ValueError("jump size u must be positive")
        if not 0 < self.q <= 1:
            raise ValueError("atom probability q must lie in (0, 1]")

    def abs_moment(self, r):
        """``E|d|^r = q u^r``."""
        return self.q * self.u**r

    @property
    def sup_norm(self):
        return self.u

    def support(self):
        return np.array([-self.u, 0.0, self.u]), np.array([self.q / 2, 1 - self.q, self.q / 2])


@dataclass(frozen=True)
class SymPoissonSpec:
    t: float
    u: float

    def characteristic_function(self, lam):
        return np.exp((np.cos(np.asarray(lam) * self.u) - 1.0) * self.t)

    def norm(self, r):
        """``||Z||_r`` by summing the Skellam pmf of ``Z / u``."""
        return self.u * _skellam_abs_moment(self.t, r) ** (1.0 / r)

    def even_norm(self, m):
        from martbounds.exact_constants import sym_poisson_moment

        return sym_poisson_moment(self.t, self.u, m)


@dataclass(frozen=True)
class ExtremalSpec:
    n: int | Horizon
    t: float
    increment: TwoPointIncrement | None
    p: float
    a_p: float
    a_2: float

    @property
    def u(self):
        return self.a_2 / math.sqrt(self.t)

    @property
    def infinite(self):
        return self.n is INFINITE

    def s_norm(self, r):
        """``||S_r||_r = (E sum |d_j|^r)^{1/r} = t^{1/r} u`` (also in the Poisson limit)."""
        return self.t ** (1.0 / r) * self.u

    def d_star_norm(self, r=None):
        """``||d*||_r``; equals ``a_p`` at ``r = p``."""
        r = self.p if r is None else r
        if self.infinite:
            hit = -math.expm1(-self.t)
        else:
            hit = -math.expm1(self.n * math.log1p(-self.t / self.n))
        return self.u * hit ** (1.0 / r)

    def s2_norm(self):
        return self.s_norm(2.0)

    def sum_norm(self, r):
        """Exact ``||f_n||_r`` of the constructed sum."""
        if self.infinite:
            return self.limit().norm(r)
        return exact_sum_norm(self.n, self.increment.q, self.u, r)

    def limit(self):
        return limit_construction(self.p, self.a_p, self.a_2)

    def to_dict(self):
        return {
            "n": "infinite" if self.infinite else self.n,
            "t": self.t,
            "q": None if self.increment is None else self.increment.q,
            "u": self.u,
            "p": self.p,
            "a_p": self.a_p,
            "a_2": self.a_2,
        }


def log_g(p, t, n):
    """``log g_n(t)`` with ``g_n(t) = t^{-p/2} [1 - (1 - t/n)^n]`` (``1 - e^{-t}`` when n is infinite)."""
    n = _as_horizon(n)
    if n is INFINITE:
        hit = -math.expm1(-t)
    else:
        hit = -math.expm1(n * math.log1p(-t / n)) if t < n else 1.0
    return -0.5 * p * math.log(t) + math.log(hit)


def solve_t(p, target, n):
    """Unique root of ``g_n(t) = target`` on ``(0, n)``; ``target = (a_p / a_2)^p``."""
    if not target > 0:
        raise ValueError("target must be positive")
    return solve_t_log(p, math.log(target), n)


def solve_t_log(p, log_target, n):
    """:func:`solve_t` with the target given by its logarithm (avoids overflow at large p)."""
    if not p > 2:
        raise ValueError("p must be > 2")
    n = _as_horizon(n)
    lt = log_target
    if n is not INFINITE and not math.log(n) > -2.0 * lt / p:
        raise ValueError(f"no solution: need n > (a_2/a_p)^2 = {math.exp(-2.0 * lt / p)!r}, got n={n}")

    def h(s):
        return log_g(p, math.exp(s), n) - lt

    hi = math.log(n) if n is not INFINITE else 0.0
    if n is INFINITE:
        while h(hi) > 0:
            hi += 1.0
    lo = min(hi, 0.0) - 1.0
    while h(lo) < 0:
        lo -= 1.0
    if n is not INFINITE and h(hi) >= 0:
        raise ValueError("no solution on (0, n)")
    s = brentq(h, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(s)


def build_extremal(p, a_p, a_2, n) -> ExtremalSpec:
    """Two-point construction with ``||d*||_p = a_p`` and ``||S_2||_2 = a_2``."""
    if a_p <= 0 or a_2 <= 0:
        raise ValueError("a_p and a_2 must be positive")
    n = _as_horizon(n)
    t = solve_t_log(p, p * math.log(a_p / a_2), n)
    inc = None if n is INFINITE else TwoPointIncrement(a_2 / math.sqrt(t), t / n)
    return ExtremalSpec(n, t, inc, float(p), float(a_p), float(a_2))


def limit_construction(p, a_p, a_2) -> SymPoissonSpec:
    t = solve_t_log(p, p * math.log(a_p / a_2), INFINITE)
    return SymPoissonSpec(t, a_2 / math.sqrt(t))


def even_moment_interpolation(spec: ExtremalSpec, m):
    """Both sides of ``E S_{2m}^{2m} = (E S_p^p)^{(2m-2)/(p-2)} (E S_2^2)^{(p-2m)/(p-2)}``.

    The two-point construction has ``E S_r^r = t u^r`` for every r, so the
    identity holds for every m and returns ``(lhs, rhs)`` in log form.
    """
    p = spec.p
    log_lhs = 2 * m * math.log(spec.s_norm(2 * m))
    log_rhs = (2 * m - 2) / (p - 2) * p * math.log(spec.s_norm(p)) + (p - 2 * m) / (p - 2) * 2 * math.log(
        spec.s_norm(2)
    )
    return log_lhs, log_rhs


def sym_moment_floor(p, a_p, a_2, m):
    """``(t_inf^{1/2m} u_inf, (a_p^{2m-2} a_2^{p-2m})^{1/(p-2)})``; the first should dominate."""
    lim = limit_construction(p, a_p, a_2)
    lhs = lim.t ** (1.0 / (2 * m)) * lim.u
    rhs = math.exp(((2 * m - 2) * math.log(a_p) + (p - 2 * m) * math.log(a_2)) / (p - 2))
    return lhs, rhs


# ---------------------------------------------------------------------------
# Exact distribution of the two-point sum


def lattice_pmf(n, q):
    """pmf of ``K = sum_j sign_j`` over ``k = -n..n`` by repeated convolution (n <= 64)."""
    if n > LATTICE_MAX_N:
        raise ValueError(f"lattice enumeration limited to n <= {LATTICE_MAX_N}")
    step = np.array([q / 2, 1.0 - q, q / 2])
    pmf = np.array([1.0])
    for _ in range(n):
        pmf = np.convolve(pmf, step)
    return np.arange(-n, n + 1), pmf


def _binomial_mixture_abs_moment(n, q, r, width=40.0):
    """``E|K|^r`` via ``J ~ Bin(n, q)`` nonzero steps and ``K = 2 Bin(J, 1/2) - J``.

    Both binomials are truncated ``width`` standard deviations from their means.
    """
    mean, sd = n * q, math.sqrt(n * q * (1 - q))
    j_lo = max(0, int(math.floor(mean - width * sd - 1)))
    j_hi = min(n, int(math.ceil(mean + width * sd + 1)))
    js = np.arange(j_lo, j_hi + 1)
    log_pj = binom.logpmf(js, n, q)
    log_terms = []
    for j, lpj in zip(js, log_pj):
        if j == 0 or not np.isfinite(lpj):
            continue
        half = 0.5 * j
        w = width * math.sqrt(j) / 2 + 1
        b = np.arange(max(0, int(half - w)), min(j, int(half + w)) + 1)
        k = np.abs(2 * b - j)
        pos = k > 0
        lb = gammaln(j + 1) - gammaln(b[pos] + 1) - gammaln(j - b[pos] + 1) - j * math.log(2.0)
        log_terms.append(lpj + logsumexp(lb + r * np.log(k[pos])))
    return math.exp(logsumexp(log_terms)) if log_terms else 0.0


def exact_sum_norm(n, q, u, r):
    """``||f_n||_r`` for n iid two-point increments, computed without sampling."""
    if n <= LATTICE_MAX_N:
        k, pmf = lattice_pmf(n, q)
        return u * float(np.sum(pmf * np.abs(k) ** r)) ** (1.0 / r)
    return u * _binomial_mixture_abs_moment(n, q, r) ** (1.0 / r)


def _skellam_abs_moment(t, r):
    mu = t / 2
    kmax = int(math.ceil(t + 40 * math.sqrt(t) + 40))
    k = np.arange(1, kmax + 1)
    return 2.0 * float(np.sum(skellam.pmf(k, mu, mu) * k.astype(float) ** r))


# ---------------------------------------------------------------------------
# Rademacher sums


def build_rademacher(n, u=1.0):
    """Independent ``+-u`` signs on the real line."""
    from martbounds.simulator import MartingaleSpec

    if n < 1:
        raise ValueError("n must be >= 1")
    return MartingaleSpec.rademacher(n, u)


def rademacher_s_norm(n, u, p):
    """``||S_p||_p = n^{1/p} u`` since every increment has norm u."""
    return n ** (1.0 / p) * u


def rademacher_sum_norm(n, u, r):
    """Exact ``||f_n||_r`` via the binomial law of the number of plus signs."""
    b = np.arange(n + 1)
    pmf = binom.pmf(b, n, 0.5)
    return u * float(np.sum(pmf * np.abs(2 * b - n).astype(float) ** r)) ** (1.0 / r)
