"""Rosenthal-Burkholder type moment bounds and their optimal envelopes.

The basic family is the spectrum ``c a_p + sqrt(c) e^{p/c} a_2`` over
``1 <= c <= p``, where ``a_p`` is ``||d*||_p`` (or ``||S_p||_p``) and ``a_2``
is ``D ||s_2||_p`` (or ``||S_2||_2``). Three envelopes are equivalent to
within absolute constants:

* ``hat_B``  the minimum of the spectrum over c,
* ``check_B`` ``max_alpha (p alpha + 1)^{1 - alpha/2} a_p^{1-alpha} a_2^alpha``,
* ``star_B`` ``a_p + sqrt(p) a_2 + p a_p / ln(2 + sqrt(p) a_p / a_2)``.

None of these include the unknown absolute constant; the single explicit
constant available for the spectrum (60) is applied by
:func:`with_proof_constant`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from martbounds._numerics import grid_then_golden

PROOF_CONSTANT = 60.0
HAT_GRID_POINTS = 2048


@dataclass(frozen=True)
class BoundQuery:
    p: float
    a_p: float
    a_2: float

    def __post_init__(self):
        if not self.p >= 2:
            raise ValueError("p must be >= 2")
        if self.a_p < 0 or self.a_2 < 0:
            raise ValueError("a_p and a_2 must be nonnegative")

    @property
    def q(self):
        return self.a_2 / self.a_p


@dataclass(frozen=True)
class SpectrumPoint:
    c: float
    value: float


def _spectrum(p, a_p, a_2, c):
    second = 0.0 if a_2 == 0 else a_2 * math.exp(0.5 * math.log(c) + p / c)
    return c * a_p + second


def spectrum_term(q: BoundQuery, c) -> SpectrumPoint:
    if not 1.0 <= c <= q.p:
        raise ValueError(f"spectrum parameter c={c} outside [1, {q.p}]")
    return SpectrumPoint(c, _spectrum(q.p, q.a_p, q.a_2, c))


def hat_B(q: BoundQuery):
    """Minimum of the spectrum over ``c in [1, p]``; returns ``(value, argmin_c)``."""
    c, v = grid_then_golden(lambda c: _spectrum(q.p, q.a_p, q.a_2, c), 1.0, q.p, points=HAT_GRID_POINTS)
    return v, c


def log_g(p, alpha, q):
    """``log g_p(alpha) = (1 - alpha/2) log(p alpha + 1) + alpha log q``."""
    lq = 0.0 if alpha == 0 else alpha * math.log(q)
    return (1.0 - alpha / 2.0) * math.log1p(p * alpha) + lq


def q_curve(p, alpha):
    """The increasing map ``alpha -> sqrt(p alpha + 1) exp{(p alpha - 2p) / (2(p alpha + 1))}``."""
    return math.exp(log_q_curve(p, alpha))


def log_q_curve(p, alpha):
    return 0.5 * math.log1p(p * alpha) + 0.5 * (p * alpha - 2 * p) / (p * alpha + 1)


def critical_interval(p):
    """Image ``[e^{-p}, sqrt(p+1) e^{-p/(2(p+1))}]`` of ``q_curve`` over ``[0, 1]``."""
    return math.exp(-p), q_curve(p, 1.0)


def check_B_alpha(p, q):
    """Maximizer of ``g_p`` over ``[0, 1]`` for the ratio ``q = a_2 / a_p``."""
    lo, hi = critical_interval(p)
    if q <= lo:
        return 0.0
    if q >= hi:
        return 1.0
    lq = math.log(q)
    return brentq(lambda a: log_q_curve(p, a) - lq, 0.0, 1.0, xtol=1e-15, rtol=1e-15)


def check_B(q: BoundQuery):
    """``max_alpha a_p g_p(alpha)``; returns ``(value, argmax_alpha)``.

    The maximizer is found from the sign of ``g_p' = g_p log(q / q_curve)``:
    it is the root of ``q_curve(alpha) = q`` when q lies in the critical
    interval, and an endpoint otherwise.
    """
    if q.a_p == 0:
        return math.sqrt(q.p + 1.0) * q.a_2, 1.0
    if q.a_2 == 0:
        return q.a_p, 0.0
    alpha = check_B_alpha(q.p, q.q)
    return q.a_p * math.exp(log_g(q.p, alpha, q.q)), alpha


def check_B_bruteforce(q: BoundQuery, points=1_000_001):
    """Dense-grid maximization of ``a_p g_p``; the independent oracle for :func:`check_B`."""
    import numpy as np

    alpha = np.linspace(0.0, 1.0, points)
    lg = (1.0 - alpha / 2.0) * np.log1p(q.p * alpha) + alpha * math.log(q.q)
    k = int(np.argmax(lg))
    return q.a_p * math.exp(lg[k]), float(alpha[k])


def star_B(q: BoundQuery) -> float:
    if q.a_2 == 0:
        return q.a_p
    return q.a_p + math.sqrt(q.p) * q.a_2 + q.p * q.a_p / math.log(2.0 + math.sqrt(q.p) * q.a_p / q.a_2)


def c_p_solve(p) -> float:
    """Root of ``c ln c = 2p`` on ``[1, inf)``, i.e. ``sqrt(c) = e^{p/c}``."""
    if not p > 0:
        raise ValueError("p must be positive")
    hi = max(2.0 * p, math.e)
    while hi * math.log(hi) < 2 * p:
        hi *= 2
    return brentq(lambda c: c * math.log(c) - 2 * p, 1.0, hi, xtol=1e-14, rtol=1e-14)


def z_alpha_solve(p, alpha) -> float:
    """Root ``z`` in ``[1, p]`` of ``sqrt(z) e^{p/z} = e^{p/alpha}``; requires ``1 <= alpha <= p/ln(ep)``."""
    amax = p / math.log(math.e * p)
    if not 1.0 <= alpha <= amax * (1 + 1e-15):
        raise ValueError(f"alpha={alpha} outside [1, {amax}]")
    target = p / alpha

    def h(z):
        return 0.5 * math.log(z) + p / z - target

    if h(1.0) <= 0:
        return 1.0
    if h(p) >= 0:
        return p
    return brentq(h, 1.0, p, xtol=1e-14, rtol=1e-15)


def chung_bound(p, n, a_p, D=1.0) -> float:
    """Chung-type order ``sqrt(p ^ n) n^{(p-2)/(2p)} D a_p`` with ``a_p = ||S_p||_p``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return math.sqrt(min(p, n)) * n ** ((p - 2) / (2 * p)) * D * a_p


def cond_symmetric_moment_bound(p, D, s2_norm) -> float:
    """``sqrt(p) D ||S_2||_p`` for conditionally symmetric increments."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return math.sqrt(p) * D * s2_norm


def with_proof_constant(value) -> float:
    return PROOF_CONSTANT * value


def independent_sum_bound(q: BoundQuery, c, double_dstar=False) -> float:
    """Spectrum value for independent sums (D = 1).

    ``double_dstar`` doubles ``a_p``, the price of the norm-concentration
    martingale whose increments are bounded by ``||d_j|| + E||d_j||``.
    """
    a_p = 2 * q.a_p if double_dstar else q.a_p
    return spectrum_term(BoundQuery(q.p, a_p, q.a_2), c).value


def minimality_query(p, c, a_p=1.0):
    """The ratio ``a_2 / a_p = sqrt(c) e^{-p/c}`` at which the two spectrum terms balance."""
    return BoundQuery(p, a_p, a_p * math.sqrt(c) * math.exp(-p / c))


def g_value(p, alpha, a_p, a_2):
    """``a_p g_p(alpha)`` for the given pair."""
    return a_p * math.exp(log_g(p, alpha, a_2 / a_p))



def minimality_ratio(p, c) -> float:
    """``spectrum_term(q, c) / check_B(q)`` at the balancing ratio of :func:`minimality_query`.

    Small values show that the c-th member of the spectrum is nearly optimal
    for some pair ``(a_p, a_2)``, so no member can be dropped.
    """
    q = minimality_query(p, c)
    return spectrum_term(q, c).value / check_B(q)[0]


def curve_ratio(p, alpha) -> float:
    """``hat_B / (a_p g_p(alpha))`` at ``q = q_curve(p, alpha)``, where alpha maximizes ``g_p``."""
    q = BoundQuery(p, 1.0, q_curve(p, alpha))
    return hat_B(q)[0] / g_value(p, alpha, q.a_p, q.a_2)
