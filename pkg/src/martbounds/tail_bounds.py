"""Exponential tail bounds for martingales in (2, D)-smooth spaces.

Every bound here is ``K * exp(-lambda r + psi(lambda))`` minimized over
lambda, where psi collects the conditional exponential-moment surpluses of
the increments. ``K = 2`` for the two-sided bounds on ``f*`` (norm of a
vector martingale) and ``K = 1`` for the one-sided bounds on ``f+*``
(real supermartingales); the one-sided formulas are the two-sided ones
with ``D = 1``. Values are reported uncapped, so a bound may exceed 1.

The one-sided Bennett form covers two hypothesis sets with the same
number: increments d_j <= a with predictable variance <= b^2, and the
centered form d_j = u_j - E_{j-1} u_j with |u_j| <= a and
sum E_{j-1} u_j^2 <= b^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from martbounds._numerics import golden_min


@dataclass
class TailBoundResult:
    value: float
    informative: bool
    lambda_used: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"value": self.value, "informative": self.informative, "lambda_used": self.lambda_used}
        out.update(self.extra)
        return out


@dataclass
class ExponentialMomentProfile:
    """Per-step surpluses e_j (already multiplied by D^2 where that applies)."""

    per_step_values: list

    def __post_init__(self):
        if any(e < 0 for e in self.per_step_values):
            raise ValueError("exponential-moment surpluses must be nonnegative")


def _result(value, lam=None, **extra):
    return TailBoundResult(value=value, informative=value < 1.0, lambda_used=lam, extra=extra)


def _lead(two_sided):
    return 2.0 if two_sided else 1.0


def generic_exponential_tail(lam, r, profile, two_sided=True):
    """Product and exponential forms of the basic supermartingale bound.

    ``value`` is the product form ``K e^{-lam r} prod(1 + e_j)``, which is never
    larger than the exponential form ``K exp(-lam r + sum e_j)``.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if r < 0:
        raise ValueError("r must be nonnegative")
    es = profile.per_step_values if isinstance(profile, ExponentialMomentProfile) else list(profile)
    K = _lead(two_sided)
    log_prod = sum(math.log1p(e) for e in es)
    product_form = K * math.exp(-lam * r + log_prod)
    exp_form = K * math.exp(-lam * r + sum(es))
    return _result(product_form, lam, exp_form=exp_form)


def bennett_tail(r, a, b, two_sided=True):
    """Bennett-Hoeffding type bound with increments bounded by ``a`` and ``D s_2 <= b``.

    Also returns the weaker closed form ``K (e b^2 / (r a))^{r/a}`` as ``weak_value``.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if r < 0:
        raise ValueError("r must be nonnegative")
    K = _lead(two_sided)
    x = r * a / b**2
    exponent = r / a - (r / a + b**2 / a**2) * math.log1p(x)
    value = K * math.exp(exponent)
    weak = K if r == 0 else K * _exp_or_inf((r / a) * (1.0 + math.log(b**2 / (r * a))))
    return _result(value, math.log1p(x) / a, weak_value=weak)


def bernstein_tail(r, B, Gamma, two_sided=True, exact_minimum=False):
    """Bernstein type bound under ``sum E_{j-1}||d_j||^m <= m! Gamma^{m-2} B^2 / (2 D^2)``.

    The default is the closed form ``K exp(-r^2 / (B^2 + B sqrt(B^2 + 2 Gamma r)))``.
    Minimizing ``-lam r + B^2 lam^2 / (2(1 - lam Gamma))`` over lambda actually
    gives the larger value ``K exp(-r^2 / (B^2 + Gamma r + B sqrt(B^2 + 2 Gamma r)))``;
    ``exact_minimum=True`` returns that instead. Both are in ``extra``.
    """
    if B <= 0 or Gamma <= 0:
        raise ValueError("B and Gamma must be positive")
    if r < 0:
        raise ValueError("r must be nonnegative")
    K = _lead(two_sided)
    root = math.sqrt(B**2 + 2 * Gamma * r)
    closed = K * math.exp(-(r**2) / (B**2 + B * root))
    minimum = K * math.exp(-(r**2) / (B**2 + Gamma * r + B * root))
    lam = (1.0 - B / root) / Gamma
    return _result(minimum if exact_minimum else closed, lam, closed_form=closed, chernoff_minimum=minimum)


def bounded_increment_tail(r, b_star, D, two_sided=True):
    """Hoeffding-Azuma type bound under ``sum ||d_j||_inf^2 <= b_star^2``."""
    if b_star <= 0 or D <= 0:
        raise ValueError("b_star and D must be positive")
    if r < 0:
        raise ValueError("r must be nonnegative")
    value = _lead(two_sided) * math.exp(-(r**2) / (2 * D**2 * b_star**2))
    return _result(value, r / (D**2 * b_star**2))


def conditionally_symmetric_tail(r, b, D, two_sided=True):
    """Bound for conditionally symmetric increments with ``||S_2||_inf <= b``."""
    if b <= 0 or D <= 0:
        raise ValueError("b and D must be positive")
    if r < 0:
        raise ValueError("r must be nonnegative")
    value = _lead(two_sided) * math.exp(-(r**2) / (2 * D**2 * b**2))
    return _result(value, r / (D**2 * b**2))


def bennett_psi(a, b):
    """Cumulative surplus ``(e^{lam a} - 1 - lam a) b^2 / a^2`` for increments bounded by ``a``."""

    def psi(lam):
        try:
            return math.expm1(lam * a) - lam * a if lam * a > 1e-3 else _small_exp_surplus(lam * a)
        except OverflowError:
            return math.inf

    return lambda lam: psi(lam) * b**2 / a**2


def _small_exp_surplus(x):
    # e^x - 1 - x by its series; avoids cancellation for tiny x
    return x * x / 2 * (1 + x / 3 * (1 + x / 4 * (1 + x / 5 * (1 + x / 6))))


def _exp_or_inf(x):
    return math.inf if x > 709.0 else math.exp(x)


def bernstein_psi(B, Gamma):
    """Cumulative surplus ``B^2 lam^2 / (2(1 - lam Gamma))``, infinite for ``lam >= 1/Gamma``."""

    def psi(lam):
        if lam * Gamma >= 1.0:
            return math.inf
        return B**2 * lam**2 / (2.0 * (1.0 - lam * Gamma))

    return psi


def optimize_lambda(r, psi, two_sided=True, lam_max=None, tol=1e-12):
    """Minimize ``-lam r + psi(lam)`` over ``lam >= 0``; return ``(lam, K exp(min))``.

    ``psi`` must be convex with ``psi(0) = 0``. Where psi stops being finite
    the domain edge is located by bisection and used as the search limit.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    K = _lead(two_sided)
    if r == 0:
        return 0.0, K

    def h(lam):
        v = psi(lam)
        if v is None or not math.isfinite(v):
            return math.inf
        return -lam * r + v

    if lam_max is None:
        lam_max = _find_upper(h)
    lam, val = golden_min(h, 0.0, lam_max, tol=tol)
    if not math.isfinite(val):
        raise ValueError("psi is not finite anywhere on the search interval")
    return lam, K * math.exp(min(val, 0.0))


def _find_upper(h):
    """Expand until ``h`` turns upward or stops being finite; return a search limit."""
    if not math.isfinite(h(1e-300)) and not math.isfinite(h(1e-12)):
        raise ValueError("psi is not finite anywhere near 0")
    lo, hi = 0.0, 1.0
    prev = h(0.0)
    for _ in range(2000):
        cur = h(hi)
        if not math.isfinite(cur):
            # bisect down to the edge of the finite domain
            a, b = lo, hi
            for _ in range(200):
                mid = 0.5 * (a + b)
                if math.isfinite(h(mid)):
                    a = mid
                else:
                    b = mid
            return a
        if cur > prev:
            return hi
        lo, prev, hi = hi, cur, 2.0 * hi
    raise ValueError("objective keeps decreasing; psi grows too slowly")
