"""Finite-dimensional normed spaces and their 2-smoothness constants.

A space is (2, D)-smooth when

    ||x + y||^2 + ||x - y||^2 <= 2 ||x||^2 + 2 D^2 ||y||^2

for every pair x, y. Euclidean space has D = 1 and l^p (p >= 2) has
D = sqrt(p - 1); both constants are sharp once the dimension is at least 2.
The l^1 and l^inf norms are carried too, because the norm-concentration
checks in :mod:`martbounds.simulator` work in arbitrary normed spaces, but
they have no smoothness constant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

KINDS = ("euclidean", "lp", "l1", "linf")
SLACK_RTOL = 1e-9


@dataclass(frozen=True)
class SpaceSpec:
    kind: str
    dim: int
    p: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError("dimension must be a positive integer")
        if self.kind == "lp":
            if self.p is None or not self.p >= 2:
                raise ValueError("lp spaces need exponent p >= 2")
        elif self.p is not None:
            raise ValueError(f"{self.kind} space takes no exponent")

    @classmethod
    def euclidean(cls, dim):
        return cls("euclidean", dim)

    @classmethod
    def lp(cls, p, dim):
        return cls("lp", dim, float(p))

    @property
    def two_smooth(self):
        return self.kind in ("euclidean", "lp")

    def to_dict(self):
        out = {"kind": self.kind}
        if self.p is not None:
            out["p"] = self.p
        out["dim"] = self.dim
        return out

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        p = d.get("p")
        return cls(d["kind"], int(d["dim"]), None if p is None else float(p))

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


@dataclass
class SmoothnessReport:
    estimated_D: float
    samples_checked: int
    worst_violation: float
    witness_pair: tuple
    violations: int = 0


def _check_shape(space, v):
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != space.dim:
        raise ValueError(f"vector of length {v.shape[-1]} in a {space.dim}-dimensional space")
    return v


def _norms(space, v):
    """Row-wise norms of an array whose last axis lives in ``space``."""
    a = np.abs(v)
    if space.kind == "euclidean":
        return np.sqrt(np.sum(a * a, axis=-1))
    if space.kind == "l1":
        return np.sum(a, axis=-1)
    if space.kind == "linf":
        return np.max(a, axis=-1)
    # scale by the max entry so large p does not overflow
    m = np.max(a, axis=-1)
    safe = np.where(m > 0, m, 1.0)
    r = np.sum((a / safe[..., None]) ** space.p, axis=-1) ** (1.0 / space.p)
    return np.where(m > 0, m * r, 0.0)


def norm(space: SpaceSpec, v) -> float:
    v = _check_shape(space, v)
    if v.ndim != 1:
        raise ValueError("norm expects a single vector")
    return float(_norms(space, v))


def norms(space: SpaceSpec, v):
    """Vectorized norm over the last axis."""
    return _norms(space, _check_shape(space, v))


def smoothness_constant(space: SpaceSpec) -> float:
    if space.kind == "euclidean":
        return 1.0
    if space.kind == "lp":
        return math.sqrt(space.p - 1.0)
    raise ValueError(f"{space.kind} is not a 2-smooth space")


def check_two_smooth(space: SpaceSpec, D, x, y):
    """Slack ``2||x||^2 + 2D^2||y||^2 - ||x+y||^2 - ||x-y||^2`` (vectorized over rows).

    Nonnegative slack means the smoothness inequality holds for the pair.
    """
    x = _check_shape(space, x)
    y = _check_shape(space, y)
    nx = _norms(space, x)
    ny = _norms(space, y)
    slack = 2 * nx**2 + 2 * D**2 * ny**2 - _norms(space, x + y) ** 2 - _norms(space, x - y) ** 2
    return float(slack) if np.ndim(slack) == 0 else slack


def slack_tolerance(space, x, y):
    """Floating-point allowance for :func:`check_two_smooth` on the given pairs."""
    x = _check_shape(space, x)
    y = _check_shape(space, y)
    return SLACK_RTOL * np.maximum(_norms(space, x), _norms(space, y)) ** 2


def witness_pairs(space: SpaceSpec, scales=(1e-1, 1e-2, 1e-3, 1e-4)):
    """Pairs along which the l^p smoothness constant is attained in the limit.

    x is the all-ones vector on the first 2*floor(d/2) coordinates and y a
    sign-alternating vector there, scaled toward zero. At these points the
    second directional derivative of ||.||^2 equals 2(p-1)||y||^2.
    """
    d = space.dim
    k = 2 * (d // 2)
    if k == 0:
        return np.zeros((0, d)), np.zeros((0, d))
    x = np.zeros(d)
    x[:k] = 1.0
    v = np.zeros(d)
    v[:k] = np.tile([1.0, -1.0], k // 2)
    xs = np.repeat(x[None, :], len(scales), axis=0)
    ys = np.array([s * v for s in scales])
    return xs, ys


def _ratio(space, x, y):
    ny2 = _norms(space, y) ** 2
    num = _norms(space, x + y) ** 2 + _norms(space, x - y) ** 2 - 2 * _norms(space, x) ** 2
    return np.where(ny2 > 0, num / (2 * np.where(ny2 > 0, ny2, 1.0)), 0.0)


def estimate_smoothness(space: SpaceSpec, sample_count: int, seed: int, chunk: int = 100_000):
    """Estimate D from random Gaussian pairs plus the deterministic witness family.

    ``worst_violation`` is the largest normalized shortfall
    ``-slack / max(||x||, ||y||)^2`` against the theoretical constant; it is
    ``<= 0`` when no sampled pair violates the inequality. ``violations``
    counts pairs whose shortfall exceeds the floating-point allowance
    ``SLACK_RTOL``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    D = smoothness_constant(space)
    rng = np.random.default_rng(seed)
    best, best_pair = -np.inf, None
    worst = -np.inf
    count = 0
    done = 0
    while done < sample_count:
        b = min(chunk, sample_count - done)
        x = rng.standard_normal((b, space.dim))
        y = rng.standard_normal((b, space.dim))
        best, best_pair, worst, k = _absorb(space, D, x, y, best, best_pair, worst)
        count += k
        done += b
    wx, wy = witness_pairs(space)
    if len(wx):
        best, best_pair, worst, k = _absorb(space, D, wx, wy, best, best_pair, worst)
        count += k
    return SmoothnessReport(
        estimated_D=math.sqrt(max(best, 0.0)),
        samples_checked=sample_count + len(wx),
        worst_violation=float(worst),
        witness_pair=best_pair,
        violations=count,
    )


def _absorb(space, D, x, y, best, best_pair, worst):
    r = _ratio(space, x, y)
    k = int(np.argmax(r))
    if r[k] > best:
        best, best_pair = float(r[k]), (x[k].copy(), y[k].copy())
    scale = np.maximum(_norms(space, x), _norms(space, y)) ** 2
    viol = -check_two_smooth(space, D, x, y) / np.where(scale > 0, scale, 1.0)
    worst = max(worst, float(np.max(viol)))
    return best, best_pair, worst, int(np.count_nonzero(viol > SLACK_RTOL))
