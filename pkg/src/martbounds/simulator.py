"""Monte Carlo and exact-enumeration checks of the martingale bounds.

Paths are generated in fixed-size blocks of replicas. Block ``k`` draws from
its own Philox stream keyed by ``(seed, k)``, so results do not depend on how
many workers run the blocks or in which order they finish.

Every increment is a real scalar times a unit vector (a fixed axis, a
prescribed axis per step, or a fresh random direction), so ``||d_j||`` is the
absolute value of the scalar and the predictable quadratic characteristic
``s_2`` is known in closed form for each built-in family.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta as beta_dist

from martbounds import tail_bounds
from martbounds.moment_bounds import BoundQuery, chung_bound, hat_B, with_proof_constant
from martbounds.spaces import SpaceSpec, norms, smoothness_constant

FAMILIES = ("independent_discrete", "rademacher", "two_point", "cond_symmetric_scaled", "supermartingale_drift")
DIRECTIONS = ("fixed", "random", "axis_list")
THEOREMS = ("bennett", "bernstein", "bounded_increment", "cond_symmetric")
BLOCK = 8192
CONFIDENCE = 0.99
BOOTSTRAP_RESAMPLES = 1000
MEAN_TOL = 1e-12
ENUMERATION_LIMIT = 10**6
ARITH_SLACK = 1e-12

# spawn-key prefixes separating the replica streams from the bootstrap streams
_PATH_STREAM = 0
_BOOT_STREAM = 1


@dataclass(frozen=True)
class Increment:
    """Finite-support law of a real increment."""

    values: tuple
    probs: tuple

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise ValueError("values and probs must be nonempty and of equal length")
        if any(p < 0 for p in self.probs) or abs(sum(self.probs) - 1.0) > 1e-12:
            raise ValueError("probs must be nonnegative and sum to 1")

    @property
    def mean(self):
        return float(np.dot(self.values, self.probs))

    @property
    def second_moment(self):
        return float(np.dot(np.square(self.values), self.probs))

    @property
    def sup(self):
        return max(abs(v) for v, p in zip(self.values, self.probs) if p > 0)

    @property
    def sup_positive(self):
        return max(v for v, p in zip(self.values, self.probs) if p > 0)

    @property
    def symmetric(self):
        law = {}
        for v, p in zip(self.values, self.probs):
            law[v] = law.get(v, 0.0) + p
        return all(abs(law.get(-v, 0.0) - p) <= 1e-15 for v, p in law.items())

    def to_dict(self):
        return {"values": list(self.values), "probs": list(self.probs)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(float(v) for v in d["values"]), tuple(float(p) for p in d["probs"]))


@dataclass(frozen=True)
class MartingaleSpec:
    family: str
    space: SpaceSpec
    n: int
    direction: str = "fixed"
    axis: int = 0
    axes: tuple = ()
    increments: tuple = ()  # one Increment shared by all steps, or one per step
    u: float = 1.0
    q: float = 1.0
    drift: tuple = ()  # nonnegative mu_j, subtracted from step j

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction rule {self.direction!r}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("horizon n must be a positive integer")
        if not 0 <= self.axis < self.space.dim:
            raise ValueError("axis out of range")
        if self.direction == "axis_list":
            if len(self.axes) != self.n or not all(0 <= a < self.space.dim for a in self.axes):
                raise ValueError("axis_list needs one valid axis per step")
        if self.family in ("independent_discrete", "supermartingale_drift"):
            if len(self.increments) not in (1, self.n):
                raise ValueError("give one increment law or one per step")
            for inc in self.increments:
                if abs(inc.mean) > MEAN_TOL * max(1.0, inc.sup):
                    raise ValueError(f"increment law has mean {inc.mean!r}, expected 0")
        if self.family == "supermartingale_drift":
            if self.space.dim != 1:
                raise ValueError("supermartingales are real valued")
            if len(self.drift) not in (1, self.n) or any(m < 0 for m in self.drift):
                raise ValueError("drift must be nonnegative, one value or one per step")
        if not self.u > 0:
            raise ValueError("u must be positive")
        if not 0 < self.q <= 1:
            raise ValueError("q must lie in (0, 1]")

    # -- constructors -----------------------------------------------------

    @classmethod
    def rademacher(cls, n, u=1.0, space=None):
        return cls("rademacher", space or SpaceSpec.euclidean(1), int(n), u=float(u))

    @classmethod
    def two_point(cls, n, u, q, space=None):
        return cls("two_point", space or SpaceSpec.euclidean(1), int(n), u=float(u), q=float(q))

    @classmethod
    def from_extremal(cls, spec, space=None):
        return cls.two_point(spec.n, spec.u, spec.increment.q, space)

    @classmethod
    def independent_discrete(cls, laws, n, space=None, direction="fixed", axes=()):
        laws = tuple(laws) if not isinstance(laws, Increment) else (laws,)
        return cls("independent_discrete", space or SpaceSpec.euclidean(1), int(n), direction, axes=tuple(axes),
                   increments=laws)

    @classmethod
    def cond_symmetric_scaled(cls, n, u=1.0, space=None, direction="random"):
        return cls("cond_symmetric_scaled", space or SpaceSpec.euclidean(1), int(n), direction, u=float(u))

    @classmethod
    def supermartingale_drift(cls, laws, drift, n):
        laws = tuple(laws) if not isinstance(laws, Increment) else (laws,)
        drift = tuple(drift) if np.ndim(drift) else (float(drift),)
        return cls("supermartingale_drift", SpaceSpec.euclidean(1), int(n), increments=laws, drift=drift)

    # -- derived quantities -----------------------------------------------

    @property
    def real_valued(self):
        return self.space.dim == 1

    @property
    def is_martingale(self):
        return self.family != "supermartingale_drift"

    @property
    def D(self):
        return smoothness_constant(self.space) if self.space.two_smooth else math.nan

    @property
    def conditionally_symmetric(self):
        if not self.is_martingale:
            return False
        if self.family in ("rademacher", "two_point", "cond_symmetric_scaled") or self.direction == "random":
            return True
        return all(inc.symmetric for inc in self.increments)

    def law(self, j):
        return self.increments[j if len(self.increments) > 1 else 0]

    def mu(self, j):
        return self.drift[j if len(self.drift) > 1 else 0] if self.drift else 0.0

    def step_sup(self, j):
        """``||d_j||_inf``."""
        if self.family == "rademacher" or self.family == "two_point":
            return self.u
        if self.family == "cond_symmetric_scaled":
            # the running maximum is at least u after the first step
            return self.u if j == 0 else self.u / (1.0 + self.u)
        if self.family == "supermartingale_drift":
            return max(abs(v - self.mu(j)) for v in self.law(j).values)
        return self.law(j).sup

    def step_sup_positive(self, j):
        """``||d_j^+||_inf`` for real specs."""
        if self.family == "supermartingale_drift":
            return self.law(j).sup_positive - self.mu(j)
        return self.step_sup(j)

    def step_variance(self, j):
        """``E_{j-1} ||d_j||^2`` for the families where it is deterministic."""
        if self.family == "rademacher":
            return self.u**2
        if self.family == "two_point":
            return self.q * self.u**2
        if self.family == "cond_symmetric_scaled":
            raise ValueError("path dependent")
        return self.law(j).second_moment + self.mu(j) ** 2

    def s2_sup(self):
        """``||s_2||_inf``; for the scaled family also equal to ``||S_2||_inf``."""
        if self.family == "cond_symmetric_scaled":
            return math.sqrt(sum(self.step_sup(j) ** 2 for j in range(self.n)))
        return math.sqrt(sum(self.step_variance(j) for j in range(self.n)))

    def S2_sup(self):
        """``||S_2||_inf = (sum ||d_j||_inf^2)^{1/2}``."""
        return math.sqrt(sum(self.step_sup(j) ** 2 for j in range(self.n)))

    def to_dict(self):
        out = {"family": self.family, "space": self.space.to_dict(), "n": self.n, "direction": self.direction}
        if self.direction == "fixed":
            out["axis"] = self.axis
        if self.direction == "axis_list":
            out["axes"] = list(self.axes)
        if self.increments:
            out["increments"] = [inc.to_dict() for inc in self.increments]
        if self.family in ("rademacher", "two_point", "cond_symmetric_scaled"):
            out["u"] = self.u
        if self.family == "two_point":
            out["q"] = self.q
        if self.drift:
            out["drift"] = list(self.drift)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d):
        return cls(
            family=d["family"],
            space=SpaceSpec.from_dict(d.get("space", {"kind": "euclidean", "dim": 1})),
            n=int(d["n"]),
            direction=d.get("direction", "fixed"),
            axis=int(d.get("axis", 0)),
            axes=tuple(int(a) for a in d.get("axes", ())),
            increments=tuple(Increment.from_dict(x) for x in d.get("increments", ())),
            u=float(d.get("u", 1.0)),
            q=float(d.get("q", 1.0)),
            drift=tuple(float(x) for x in d.get("drift", ())),
        )

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


# ---------------------------------------------------------------------------
# Simulation


@dataclass
class PathStatistics:
    """Per-replica path functionals (arrays of length ``replicas``)."""

    f_star: np.ndarray
    final_norm: np.ndarray
    d_star: np.ndarray
    s2: np.ndarray
    S2: np.ndarray
    Sp: np.ndarray
    p: float
    f_plus_star: np.ndarray | None = None
    d_plus_star: np.ndarray | None = None
    final_value: np.ndarray | None = None

    def __len__(self):
        return len(self.f_star)

    @classmethod
    def concat(cls, parts):
        def cat(name):
            vals = [getattr(x, name) for x in parts]
            return None if vals[0] is None else np.concatenate(vals)

        names = ("f_star", "final_norm", "d_star", "s2", "S2", "Sp", "f_plus_star", "d_plus_star", "final_value")
        return cls(p=parts[0].p, **{k: cat(k) for k in names})


def _block_rng(seed, block):
    ss = np.random.SeedSequence(int(seed), spawn_key=(_PATH_STREAM, int(block)))
    return np.random.Generator(np.random.Philox(ss))


def _draw_law(rng, law, size):
    cdf = np.cumsum(law.probs)
    idx = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
    return np.asarray(law.values)[np.minimum(idx, len(law.values) - 1)]


def _directions(spec, rng, j, b):
    """Unit vectors (in the space norm) for step j, shape ``(b, dim)`` or ``(dim,)``."""
    dim = spec.space.dim
    if spec.direction == "random":
        g = rng.standard_normal((b, dim))
        return g / norms(spec.space, g)[:, None]
    e = np.zeros(dim)
    e[spec.axis if spec.direction == "fixed" else spec.axes[j]] = 1.0
    return e


def _simulate_block(spec, b, rng, p):
    n, dim = spec.n, spec.space.dim
    f = np.zeros((b, dim))
    f_star = np.zeros(b)
    d_star = np.zeros(b)
    sum2 = np.zeros(b)
    sump = np.zeros(b)
    var_sum = np.zeros(b)
    real = spec.real_valued
    f_plus = np.zeros(b) if real else None
    d_plus = np.full(b, -np.inf) if real else None
    for j in range(n):
        if spec.family == "rademacher":
            xi = spec.u * (2.0 * (rng.random(b) < 0.5) - 1.0)
            var_sum += spec.u**2
        elif spec.family == "two_point":
            w = rng.random(b)
            xi = np.where(w < spec.q / 2, spec.u, np.where(w < spec.q, -spec.u, 0.0))
            var_sum += spec.q * spec.u**2
        elif spec.family == "cond_symmetric_scaled":
            mag = spec.u / (1.0 + f_star)
            xi = mag * (2.0 * (rng.random(b) < 0.5) - 1.0)
            var_sum += mag**2
        else:
            xi = _draw_law(rng, spec.law(j), b) - spec.mu(j)
            var_sum += spec.step_variance(j)
        e = _directions(spec, rng, j, b)
        f += xi[:, None] * e
        nf = norms(spec.space, f)
        np.maximum(f_star, nf, out=f_star)
        a = np.abs(xi)
        np.maximum(d_star, a, out=d_star)
        sum2 += a * a
        sump += a**p
        if real:
            np.maximum(f_plus, f[:, 0], out=f_plus)
            np.maximum(d_plus, xi, out=d_plus)
    return PathStatistics(
        f_star=f_star,
        final_norm=norms(spec.space, f),
        d_star=d_star,
        s2=np.sqrt(var_sum),
        S2=np.sqrt(sum2),
        Sp=sump ** (1.0 / p),
        p=float(p),
        f_plus_star=f_plus,
        d_plus_star=d_plus,
        final_value=f[:, 0].copy() if real else None,
    )


def simulate(spec: MartingaleSpec, replicas: int, seed: int, p: float = 4.0, workers: int = 1) -> PathStatistics:
    """Simulate ``replicas`` independent paths; deterministic in ``(spec, replicas, seed)``."""
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    sizes = [min(BLOCK, replicas - k * BLOCK) for k in range(-(-replicas // BLOCK))]

    def run(k):
        return _simulate_block(spec, sizes[k], _block_rng(seed, k), p)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(k) for k in range(len(sizes))]
    return PathStatistics.concat(parts)


# ---------------------------------------------------------------------------
# Estimation


@dataclass
class Estimate:
    value: float
    lower: float
    upper: float
    count: int | None = None
    replicas: int | None = None

    def to_dict(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


def clopper_pearson(k, n, confidence=CONFIDENCE):
    alpha = 1.0 - confidence
    lo = 0.0 if k == 0 else float(beta_dist.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(beta_dist.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def estimate_tail(samples, r, confidence=CONFIDENCE) -> Estimate:
    """``Pr(X >= r)`` with an exact two-sided binomial interval."""
    x = np.asarray(samples)
    if x.size == 0:
        raise ValueError("no samples")
    k = int(np.count_nonzero(x >= r))
    lo, hi = clopper_pearson(k, x.size, confidence)
    return Estimate(k / x.size, lo, hi, k, int(x.size))


def estimate_event(mask, confidence=CONFIDENCE) -> Estimate:
    mask = np.asarray(mask, dtype=bool)
    k = int(np.count_nonzero(mask))
    lo, hi = clopper_pearson(k, mask.size, confidence)
    return Estimate(k / mask.size, lo, hi, k, int(mask.size))


def _boot_rng(seed, tag):
    ss = np.random.SeedSequence(int(seed), spawn_key=(_BOOT_STREAM, int(tag)))
    return np.random.Generator(np.random.Philox(ss))


def estimate_norm(samples, p, seed, tag=0, resamples=BOOTSTRAP_RESAMPLES, confidence=CONFIDENCE) -> Estimate:
    """``(E X^p)^{1/p}`` with a percentile bootstrap interval."""
    x = np.abs(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("no samples")
    # rescale before powering so large p does not overflow
    scale = float(np.max(x)) or 1.0
    v = (x / scale) ** p
    rng = _boot_rng(seed, tag)
    means = np.empty(resamples)
    chunk = max(1, 4_000_000 // x.size)
    for start in range(0, resamples, chunk):
        c = min(chunk, resamples - start)
        idx = rng.integers(0, x.size, size=(c, x.size))
        means[start : start + c] = v[idx].mean(axis=1)
    alpha = 1.0 - confidence
    lo, hi = np.quantile(means, [alpha / 2, 1 - alpha / 2])
    return Estimate(scale * float(v.mean()) ** (1 / p), scale * lo ** (1 / p), scale * hi ** (1 / p),
                    replicas=int(x.size))


# ---------------------------------------------------------------------------
# Reports


@dataclass
class SimulationReport:
    kind: str
    replicas: int
    seed: int
    spec: dict
    statistics: dict = field(default_factory=dict)
    comparisons: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c["verdict"] == "pass" for c in self.comparisons)

    def to_dict(self):
        return {
            "kind": self.kind,
            "replicas": self.replicas,
            "seed": self.seed,
            "spec": self.spec,
            "parameters": self.parameters,
            "statistics": self.statistics,
            "comparisons": self.comparisons,
            "passed": self.passed,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


# ---------------------------------------------------------------------------
# Tail bounds


@dataclass(frozen=True)
class TailHypotheses:
    theorem: str
    two_sided: bool
    constants: dict

    def bound(self, r):
        c, K = self.constants, self.two_sided
        if self.theorem == "bennett":
            return tail_bounds.bennett_tail(r, c["a"], c["b"], K).value
        if self.theorem == "bernstein":
            return tail_bounds.bernstein_tail(r, c["B"], c["Gamma"], K).value
        if self.theorem == "bounded_increment":
            return tail_bounds.bounded_increment_tail(r, c["b_star"], c["D"], K).value
        return tail_bounds.conditionally_symmetric_tail(r, c["b"], c["D"], K).value


def applicable_theorems(spec: MartingaleSpec):
    if not spec.is_martingale:
        return ["bennett"]
    out = ["bennett", "bernstein", "bounded_increment"]
    if spec.conditionally_symmetric:
        out.append("cond_symmetric")
    return out


def tail_hypotheses(spec: MartingaleSpec, theorem: str) -> TailHypotheses:
    """Constants of the selected tail bound, computed in closed form from ``spec``."""
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem {theorem!r}")
    if theorem not in applicable_theorems(spec):
        raise ValueError(f"spec of family {spec.family!r} does not satisfy the hypotheses of {theorem!r}")
    if not spec.is_martingale:
        a = max(spec.step_sup_positive(j) for j in range(spec.n))
        if a <= 0:
            raise ValueError("increments must take positive values")
        return TailHypotheses("bennett", False, {"a": a, "b": spec.s2_sup()})
    D = spec.D
    if math.isnan(D):
        raise ValueError("tail bounds need a 2-smooth space")
    a = max(spec.step_sup(j) for j in range(spec.n))
    if theorem == "bennett":
        return TailHypotheses(theorem, True, {"a": a, "b": D * spec.s2_sup()})
    if theorem == "bernstein":
        # |d| <= a gives E|d|^m <= (m!/2) (a/3)^{m-2} E d^2
        return TailHypotheses(theorem, True, {"B": D * spec.s2_sup(), "Gamma": a / 3.0})
    if theorem == "bounded_increment":
        return TailHypotheses(theorem, True, {"b_star": spec.S2_sup(), "D": D})
    return TailHypotheses(theorem, True, {"b": spec.S2_sup(), "D": D})


def default_r_grid(hyp: TailHypotheses, replicas, points=20):
    """Points where the bound falls from 0.99 to ``20 / replicas``.

    Below ``20 / replicas`` a Clopper-Pearson interval cannot resolve the
    bound, so the grid stops there.
    """
    hi_target = 0.99
    lo_target = min(0.5, 20.0 / replicas)

    def invert(level):
        lo, hi = 0.0, 1.0
        while hyp.bound(hi) > level:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if hyp.bound(mid) > level:
                lo = mid
            else:
                hi = mid
        return hi

    return np.linspace(invert(hi_target), invert(lo_target), points)


def verify_tail_bounds(spec, theorem="auto", r_grid=None, replicas=100_000, seed=0, stats=None):
    """Compare empirical tails of ``f*`` (or ``f+*``) with the selected bounds."""
    theorems = applicable_theorems(spec) if theorem == "auto" else [theorem]
    hyps = [tail_hypotheses(spec, t) for t in theorems]
    stats = stats if stats is not None else simulate(spec, replicas, seed)
    sample = stats.f_star if spec.is_martingale else stats.f_plus_star
    report = SimulationReport("tail", len(stats), seed, spec.to_dict(), parameters={"theorems": theorems})
    for hyp in hyps:
        grid = default_r_grid(hyp, len(stats)) if r_grid is None else np.asarray(r_grid, dtype=float)
        for r in grid:
            est = estimate_tail(sample, float(r))
            bound = hyp.bound(float(r))
            ok = bound >= 1.0 or est.upper <= bound
            report.comparisons.append({
                "theorem": hyp.theorem,
                "two_sided": hyp.two_sided,
                "constants": hyp.constants,
                "r": float(r),
                "bound": bound,
                "informative": bound < 1.0,
                "estimate": est.value,
                "ci_upper": est.upper,
                "verdict": "pass" if ok else "fail",
            })
    return report


# ---------------------------------------------------------------------------
# Moment bounds


def verify_moment_bounds(spec, p=4.0, replicas=100_000, seed=0, stats=None):
    """Empirical ``||f*||_p`` against ``60 hat_B`` and, for symmetric increments, ``sqrt(p) D ||S_2||_p``.

    A comparison passes unless the lower confidence limit of the empirical
    norm exceeds the bound (evaluated at the upper confidence limits of its
    inputs, where it has any).
    """
    stats = stats if stats is not None else simulate(spec, replicas, seed, p=p)
    report = SimulationReport("moment", len(stats), seed, spec.to_dict(), parameters={"p": p})
    D = spec.D if spec.is_martingale else 1.0
    f = stats.f_star if spec.is_martingale else stats.f_plus_star
    d = stats.d_star if spec.is_martingale else np.maximum(stats.d_plus_star, 0.0)
    f_norm = estimate_norm(f, p, seed, tag=0)
    d_norm = estimate_norm(d, p, seed, tag=1)
    s2_norm = estimate_norm(stats.s2, p, seed, tag=2)
    report.statistics.update({"f_star_p": f_norm.to_dict(), "d_star_p": d_norm.to_dict(), "s2_p": s2_norm.to_dict()})

    hat_upper, c = hat_B(BoundQuery(p, d_norm.upper, D * s2_norm.upper))
    bound = with_proof_constant(hat_upper)
    report.comparisons.append({
        "bound_name": "spectrum_min_times_60",
        "bound": bound,
        "argmin_c": c,
        "estimate": f_norm.value,
        "ci_lower": f_norm.lower,
        "ratio": f_norm.value / bound,
        "verdict": "pass" if f_norm.lower <= bound else "fail",
    })
    if spec.conditionally_symmetric:
        S2_norm = estimate_norm(stats.S2, p, seed, tag=3)
        report.statistics["S2_p"] = S2_norm.to_dict()
        bound = math.sqrt(p) * D * S2_norm.upper
        report.comparisons.append({
            "bound_name": "sqrt_p_D_S2",
            "bound": bound,
            "estimate": f_norm.value,
            "ci_lower": f_norm.lower,
            "ratio": f_norm.value / (math.sqrt(p) * D * S2_norm.value),
            "verdict": "pass" if f_norm.lower <= bound else "fail",
        })
    if spec.is_martingale:
        fn = estimate_norm(stats.final_norm, p, seed, tag=4)
        sp = estimate_norm(stats.Sp, p, seed, tag=5) if stats.p == p else None
        if sp is not None:
            report.statistics["chung_ratio"] = fn.value / chung_bound(p, spec.n, sp.value, D)
    return report


def verify_second_moment(spec, replicas=100_000, seed=0, stats=None):
    """``E||f_n||^2 <= D^2 E s_2^2`` with a normal-approximation interval on the left side."""
    stats = stats if stats is not None else simulate(spec, replicas, seed)
    x = stats.final_norm**2
    mean = float(x.mean())
    half = 2.5758293035489 * float(x.std(ddof=1)) / math.sqrt(x.size)
    bound = spec.D**2 * float(np.mean(stats.s2**2))
    report = SimulationReport("second_moment", len(stats), seed, spec.to_dict())
    report.comparisons.append({
        "bound_name": "D2_s2_squared",
        "bound": bound,
        "estimate": mean,
        "ci_lower": mean - half,
        "verdict": "pass" if mean - half <= bound else "fail",
    })
    return report


# ---------------------------------------------------------------------------
# Good-lambda inequality


def good_lambda_epsilon(beta, delta1, delta2, two_sided=True):
    """``K (e delta1^2 / (N delta2^2))^N`` with ``N = (beta - 1 - delta2) / delta2``."""
    if not beta - 1 - delta2 > 0 or delta1 <= 0 or delta2 <= 0:
        raise ValueError("need delta1, delta2 > 0 and beta - 1 - delta2 > 0")
    N = (beta - 1 - delta2) / delta2
    return (2.0 if two_sided else 1.0) * (math.e * delta1**2 / (N * delta2**2)) ** N


def good_lambda_check(spec, beta=3.0, delta1=0.1, delta2=0.5, lambda_grid=None, replicas=100_000, seed=0,
                      stats=None):
    """``Pr(f* > beta lam, w* <= lam) <= eps Pr(f* > lam)`` across a lambda grid.

    The verdict fails only when the lower confidence limit of the joint
    frequency exceeds ``eps`` times the upper limit of the single-event
    frequency.
    """
    if spec.is_martingale:
        if not spec.conditionally_symmetric:
            raise ValueError("the two-sided good-lambda inequality needs conditionally symmetric increments")
        two_sided = True
    else:
        two_sided = False
    eps = good_lambda_epsilon(beta, delta1, delta2, two_sided)
    stats = stats if stats is not None else simulate(spec, replicas, seed)
    if two_sided:
        f = stats.f_star
        w = np.maximum(stats.d_star / delta2, spec.D * stats.s2 / delta1)
    else:
        f = stats.f_plus_star
        w = np.maximum(stats.d_plus_star / delta2, stats.s2 / delta1)
    if lambda_grid is None:
        top = float(np.max(f)) if np.max(f) > 0 else 1.0
        lambda_grid = np.geomspace(top / 200.0, top * 1.1, 20)
    report = SimulationReport(
        "good_lambda", len(stats), seed, spec.to_dict(),
        parameters={"beta": beta, "delta1": delta1, "delta2": delta2, "epsilon": eps, "two_sided": two_sided},
    )
    for lam in lambda_grid:
        joint = estimate_event((f > beta * lam) & (w <= lam))
        single = estimate_event(f > lam)
        ok = eps >= 1.0 or joint.lower <= eps * single.upper
        report.comparisons.append({
            "lambda": float(lam),
            "joint": joint.to_dict(),
            "single": single.to_dict(),
            "epsilon": eps,
            "informative": eps < 1.0,
            "verdict": "pass" if ok else "fail",
        })
    return report


# ---------------------------------------------------------------------------
# Norm-concentration martingale by full enumeration


@dataclass(frozen=True)
class VectorLaw:
    """Finite-support law of a vector increment: rows of ``values`` with ``probs``."""

    values: np.ndarray
    probs: np.ndarray

    @classmethod
    def of(cls, values, probs):
        v = np.atleast_2d(np.asarray(values, dtype=float))
        if v.shape[0] == 1 and len(probs) > 1:
            v = v.T
        p = np.asarray(probs, dtype=float)
        if v.shape[0] != p.size or abs(p.sum() - 1) > 1e-12 or (p < 0).any():
            raise ValueError("bad vector law")
        return cls(v, p)

    def mean(self):
        return self.probs @ self.values


@dataclass
class YurinskiiReport:
    space: dict
    paths: int
    mean_norm: float
    abs_bound_holds: bool
    abs_bound_margin: float
    variance_bound_holds: bool
    variance_bound_margin: float
    pointwise_variance_holds: bool
    telescoping_error: float
    martingale_error: float
    zeta_n: np.ndarray = field(repr=False, default=None)
    f_n: np.ndarray = field(repr=False, default=None)

    @property
    def passed(self):
        return (
            self.abs_bound_holds
            and self.variance_bound_holds
            and self.telescoping_error <= ARITH_SLACK
            and self.martingale_error <= ARITH_SLACK
        )

    def to_dict(self):
        d = {k: v for k, v in self.__dict__.items() if k not in ("zeta_n", "f_n")}
        d["passed"] = self.passed
        return d


def yurinskii_check(space: SpaceSpec, increments, x) -> YurinskiiReport:
    """Enumerate every path of independent increments and test the norm-martingale bounds.

    With ``zeta_j = E_j||f_n + x|| - E||f_n + x||`` and ``xi_j = zeta_j - zeta_{j-1}``:

    * ``|xi_j| <= ||d_j|| + E||d_j||`` on every path,
    * ``E_{j-1} xi_j^2 <= E||d_j||^2`` on every history. The stronger
      pointwise form ``E_{j-1} xi_j^2 <= ||d_j||^2`` is reported separately,
      since it can fail whenever d_j may be small.
    """
    laws = [inc if isinstance(inc, VectorLaw) else VectorLaw.of(*inc) for inc in increments]
    n = len(laws)
    sizes = [law.probs.size for law in laws]
    if math.prod(sizes) > ENUMERATION_LIMIT:
        raise ValueError(f"{math.prod(sizes)} paths exceed the enumeration limit {ENUMERATION_LIMIT}")
    for law in laws:
        if law.values.shape[1] != space.dim:
            raise ValueError("increment dimension does not match the space")
        m = law.mean()
        if np.max(np.abs(m)) > MEAN_TOL * max(1.0, float(np.max(np.abs(law.values)))):
            raise ValueError("increments must have mean zero")
    x = np.asarray(x, dtype=float).reshape(space.dim)

    # f_n + x on the full product grid, shape sizes + (dim,)
    total = np.broadcast_to(x, tuple(sizes) + (space.dim,)).copy()
    for j, law in enumerate(laws):
        shape = [1] * n + [space.dim]
        shape[j] = sizes[j]
        total = total + law.values.reshape(shape)
    N = norms(space, total)
    fn = total - x

    # E_j N for j = n, n-1, ..., 0 by contracting the trailing axes
    cond = [None] * (n + 1)
    cond[n] = N
    for j in range(n, 0, -1):
        cond[j - 1] = np.tensordot(cond[j], laws[j - 1].probs, axes=([j - 1], [0]))
    EN = float(cond[0])
    zeta = [c - EN for c in cond]

    abs_ok, abs_margin = True, math.inf
    var_ok, var_margin = True, math.inf
    pointwise_ok = True
    mart_err = 0.0
    partial = np.asarray(zeta[0])  # zeta_0 = 0 by definition
    for j in range(1, n + 1):
        law = laws[j - 1]
        dn = norms(space, law.values)
        Ed, Ed2 = float(law.probs @ dn), float(law.probs @ dn**2)
        xi = zeta[j] - zeta[j - 1][..., None]
        partial = partial[..., None] + xi
        lim = (dn + Ed).reshape((1,) * (j - 1) + (-1,))
        slack = lim - np.abs(xi)
        abs_margin = min(abs_margin, float(slack.min()))
        abs_ok &= bool(slack.min() >= -ARITH_SLACK * max(1.0, float(lim.max())))
        cvar = np.tensordot(xi**2, law.probs, axes=([j - 1], [0]))
        var_margin = min(var_margin, Ed2 - float(np.max(cvar)))
        var_ok &= bool(np.max(cvar) <= Ed2 + ARITH_SLACK * max(1.0, Ed2))
        pointwise_ok &= bool(np.max(cvar) <= float(dn.min()) ** 2 + ARITH_SLACK)
        mart_err = max(mart_err, float(np.max(np.abs(np.tensordot(xi, law.probs, axes=([j - 1], [0]))))))
    tele = float(np.max(np.abs(partial - (N - EN))))
    return YurinskiiReport(
        space=space.to_dict(),
        paths=int(np.prod(sizes)),
        mean_norm=EN,
        abs_bound_holds=abs_ok,
        abs_bound_margin=abs_margin,
        variance_bound_holds=var_ok,
        variance_bound_margin=var_margin,
        pointwise_variance_holds=pointwise_ok,
        telescoping_error=tele,
        martingale_error=mart_err,
        zeta_n=zeta[n],
        f_n=fn,
    )


def yurinskii_limit_error(increments, shift=1e6):
    """Relative gap between ``|f_n + x| - E|f_n + x|`` and ``f_n`` on the real line at ``x = shift``."""
    rep = yurinskii_check(SpaceSpec.euclidean(1), increments, [shift])
    fn = rep.f_n[..., 0]
    return float(np.max(np.abs(rep.zeta_n - fn)) / max(np.max(np.abs(fn)), 1e-300))


def random_yurinskii_instance(space: SpaceSpec, rng, steps=(2, 4), support=(2, 4)):
    """A random zero-mean instance small enough to enumerate."""
    n = int(rng.integers(steps[0], steps[1] + 1))
    laws = []
    for _ in range(n):
        k = int(rng.integers(support[0], support[1] + 1))
        v = rng.standard_normal((k, space.dim)) * rng.exponential(1.0, (k, 1))
        p = rng.dirichlet(np.ones(k))
        v -= p @ v  # center
        laws.append(VectorLaw(v, p))
    x = rng.standard_normal(space.dim) * rng.choice([0.0, 0.5, 3.0])
    return laws, x


# ---------------------------------------------------------------------------
# Built-in specs


def builtin_specs(n=100):
    """The spec set used by the verification matrix."""
    from martbounds.constructions import build_extremal

    lp48 = SpaceSpec.lp(4, 8)
    walk = Increment((2.0, -1.0), (1 / 3, 2 / 3))
    return {
        "rademacher": MartingaleSpec.rademacher(n, 1.0),
        "two_point": MartingaleSpec.from_extremal(build_extremal(4.0, 1.0, 3.0, n)),
        "cond_symmetric_lp4": MartingaleSpec.cond_symmetric_scaled(n, 1.0, lp48, "random"),
        "discrete_lp4": MartingaleSpec.independent_discrete(walk, n, lp48, "random"),
        "supermartingale_drift": MartingaleSpec.supermartingale_drift(walk, 0.05, n),
    }


TAIL_MATRIX = (
    ("rademacher", "bounded_increment"),
    ("two_point", "bennett"),
    ("cond_symmetric_lp4", "cond_symmetric"),
    ("supermartingale_drift", "bennett"),
)
