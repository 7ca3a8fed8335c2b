"""Command-line entry point.

Every command writes JSON (or CSV for scans) that embeds the package
version, the parsed configuration and the seed. Exit codes: 0 when all
verdicts pass, 1 when some verdict fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from martbounds import __version__
from martbounds import exact_constants as ec
from martbounds import moment_bounds as mb
from martbounds import tail_bounds as tb
from martbounds.constructions import INFINITE, build_extremal, limit_construction
from martbounds.simulator import (
    MartingaleSpec,
    VectorLaw,
    builtin_specs,
    good_lambda_check,
    verify_moment_bounds,
    verify_second_moment,
    verify_tail_bounds,
    yurinskii_check,
)
from martbounds.spaces import SpaceSpec

SEED_ENV = "MARTBOUNDS_SEED"
DEFAULT_P_GRID = (2.5, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64)
DEFAULT_Q_POINTS = 41
HAT_CHECK_MAX = 8.0
STAR_CHECK_WINDOW = (1.0, 3.0)
B1980_CHECK_MAX = 64.0
MINIMALITY_MAX = 2 * math.e
FLOOR_MIN = 1.0 / 64.0
FLOOR_N = 10_000


@dataclass
class RunConfig:
    command: str
    options: dict
    seed: int | None = None
    out: str | None = None

    def header(self):
        return {"version": __version__, "command": self.command, "config": self.options, "seed": self.seed}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError as e:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from e


def _horizon(s):
    if s.lower() in ("inf", "infinite", "infinity"):
        return INFINITE
    n = int(s)
    if n < 1:
        raise argparse.ArgumentTypeError("n must be a positive integer or 'inf'")
    return n


def _floats(s):
    return [float(x) for x in s.split(",") if x.strip()]


def build_parser():
    p = _Parser(prog="martbounds", description="Martingale tail and moment bounds in 2-smooth spaces")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--out", help="write output here instead of stdout")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    bound = sub.add_parser("bound", help="evaluate a bound").add_subparsers(dest="which", parser_class=_Parser)
    t = bound.add_parser("tail", help="tail bound at r")
    t.add_argument("--theorem", required=True, choices=["bennett", "bernstein", "bounded_increment", "cond_symmetric"])
    t.add_argument("--r", type=float, required=True)
    t.add_argument("--a", type=float, help="increment bound (bennett)")
    t.add_argument("--b", type=float, help="variance bound (bennett) or ||S_2||_inf (cond_symmetric)")
    t.add_argument("--B", type=float, dest="B_", help="bernstein scale")
    t.add_argument("--gamma", type=float, help="bernstein moment growth")
    t.add_argument("--b-star", type=float, help="sum of squared increment bounds, square-rooted")
    t.add_argument("--D", type=float, default=1.0, help="smoothness constant")
    t.add_argument("--one-sided", action="store_true", help="supermartingale form (no factor 2)")
    m = bound.add_parser("moment", help="moment envelope")
    m.add_argument("--p", type=float, required=True)
    m.add_argument("--ap", type=float, required=True)
    m.add_argument("--a2", type=float, required=True)
    g = m.add_mutually_exclusive_group()
    g.add_argument("--c", type=float, help="single spectrum member")
    g.add_argument("--envelope", choices=["hat", "check", "star", "all"], default="all")

    const = sub.add_parser("constants", help="exact and optimized constants").add_subparsers(
        dest="which", parser_class=_Parser)
    c = const.add_parser("gamma")
    c.add_argument("--j", type=int, required=True)
    c.add_argument("--m", type=int, required=True)
    c = const.add_parser("burkholder")
    c.add_argument("--i", type=int, required=True, choices=[1, 2])
    c.add_argument("--p", type=float, required=True)
    c = const.add_parser("b1980")
    c.add_argument("--p", type=float, required=True)
    c.add_argument("--ap", type=float, required=True)
    c.add_argument("--a2", type=float, required=True)
    c.add_argument("--refine", action="store_true", help="optimize the weights b_i")

    cons = sub.add_parser("construct", help="extremal constructions").add_subparsers(
        dest="which", parser_class=_Parser)
    c = cons.add_parser("extremal")
    for name in ("p", "ap", "a2"):
        c.add_argument(f"--{name}", type=float, required=True)
    c.add_argument("--n", type=_horizon, required=True, help="positive integer or 'inf'")
    c = cons.add_parser("limit")
    for name in ("p", "ap", "a2"):
        c.add_argument(f"--{name}", type=float, required=True)

    s = sub.add_parser("simulate", help="Monte Carlo and enumeration checks")
    s.add_argument("--spec", required=True, help="JSON file, or builtin:<name>")
    s.add_argument("--replicas", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    s.add_argument("--verify", required=True, choices=["tail", "moment", "goodlambda", "yurinskii", "second"])
    s.add_argument("--theorem", default="auto")
    s.add_argument("--p", type=float, default=4.0)
    s.add_argument("--beta", type=float, default=3.0)
    s.add_argument("--delta1", type=float, default=0.1)
    s.add_argument("--delta2", type=float, default=0.5)
    s.add_argument("--workers", type=int, default=1)

    scan = sub.add_parser("scan", help="grid scans").add_subparsers(dest="which", parser_class=_Parser)
    for name in ("equivalence", "minimality", "floor"):
        c = scan.add_parser(name)
        c.add_argument("--p-grid", type=_floats, default=list(DEFAULT_P_GRID))
        c.add_argument("--q-points", type=int, default=DEFAULT_Q_POINTS)
        c.add_argument("--q-grid", type=_floats, default=None, help="explicit ratios a_2/a_p")
        c.add_argument("--format", choices=["csv", "json"], default="csv")
        c.add_argument("--summary", help="write the summary JSON here")
        if name == "floor":
            c.add_argument("--n", type=int, default=FLOOR_N, help="number of increments")
    return p


# ---------------------------------------------------------------------------
# Commands


def cmd_bound(args):
    if args.which == "tail":
        K = not args.one_sided
        need = {"bennett": ("a", "b"), "bernstein": ("B_", "gamma"), "bounded_increment": ("b_star",),
                "cond_symmetric": ("b",)}[args.theorem]
        missing = [n for n in need if getattr(args, n) is None]
        if missing:
            raise UsageError(f"--theorem {args.theorem} needs " + ", ".join("--" + m.rstrip("_").replace("_", "-")
                                                                              for m in missing))
        if args.theorem == "bennett":
            res = tb.bennett_tail(args.r, args.a, args.b, K)
        elif args.theorem == "bernstein":
            res = tb.bernstein_tail(args.r, args.B_, args.gamma, K)
        elif args.theorem == "bounded_increment":
            res = tb.bounded_increment_tail(args.r, args.b_star, args.D, K)
        else:
            res = tb.conditionally_symmetric_tail(args.r, args.b, args.D, K)
        return res.to_dict(), True
    q = mb.BoundQuery(args.p, args.ap, args.a2)
    if args.c is not None:
        pt = mb.spectrum_term(q, args.c)
        return {"c": pt.c, "value": pt.value}, True
    out = {}
    if args.envelope in ("hat", "all"):
        v, c = mb.hat_B(q)
        out["hat"] = {"value": v, "argmin_c": c}
    if args.envelope in ("check", "all"):
        v, a = mb.check_B(q)
        out["check"] = {"value": v, "argmax_alpha": a}
    if args.envelope in ("star", "all"):
        out["star"] = {"value": mb.star_B(q)}
    if args.envelope != "all":
        out = {"envelope": args.envelope, **out[args.envelope]}
    return out, True


def cmd_constants(args):
    if args.which == "gamma":
        g = ec.gamma_jm(args.j, args.m)
        return {
            "j": g.j,
            "m": g.m,
            "numerator": str(g.value.numerator),
            "denominator": str(g.value.denominator),
            "exact": str(g.value),
            "value": float(g.value),
            "partitions": [[list(x) for x in part] for part in g.partitions],
        }, True
    if args.which == "burkholder":
        c = ec.burkholder_C(args.i, args.p)
        lo_ok = c.value > args.p / 4 if args.i == 1 else True
        hi_ok = c.value <= 12 * math.e * args.p
        return {"i": c.i, "p": c.p, "value": c.value, "beta": c.argmin[0], "delta": c.argmin[1],
                "lower_bracket_holds": lo_ok, "upper_bracket_holds": hi_ok}, lo_ok and hi_ok
    pt = ec.family_1980(args.p, args.ap, args.a2, refine=args.refine)
    check = mb.check_B(mb.BoundQuery(args.p, args.ap, args.a2))[0]
    return {
        "p": pt.p, "q": pt.q, "m": pt.m, "value": pt.value, "c1": pt.c1, "c2": pt.c2,
        "b": pt.b, "y": {str(k): v for k, v in pt.y.items()},
        "u": {str(k): v for k, v in pt.u.items()}, "v": {str(k): v for k, v in pt.v.items()},
        "ratio_to_check": pt.value / check,
    }, True


def cmd_construct(args):
    if args.which == "extremal":
        s = build_extremal(args.p, args.ap, args.a2, args.n)
        out = s.to_dict()
        out["d_star_p"] = s.d_star_norm()
        out["S2_2"] = s.s2_norm()
        return out, True
    lim = limit_construction(args.p, args.ap, args.a2)
    return {"t": lim.t, "u": lim.u, "p": args.p, "a_p": args.ap, "a_2": args.a2}, True


def _load_spec(ref):
    if ref.startswith("builtin:"):
        name = ref.split(":", 1)[1]
        specs = builtin_specs()
        if name not in specs:
            raise UsageError(f"unknown builtin spec {name!r}; choose from {sorted(specs)}")
        return specs[name]
    try:
        with open(ref) as fh:
            return json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read spec: {e}") from e


def cmd_simulate(args, cfg):
    raw = _load_spec(args.spec)
    if args.verify == "yurinskii":
        if not isinstance(raw, dict) or "increments" not in raw or "space" not in raw:
            raise UsageError("yurinskii needs a JSON file with 'space', 'increments' and optional 'x'")
        space = SpaceSpec.from_dict(raw["space"])
        laws = [VectorLaw.of(np.asarray(i["values"], dtype=float).reshape(len(i["probs"]), space.dim), i["probs"])
                for i in raw["increments"]]
        rep = yurinskii_check(space, laws, raw.get("x", [0.0] * space.dim))
        return rep.to_dict(), rep.passed
    spec = raw if isinstance(raw, MartingaleSpec) else MartingaleSpec.from_dict(raw)
    seed = cfg.seed
    if args.verify == "tail":
        rep = verify_tail_bounds(spec, args.theorem, replicas=args.replicas, seed=seed)
    elif args.verify == "moment":
        rep = verify_moment_bounds(spec, args.p, replicas=args.replicas, seed=seed)
    elif args.verify == "second":
        rep = verify_second_moment(spec, replicas=args.replicas, seed=seed)
    else:
        rep = good_lambda_check(spec, args.beta, args.delta1, args.delta2, replicas=args.replicas, seed=seed)
    return json.loads(rep.to_json()), rep.passed


def default_q_grid(p, points=DEFAULT_Q_POINTS):
    """Ratios ``a_2 / a_p`` log-spaced over ``[e^{-2p}, e^2 sqrt(p)]``."""
    return np.exp(np.linspace(-2.0 * p, 2.0 + 0.5 * math.log(p), points))


def scan_equivalence(p_grid, q_grid=None, q_points=DEFAULT_Q_POINTS):
    """One row per ``(p, q)`` with every envelope and their ratios, plus a summary."""
    rows = []
    for p in p_grid:
        qs = default_q_grid(p, q_points) if q_grid is None else q_grid
        for q in qs:
            query = mb.BoundQuery(float(p), 1.0, float(q))
            hat, c = mb.hat_B(query)
            check, alpha = mb.check_B(query)
            star = mb.star_B(query)
            b1980 = ec.B_1980(float(p), 1.0, float(q)) if p > 2 else math.nan
            rows.append({
                "p": float(p), "q": float(q), "hat": hat, "argmin_c": c, "check": check, "argmax_alpha": alpha,
                "star": star, "b1980": b1980, "hat_over_check": hat / check, "star_over_check": star / check,
                "check_over_star": check / star, "hat_over_star": hat / star, "b1980_over_check": b1980 / check,
            })
    keys = ("hat_over_check", "star_over_check", "check_over_star", "hat_over_star", "b1980_over_check")
    maxima = {k: max(r[k] for r in rows) for k in keys}
    minima = {k: min(r[k] for r in rows) for k in keys}
    checks = {
        "hat_over_check_max": bool(maxima["hat_over_check"] <= HAT_CHECK_MAX),
        "star_over_check_window": bool(STAR_CHECK_WINDOW[0] <= minima["star_over_check"]
                                       and maxima["star_over_check"] <= STAR_CHECK_WINDOW[1]),
        "b1980_over_check_max": bool(maxima["b1980_over_check"] <= B1980_CHECK_MAX),
    }
    summary = {
        "cells": len(rows),
        "max": maxima,
        "min": minima,
        "thresholds": {"hat_over_check": HAT_CHECK_MAX, "star_over_check": list(STAR_CHECK_WINDOW),
                       "b1980_over_check": B1980_CHECK_MAX},
        "checks": checks,
        "passed": all(checks.values()),
    }
    return rows, summary


def scan_minimality(p_grid, c_points=25):
    rows = []
    for p in p_grid:
        for c in np.linspace(1.0, p, c_points):
            q = mb.minimality_query(p, c)
            rows.append({"p": float(p), "c": float(c), "q": q.q, "ratio": mb.minimality_ratio(p, c)})
    worst = max(r["ratio"] for r in rows)
    summary = {"cells": len(rows), "max_ratio": worst, "threshold": MINIMALITY_MAX,
               "passed": bool(worst <= MINIMALITY_MAX)}
    return rows, summary


def scan_floor(p_grid, q_grid=None, q_points=DEFAULT_Q_POINTS, n=FLOOR_N):
    """Exact ``||f_n||_p / check_B`` for the two-point construction tuned to each ``(p, q)`` cell."""
    rows = []
    for p in p_grid:
        qs = default_q_grid(p, q_points) if q_grid is None else q_grid
        for q in qs:
            spec = build_extremal(float(p), 1.0, float(q), n)
            check = mb.check_B(mb.BoundQuery(float(p), 1.0, float(q)))[0]
            norm = spec.sum_norm(float(p))
            rows.append({"p": float(p), "q": float(q), "t": spec.t, "sum_norm": norm, "check": check,
                         "ratio": norm / check})
    worst = min(r["ratio"] for r in rows)
    summary = {"cells": len(rows), "n": n, "min_ratio": worst, "threshold": FLOOR_MIN,
               "passed": bool(worst >= FLOOR_MIN)}
    return rows, summary


def _csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0])
    w.writerow(keys)
    for r in rows:
        w.writerow([f"{r[k]:.17g}" if isinstance(r[k], float) else r[k] for k in keys])
    return buf.getvalue()


def cmd_scan(args, cfg):
    if args.which == "equivalence":
        rows, summary = scan_equivalence(args.p_grid, args.q_grid, args.q_points)
    elif args.which == "floor":
        rows, summary = scan_floor(args.p_grid, args.q_grid, args.q_points, args.n)
    else:
        rows, summary = scan_minimality(args.p_grid)
    summary = {**cfg.header(), **summary}
    if args.summary:
        with open(args.summary, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True, default=_jsonable)
            fh.write("\n")
    if args.format == "csv":
        head = f"# martbounds {__version__} {json.dumps(cfg.options, sort_keys=True)}\n"
        return head + _csv(rows), summary["passed"]
    return {"rows": rows, "summary": summary}, summary["passed"]


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None or (args.command != "simulate" and getattr(args, "which", None) is None):
            raise UsageError(parser.format_usage())
        seed = getattr(args, "seed", None)
        if args.command == "simulate" and seed is None:
            seed = _default_seed()
        options = {k: (v if not isinstance(v, type(INFINITE)) else "inf") for k, v in vars(args).items()
                   if k not in ("out",)}
        cfg = RunConfig(command=args.command, options=options, seed=seed, out=args.out)
        if args.command == "bound":
            payload, ok = cmd_bound(args)
        elif args.command == "constants":
            payload, ok = cmd_constants(args)
        elif args.command == "construct":
            payload, ok = cmd_construct(args)
        elif args.command == "simulate":
            payload, ok = cmd_simulate(args, cfg)
        else:
            payload, ok = cmd_scan(args, cfg)
    except UsageError as e:
        print(str(e).rstrip(), file=sys.stderr)
        return 2
    except SystemExit as e:  # --help and --version
        return int(e.code or 0)
    except ValueError as e:
        print(f"martbounds: error: {e}", file=sys.stderr)
        return 2

    if isinstance(payload, str):
        text = payload
    else:
        text = json.dumps({**cfg.header(), "result": payload, "passed": ok}, indent=2, default=_jsonable) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as e:
            print(f"martbounds: error: {e}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def _jsonable(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def main(argv=None):
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
