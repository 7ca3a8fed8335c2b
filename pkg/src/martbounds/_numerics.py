"""Small 1-D optimization helpers shared by the bound modules."""

import math

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(f, lo, hi, tol=1e-12, max_iter=500):
    """Minimize a unimodal ``f`` on ``[lo, hi]`` by golden-section search.

    Returns ``(x, f(x))``. The endpoints are compared against the interior
    estimate so a boundary minimum is reported exactly.
    """
    a, b = float(lo), float(hi)
    x1 = b - INVPHI * (b - a)
    x2 = a + INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while b - a > tol * max(1.0, abs(a) + abs(b)) and it < max_iter:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INVPHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INVPHI * (b - a)
            f2 = f(x2)
        it += 1
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    for end in (float(lo), float(hi)):
        fe = f(end)
        if fe < fx:
            x, fx = end, fe
    return x, fx


def grid_then_golden(f, lo, hi, points=2048, log=True, tol=1e-13):
    """Global-ish minimization: dense grid, then golden refinement of the best bracket."""
    if log:
        grid = [math.exp(v) for v in _linspace(math.log(lo), math.log(hi), points)]
    else:
        grid = _linspace(lo, hi, points)
    grid[0], grid[-1] = float(lo), float(hi)
    vals = [f(x) for x in grid]
    k = min(range(points), key=vals.__getitem__)
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, points - 1)]
    x, fx = golden_min(f, a, b, tol=tol)
    if vals[k] < fx:
        return grid[k], vals[k]
    return x, fx


def _linspace(a, b, n):
    if n == 1:
        return [float(a)]
    h = (b - a) / (n - 1)
    return [a + i * h for i in range(n)]
