"""Shared numerical helpers: finite differences, 1-d searches, simplex QPs,
composite Simpson quadrature."""

from itertools import combinations

import numpy as np

EPS = float(np.finfo(float).eps)


def hessian_step(x):
    """Central-difference step for second derivatives, scaled to the point."""
    return max(float(np.linalg.norm(x)), 1.0) * EPS ** 0.25


def finite_difference_hessian(func, x, step=None):
    """Symmetrized central-difference Hessian of a scalar function.

    Parameters
    ----------
    func : callable mapping an (n,) array to a float
    x : evaluation point
    step : override for the difference step (default ``hessian_step(x)``)
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    h = hessian_step(x) if step is None else float(step)
    f0 = func(x)
    hess = np.empty((n, n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        hess[i, i] = (func(x + ei) - 2.0 * f0 + func(x - ei)) / h ** 2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            hess[i, j] = hess[j, i] = (
                func(x + ei + ej) - func(x + ei - ej)
                - func(x - ei + ej) + func(x - ei - ej)
            ) / (4.0 * h ** 2)
    return 0.5 * (hess + hess.T)


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(func, lo, hi, iters=90):
    """Golden-section minimizer for a unimodal function on [lo, hi].

    Works on nonsmooth (kinked) objectives; the interval shrinks
    geometrically, so 90 iterations reach ~1e-16 relative width.
    """
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = func(c), func(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = func(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = func(d)
        if b - a <= 4.0 * EPS * (abs(a) + abs(b)) + 1e-300:
            break
    xm = 0.5 * (a + b)
    return xm, func(xm)


def simplex_min_quadratic(quad):
    """Minimize w'Qw over the probability simplex, exactly.

    Enumerates candidate supports and solves the equality-constrained KKT
    system on each; intended for the small hulls (k <= ~12) that arise from
    max-of-affine subdifferentials. Returns (weights, value).
    """
    quad = np.asarray(quad, dtype=float)
    k = quad.shape[0]
    if k == 1:
        return np.ones(1), float(quad[0, 0])
    best_w, best_val = None, np.inf
    for size in range(1, k + 1):
        for sup in combinations(range(k), size):
            sub = quad[np.ix_(sup, sup)]
            kkt = np.zeros((size + 1, size + 1))
            kkt[:size, :size] = 2.0 * sub
            kkt[:size, size] = -1.0
            kkt[size, :size] = 1.0
            rhs = np.zeros(size + 1)
            rhs[size] = 1.0
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
            ws = sol[:size]
            if np.any(ws < -1e-12):
                continue
            ws = np.clip(ws, 0.0, None)
            s = ws.sum()
            if s <= 0.0:
                continue
            ws = ws / s
            val = float(ws @ sub @ ws)
            if val < best_val - 1e-18:
                best_val = val
                best_w = np.zeros(k)
                best_w[list(sup)] = ws
    return best_w, best_val


def composite_simpson(func, a, b, panels):
    """Composite Simpson rule with `panels` (even) subintervals.

    `func` must accept a 1-d array of nodes and return values at them.
    """
    if panels % 2:
        panels += 1
    ts = np.linspace(a, b, panels + 1)
    ys = np.asarray(func(ts), dtype=float)
    h = (b - a) / panels
    return h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum())


def adaptive_simpson(func, a, b, min_panels=64, tol=1e-10, max_doublings=12):
    """Composite Simpson with panel doubling until successive estimates agree.

    Returns (value, panels_used).
    """
    if b <= a:
        return 0.0, 0
    panels = max(2, int(min_panels))
    if panels % 2:
        panels += 1
    prev = composite_simpson(func, a, b, panels)
    for _ in range(max_doublings):
        panels *= 2
        cur = composite_simpson(func, a, b, panels)
        if abs(cur - prev) < tol * max(1.0, abs(cur)):
            return cur, panels
        prev = cur
    return prev, panels


def richardson_limit(values, steps):
    """Extrapolate f(s) to s -> 0 assuming f is a smooth function of s.

    Interpolates the samples by the unique polynomial of degree len(steps)-1
    (Neville at 0), e.g. steps [0.02, 0.01, 0.005] remove the O(s) and O(s^2)
    terms.
    """
    hs = np.asarray(steps, dtype=float)
    vals = np.asarray(values, dtype=float)
    coeffs = np.polynomial.polynomial.polyfit(hs, vals, deg=len(hs) - 1)
    return float(coeffs[0])
