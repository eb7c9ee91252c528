"""Distance profiles along trajectory pairs and the contraction, K-contraction,
monotonicity, commutativity, first-variation, and scaling diagnostics."""

import math
from dataclasses import dataclass, field

import numpy as np

from .flow import integrate
from .functions import differential, scale

__all__ = [
    "DistanceProfile",
    "ContractionReport",
    "DegenerateFlag",
    "BestConstantEstimate",
    "distance_profile",
    "default_grid",
    "check_contraction",
    "check_k_contraction",
    "monotonicity_gap",
    "commutativity_defect",
    "first_variation_check",
    "scaling_reparam_residual",
    "estimate_best_constant",
]

#: default relative tolerance separating violations from float noise
VIOLATION_RTOL = 1e-9

#: default number of uniform profile samples (breakpoints are added on top)
PROFILE_SAMPLES = 256


@dataclass(frozen=True)
class DegenerateFlag:
    """Marker returned when g(y - x) is not positive-definite."""

    min_eigenvalue: float

    def __bool__(self):
        return False


@dataclass(frozen=True)
class DistanceProfile:
    """d(t) = ||zeta(t) - xi(t)|| on a time grid (second curve minus first).

    ``reversed_values`` holds ||xi - zeta|| when requested, which differs on
    asymmetric norms.
    """

    times: np.ndarray
    values: np.ndarray
    reversed_values: np.ndarray | None = None

    def __post_init__(self):
        if self.times.size == 0:
            raise ValueError("empty profile grid")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("profile grid must be strictly increasing")

    @property
    def initial(self):
        return float(self.values[0])

    def to_dict(self):
        out = {"t": [float(v) for v in self.times],
               "d": [float(v) for v in self.values]}
        if self.reversed_values is not None:
            out["d_reversed"] = [float(v) for v in self.reversed_values]
        return out

    def to_csv_rows(self):
        if self.reversed_values is None:
            rows = [["t", "d"]]
            rows += [[float(t), float(d)] for t, d in zip(self.times, self.values)]
        else:
            rows = [["t", "d", "d_reversed"]]
            rows += [[float(t), float(d), float(r)] for t, d, r in
                     zip(self.times, self.values, self.reversed_values)]
        return rows


@dataclass(frozen=True)
class ContractionReport:
    """Outcome of checking d(t) <= e^{-K t} d(0) (K = 0 for plain).

    ``max_ratio`` is sup_t d(t) / (e^{-K t} d(0)), the plain sup d(t)/d(0)
    when K = 0; a degenerate profile with d(0) = 0 reports ratio 1.
    """

    monotone: bool
    first_violation_t: float | None
    max_ratio: float
    k: float
    tol: float

    def to_dict(self):
        return {"monotone": self.monotone,
                "first_violation_t": self.first_violation_t,
                "max_ratio": self.max_ratio,
                "k": self.k,
                "tol": self.tol}


def default_grid(*trajectories, samples=PROFILE_SAMPLES):
    """Uniform samples over the shared horizon plus all breakpoints."""
    horizon = min(tr.horizon for tr in trajectories)
    pieces = [np.linspace(0.0, horizon, samples)]
    for tr in trajectories:
        bp = tr.breakpoints
        pieces.append(bp[bp <= horizon])
    return np.unique(np.concatenate(pieces))


def distance_profile(space, xi, zeta, grid=None, reversed_too=False):
    """Evaluate d(t) = ||zeta(t) - xi(t)|| on the grid (exact norm calls)."""
    if grid is None:
        grid = default_grid(xi, zeta)
    grid = np.asarray(grid, dtype=float)
    horizon = min(xi.horizon, zeta.horizon)
    if grid.size == 0:
        raise ValueError("empty profile grid")
    if grid[0] < -1e-12 or grid[-1] > horizon + 1e-9:
        raise ValueError("grid extends outside both trajectory horizons")
    diffs = zeta.positions(grid) - xi.positions(grid)
    vals = np.array([space.norm(d) for d in diffs])
    rev = (np.array([space.norm(-d) for d in diffs]) if reversed_too else None)
    return DistanceProfile(grid, vals, rev)


def _check_envelope(profile, k, tol):
    d0 = profile.initial
    if d0 <= 0.0:
        return ContractionReport(True, None, 1.0, float(k), float(tol))
    envelope = d0 * np.exp(-float(k) * profile.times)
    ratios = profile.values / envelope
    max_ratio = float(ratios.max())
    bad = np.flatnonzero(profile.values > envelope * (1.0 + tol))
    first_t = float(profile.times[bad[0]]) if bad.size else None
    return ContractionReport(bad.size == 0, first_t, max_ratio, float(k), float(tol))


def check_contraction(profile, tol=VIOLATION_RTOL):
    """Flag the first time with d(t) > d(0) (1 + tol); report sup d/d(0)."""
    return _check_envelope(profile, 0.0, tol)


def check_k_contraction(profile, k, tol=VIOLATION_RTOL):
    """Verify d(t) <= e^{-K t} d(0) (1 + tol); K = 0 is plain contraction."""
    return _check_envelope(profile, k, tol)


def monotonicity_gap(f, x, y):
    """<df(x) - df(y), y - x>; always <= 0 for differentiable convex f."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float((differential(f, x) - differential(f, y)) @ (y - x))


def commutativity_defect(space, f, x, y):
    """Deviation among g*(-df(x)), g*(-df(y)), and g(y-x)^{-1}.

    Returns the maximum entrywise deviation over the three pairs, or a
    :class:`DegenerateFlag` when g(y - x) is not positive-definite.
    Raises at kinks, zero differentials, or x = y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.array_equal(x, y):
        raise ValueError("commutativity defect needs x != y")
    dfx = differential(f, x)
    dfy = differential(f, y)
    if not np.any(dfx) or not np.any(dfy):
        raise ValueError("commutativity defect needs nonzero differentials")
    g = space.metric_tensor(y - x)
    if not g.positive_definite:
        return DegenerateFlag(g.min_eigenvalue)
    gx = space.dual_metric_tensor(-dfx)
    gy = space.dual_metric_tensor(-dfy)
    ginv = np.linalg.inv(g.matrix)
    return float(max(np.abs(gx - gy).max(),
                     np.abs(gx - ginv).max(),
                     np.abs(gy - ginv).max()))


def first_variation_check(space, f, xi, zeta, t, fd_step=1e-6):
    """First variation of ||zeta - xi||^2 at time t, two ways.

    Analytic route: 2 sum_ij g_ij(D) D_i [g*(-df(xi)) df(xi)
    - g*(-df(zeta)) df(zeta)]_j with D = zeta(t) - xi(t), assembled from the
    metric tensors and differentials. Numeric route: central difference of
    the squared distance in t. Returns (analytic, numeric).
    """
    t = float(t)
    px = xi.position(t)
    pz = zeta.position(t)
    diff = pz - px
    if not np.any(diff):
        raise ValueError("first variation needs zeta(t) != xi(t)")
    g = space.metric_tensor(diff)
    if not g.positive_definite:
        raise ValueError("metric tensor at zeta(t) - xi(t) is degenerate")
    dfx = differential(f, px)
    dfz = differential(f, pz)
    if not np.any(dfx) or not np.any(dfz):
        raise ValueError("first variation needs nonzero differentials")
    bracket = space.dual_metric_tensor(-dfx) @ dfx - space.dual_metric_tensor(-dfz) @ dfz
    analytic = 2.0 * float(diff @ g.matrix @ bracket)

    h = fd_step
    h = min(h, 0.49 * t) if t > 0.0 else h
    lo = max(t - h, 0.0)
    hi = min(t + h, xi.horizon, zeta.horizon)

    def sqdist(tt):
        return space.norm(zeta.position(tt) - xi.position(tt)) ** 2

    numeric = (sqdist(hi) - sqdist(lo)) / (hi - lo)
    return analytic, float(numeric)


def scaling_reparam_residual(space, f, x0, c, horizon, samples=129, tol=1e-10):
    """sup_t || xi_{cf}(t) - xi_f(c t) || over sampled t in [0, horizon].

    xi_{cf} flows under scale(f, c), xi_f under f on [0, c*horizon]; the two
    agree exactly in exact arithmetic.
    """
    c = float(c)
    if c <= 0.0:
        raise ValueError("scaling factor must be positive")
    traj_scaled = integrate(space, scale(f, c), x0, horizon, tol=tol)
    traj_plain = integrate(space, f, x0, c * horizon, tol=tol)
    ts = np.unique(np.concatenate([np.linspace(0.0, horizon, samples),
                                   traj_scaled.breakpoints]))
    worst = 0.0
    for t in ts:
        gap = traj_scaled.position(t) - traj_plain.position(c * t)
        worst = max(worst, space.norm(gap))
    return float(worst)


@dataclass(frozen=True)
class BestConstantEstimate:
    """Empirical lower bound for the constant in a C-Lipschitz contraction."""

    c_hat: float
    argmax_params: tuple
    ratios: list = field(repr=False)

    def to_dict(self):
        return {"c_hat": self.c_hat,
                "argmax_params": list(self.argmax_params),
                "ratios": [{"params": list(p), "max_ratio": r}
                           for p, r in self.ratios]}


def estimate_best_constant(space, family, grid):
    """Max over a scenario parameter grid of sup_t d(t)/d(0).

    `family` is a scenario family name ("step1", "step2", "step4") or any
    callable mapping (space, params) to a runnable scenario. The result is
    a certified lower bound for any constant C in a scale-invariant
    contraction estimate on this space.
    """
    grid = [tuple(np.atleast_1d(p)) for p in grid]
    if not grid:
        raise ValueError("empty parameter grid")
    from . import scenarios as _sc
    if callable(family):
        build = family
    else:
        build = _sc.family_builder(family)
    best_ratio, best_params = -math.inf, None
    ratios = []
    for params in grid:
        scenario = build(space, params)
        run = _sc.run_scenario(scenario)
        ratios.append((tuple(float(v) for v in params), float(run.max_ratio)))
        if run.max_ratio > best_ratio:
            best_ratio, best_params = float(run.max_ratio), params
    return BestConstantEstimate(best_ratio,
                                tuple(float(v) for v in best_params), ratios)
