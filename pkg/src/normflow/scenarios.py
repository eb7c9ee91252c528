"""The four counterexample constructions as parameterized, runnable
scenarios, plus grid search for violation witnesses."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._numeric import richardson_limit
from .contraction import check_contraction, default_grid, distance_profile
from .flow import integrate, steepest_velocity
from .functions import MaxAffine, active_set, function_spec, scale
from .norms import NormDescriptor, NonsmoothPointError

__all__ = [
    "Scenario",
    "ScenarioPair",
    "ScenarioRun",
    "PairRun",
    "Witness",
    "TangencyScan",
    "step1_scenario",
    "step2_scenario",
    "step3_tangency_scan",
    "step4_scenario",
    "run_scenario",
    "search_witness",
    "family_builder",
]

#: default offset parameter for the constructions that take an s -> 0 limit
DEFAULT_S = 0.01

#: horizons stop this fraction short of the region-validity bound
HORIZON_SHAVE = 1e-9

#: s values used to report the s -> 0 limit of tangency derivatives
RICHARDSON_S = (0.02, 0.01, 0.005)


@dataclass(frozen=True)
class ScenarioPair:
    """One (xi, zeta) start pair with its own validity horizon.

    The distance convention is d(t) = ||zeta(t) - xi(t)||.
    """

    label: str
    start_xi: np.ndarray
    start_zeta: np.ndarray
    horizon: float
    expected_xi: object = None    # callable t -> point, when closed form known
    expected_zeta: object = None


@dataclass(frozen=True)
class Scenario:
    """A packaged counterexample construction."""

    family: str
    params: dict
    space: NormDescriptor
    func: object
    pairs: tuple
    validity_bound: float
    diagnostics: dict = field(default_factory=dict)

    def scaled(self, factor):
        """The same construction driven by factor * f.

        Gradient curves reparametrize as t -> factor * t, so horizons divide
        by the factor and ratios are unchanged.
        """
        factor = float(factor)
        new_pairs = []
        for p in self.pairs:
            exp_xi = (None if p.expected_xi is None
                      else (lambda t, g=p.expected_xi: g(factor * t)))
            exp_zt = (None if p.expected_zeta is None
                      else (lambda t, g=p.expected_zeta: g(factor * t)))
            new_pairs.append(ScenarioPair(p.label, p.start_xi, p.start_zeta,
                                          p.horizon / factor, exp_xi, exp_zt))
        params = dict(self.params)
        params["scaled_by"] = factor * params.get("scaled_by", 1.0)
        return Scenario(self.family, params, self.space, scale(self.func, factor),
                        tuple(new_pairs), self.validity_bound / factor,
                        dict(self.diagnostics))

    def to_dict(self):
        return {
            "family": self.family,
            "params": {k: (float(v) if np.isscalar(v) else v)
                       for k, v in self.params.items()},
            "space": self.space.spec,
            "function": function_spec(self.func),
            "start_points": [
                {"label": p.label,
                 "xi": [float(c) for c in p.start_xi],
                 "zeta": [float(c) for c in p.start_zeta]}
                for p in self.pairs],
            "horizon": max(p.horizon for p in self.pairs),
            "validity_bound": self.validity_bound,
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [float(v) for v in obj.reshape(-1)]
    if isinstance(obj, (np.floating, np.integer)):
        return float(obj)
    return obj


def _verify_single_piece(f, point, label):
    face = active_set(f, point)
    if len(face) != 1:
        raise ValueError(
            f"start point {label} at {point} does not lie in a single-piece "
            f"region (active pieces {face.indices})")
    return face.indices[0]


def _velocity_if_matches(space, f, start, claimed, rtol=1e-9):
    v = steepest_velocity(space, f, start)
    claimed = np.asarray(claimed, dtype=float)
    if np.linalg.norm(v - claimed) <= rtol * max(1.0, np.linalg.norm(claimed)):
        return claimed
    return None


# ----------------------------------------------------------------------
# construction 1: nonsmooth norm, max of two tilted linear pieces
# ----------------------------------------------------------------------

def _step1_construction(space, eps, c):
    eps = float(eps)
    c = float(c)
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if not (0.0 < c < 1.0):
        raise ValueError("c must lie in (0, 1)")
    f = MaxAffine([[-1.0, eps], [-c, -c * eps]], [0.0, 0.0])
    b_c = (1.0 - c) / (1.0 + c) * 2.0 / eps
    start_plus = np.array([1.0, b_c])
    start_minus = np.array([-1.0, -b_c])
    _verify_single_piece(f, start_plus, "xi_plus")
    _verify_single_piece(f, start_minus, "xi_minus")
    vel_plus = _velocity_if_matches(space, f, start_plus, [1.0, 0.0])
    vel_minus = _velocity_if_matches(space, f, start_minus, [c, 0.0])
    expected_zeta = expected_xi = None
    if vel_plus is not None and vel_minus is not None:
        expected_zeta = lambda t: start_plus + t * vel_plus          # noqa: E731
        expected_xi = lambda t: start_minus + t * vel_minus          # noqa: E731
    horizon = 1.0 - HORIZON_SHAVE
    pair = ScenarioPair("main", start_minus, start_plus, horizon,
                        expected_xi, expected_zeta)
    diag = {
        "b_c": b_c,
        "velocity_plus": steepest_velocity(space, f, start_plus),
        "velocity_minus": steepest_velocity(space, f, start_minus),
    }
    return Scenario("step1", {"eps": eps, "c": c}, space, f, (pair,), 1.0, diag)


def step1_scenario(eps, c):
    """Violation scenario on the nonsmooth norm |x|_2 + |x^2|.

    f = max(-x1 + eps*x2, c*(-x1 - eps*x2)); the two gradient curves are
    horizontal lines whose distance grows at rate 1 - c.
    """
    space = NormDescriptor.euclid_plus_l1([0.0, 1.0])
    return _step1_construction(space, eps, c)


# ----------------------------------------------------------------------
# construction 2: asymmetry via top/bottom tangency points
# ----------------------------------------------------------------------

def _step2_normalization(space):
    """Linear map sending the top tangency to (0, 1), fixing the x1 axis.

    Returns (T, v0, w0, a, b): v0, w0 are the original-coordinate tangency
    points; in normalized coordinates the top one is (0, 1) with support
    plane x2 = 1 and the bottom one is (-a, -b).
    """
    if space.dim != 2:
        raise ValueError("construction 2 requires n = 2")
    if not space.is_smooth:
        raise NonsmoothPointError("construction 2 requires a smooth norm")
    v0 = space.support_point([0.0, 1.0])
    w0 = space.support_point([0.0, -1.0])
    if not (v0[1] > 0.0) or not (w0[1] < 0.0):
        raise ValueError("tangency normalization failed")
    t_mat = np.array([[1.0, -v0[0] / v0[1]], [0.0, 1.0 / v0[1]]])
    wn = t_mat @ w0
    if wn[0] > 0.0:
        t_mat = np.diag([-1.0, 1.0]) @ t_mat
        wn = np.array([-wn[0], wn[1]])
    return t_mat, v0, w0, float(-wn[0]), float(-wn[1])


def _step2_derivatives(space, t_inv, a, b, c, s):
    """First-variation values for both pairings at offset s (normalized)."""
    v = np.array([0.0, 1.0])
    w = np.array([-a, -b])
    direction = b * v - c * w
    d1 = space.norm_derivative(t_inv @ np.array([2.0, -2.0 * s]), t_inv @ direction)
    d2 = space.norm_derivative(t_inv @ np.array([2.0, 2.0 * s]), t_inv @ (-direction))
    return float(d1), float(d2)


def _step2_construction(space, c, s=DEFAULT_S):
    c = float(c)
    s = float(s)
    if c <= 0.0 or s <= 0.0:
        raise ValueError("c and s must be positive")
    t_mat, v0, w0, a, b = _step2_normalization(space)
    t_inv = np.linalg.inv(t_mat)
    row2 = t_mat[1]
    f = MaxAffine([c / b * row2, -b * row2], [0.0, 0.0])

    y_plus = t_inv @ np.array([1.0, -s])
    y_minus = t_inv @ np.array([-1.0, s])
    z_plus = t_inv @ np.array([1.0, s])
    z_minus = t_inv @ np.array([-1.0, -s])
    for point, label in ((y_plus, "xi_plus"), (y_minus, "xi_minus"),
                         (z_plus, "zeta_plus"), (z_minus, "zeta_minus")):
        _verify_single_piece(f, point, label)
    horizon = s / (b * max(1.0, c)) * (1.0 - HORIZON_SHAVE)

    vel_bv = _velocity_if_matches(space, f, y_plus, b * v0)
    vel_cw = _velocity_if_matches(space, f, y_minus, c * w0)
    exp_xi = exp_zeta = exp_xi2 = exp_zeta2 = None
    if vel_bv is not None and vel_cw is not None:
        exp_xi = lambda t: y_minus + t * vel_cw       # noqa: E731
        exp_zeta = lambda t: y_plus + t * vel_bv      # noqa: E731
        exp_xi2 = lambda t: z_minus + t * vel_bv      # noqa: E731
        exp_zeta2 = lambda t: z_plus + t * vel_cw     # noqa: E731

    pairs = (
        ScenarioPair("xi", y_minus, y_plus, horizon, exp_xi, exp_zeta),
        ScenarioPair("zeta", z_minus, z_plus, horizon, exp_xi2, exp_zeta2),
    )
    d1, d2 = _step2_derivatives(space, t_inv, a, b, c, s)
    d1_lim, d2_lim = _step2_derivatives(space, t_inv, a, b, c, 0.0)
    rich1 = richardson_limit(
        [_step2_derivatives(space, t_inv, a, b, c, sv)[0] for sv in RICHARDSON_S],
        RICHARDSON_S)
    rich2 = richardson_limit(
        [_step2_derivatives(space, t_inv, a, b, c, sv)[1] for sv in RICHARDSON_S],
        RICHARDSON_S)
    diag = {
        "a": a,
        "b": b,
        "v_normalized": np.array([0.0, 1.0]),
        "w_normalized": np.array([-a, -b]),
        "v_original": v0,
        "w_original": w0,
        "normalization": t_mat,
        "conclusive": bool(a > 1e-8),
        "first_variation_xi": d1,
        "first_variation_zeta": d2,
        "first_variation_xi_limit": d1_lim,
        "first_variation_zeta_limit": d2_lim,
        "first_variation_xi_richardson": rich1,
        "first_variation_zeta_richardson": rich2,
    }
    return Scenario("step2", {"c": c, "s": s}, space, f, pairs,
                    horizon / (1.0 - HORIZON_SHAVE), diag)


def step2_scenario(space, c, s=DEFAULT_S):
    """Asymmetry probe: flows between the top and bottom tangencies of S.

    In normalized coordinates f = max(c/b * x2, -b * x2); the two
    first-variation diagnostics vanish for every c exactly when the two
    tangency points are antipodal (a = 0), i.e. when this probe is
    inconclusive. A sign-definite value pins a contraction violation on
    one of the two pairings.
    """
    return _step2_construction(space, c, s)


# ----------------------------------------------------------------------
# construction 3: tangency scan for smooth symmetric norms
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class TangencyScan:
    """Sampled derivative d||.||_w(v) over tangency-normalized pairs."""

    entries: list  # (v, w, derivative) triples
    score: float   # max |derivative| over the scan

    def to_dict(self):
        return {"score": self.score,
                "entries": [{"v": [float(c) for c in v],
                             "w": [float(c) for c in w],
                             "derivative": float(d)}
                            for v, w, d in self.entries]}


def step3_tangency_scan(space, samples=64):
    """For sampled v on S, the derivative of the norm at w along v.

    w runs over both intersections of S with the support plane direction at
    v (the line where the normalized coordinate x1 vanishes); on an
    inner-product norm every derivative is zero.
    """
    if space.dim != 2:
        raise ValueError("the tangency scan requires n = 2")
    if not space.is_smooth:
        raise NonsmoothPointError("the tangency scan requires a smooth norm")
    samples = int(samples)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    entries = []
    for k in range(samples):
        th = 2.0 * math.pi * k / samples
        u = np.array([math.cos(th), math.sin(th)])
        v = u / space.norm(u)
        alpha = space.norm_gradient(v)
        tangent = np.array([-alpha[1], alpha[0]])
        for sgn in (1.0, -1.0):
            w = sgn * tangent
            w = w / space.norm(w)
            entries.append((v, w, space.norm_derivative(w, v)))
    score = max(abs(d) for _, _, d in entries)
    return TangencyScan(entries, float(score))


# ----------------------------------------------------------------------
# construction 4: max(a x1, x2) against the sphere point (r, a r)
# ----------------------------------------------------------------------

def _step4_construction(space, a, s=DEFAULT_S):
    a = float(a)
    s = float(s)
    if a == 0.0:
        raise ValueError("a must be nonzero")
    if s <= 0.0:
        raise ValueError("s must be positive")
    if space.dim != 2:
        raise ValueError("construction 4 requires n = 2")
    aa = abs(a)
    reflect = a < 0.0
    mirror = np.diag([-1.0, 1.0]) if reflect else np.eye(2)
    r = 1.0 / space.norm(mirror @ np.array([1.0, aa]))

    f = MaxAffine([[a, 0.0], [0.0, 1.0]], [0.0, 0.0])

    def pt(x1, x2):
        return mirror @ np.array([x1, x2])

    # pairing A: starts below/above the ray a*x1 = x2
    ya_xi = pt(0.0, -aa * s)
    ya_zeta = pt(r, aa * r + s)
    hor_a = min(s, s / aa) * (1.0 - HORIZON_SHAVE)
    # pairing B (primed): starts mirrored across the ray
    yb_xi = pt(-s, 0.0)
    yb_zeta = pt(r + aa * s, aa * r)
    hor_b = min(s, aa * s) * (1.0 - HORIZON_SHAVE)
    for point, label in ((ya_xi, "A/xi"), (ya_zeta, "A/zeta"),
                         (yb_xi, "B/xi"), (yb_zeta, "B/zeta")):
        _verify_single_piece(f, point, label)

    vel_a_xi = _velocity_if_matches(space, f, ya_xi, pt(-aa, 0.0))
    vel_a_zeta = _velocity_if_matches(space, f, ya_zeta, [0.0, -1.0])
    vel_b_xi = _velocity_if_matches(space, f, yb_xi, [0.0, -1.0])
    vel_b_zeta = _velocity_if_matches(space, f, yb_zeta, pt(-aa, 0.0))

    def line(p0, vel):
        if vel is None:
            return None
        return lambda t: p0 + t * np.asarray(vel, float)

    pairs = (
        ScenarioPair("A", ya_xi, ya_zeta, hor_a,
                     line(ya_xi, vel_a_xi), line(ya_zeta, vel_a_zeta)),
        ScenarioPair("B", yb_xi, yb_zeta, hor_b,
                     line(yb_xi, vel_b_xi), line(yb_zeta, vel_b_zeta)),
    )

    sphere_pt = pt(r, aa * r)
    deriv = space.norm_derivative(sphere_pt, pt(aa, -1.0))
    rich = richardson_limit(
        [space.norm_derivative(pt(r, aa * r + (aa + 1.0) * sv), pt(aa, -1.0))
         for sv in RICHARDSON_S], RICHARDSON_S)
    diag = {
        "r": r,
        "sphere_point": sphere_pt,
        "tangency_derivative": float(deriv),
        "tangency_derivative_richardson": float(rich),
        "violating_pair": "A" if deriv > 0.0 else ("B" if deriv < 0.0 else None),
        "reflected": reflect,
    }
    return Scenario("step4", {"a": a, "s": s}, space, f, pairs,
                    max(hor_a, hor_b) / (1.0 - HORIZON_SHAVE), diag)


def step4_scenario(p, a, s=DEFAULT_S):
    """Violation scenario on lp(p): f = max(a x1, x2).

    The decisive diagnostic is the norm derivative at (r, a r) along
    (a, -1), which is r^(p-1) (a - a^(p-1)) for a > 0; its sign selects
    the violating pairing, and it vanishes identically only for p = 2.
    """
    space = NormDescriptor.lp_norm(p, 2)
    return _step4_construction(space, a, s)


# ----------------------------------------------------------------------
# running scenarios and searching for witnesses
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PairRun:
    label: str
    xi: object
    zeta: object
    profile: object
    report: object
    max_ratio: float
    time_of_max: float


@dataclass(frozen=True)
class ScenarioRun:
    scenario: Scenario
    pair_runs: tuple
    max_ratio: float
    time_of_max: float
    best_pair: str

    def to_dict(self):
        return {
            "scenario": self.scenario.to_dict(),
            "max_ratio": self.max_ratio,
            "time_of_max": self.time_of_max,
            "best_pair": self.best_pair,
            "pairs": [{
                "label": pr.label,
                "max_ratio": pr.max_ratio,
                "time_of_max": pr.time_of_max,
                "report": pr.report.to_dict(),
                "d0": pr.profile.initial,
                "profile": pr.profile.to_dict(),
            } for pr in self.pair_runs],
        }


def run_scenario(scenario, samples=256):
    """Integrate every pair, profile the distances, and report ratios."""
    runs = []
    for pair in scenario.pairs:
        xi = integrate(scenario.space, scenario.func, pair.start_xi, pair.horizon)
        zeta = integrate(scenario.space, scenario.func, pair.start_zeta, pair.horizon)
        grid = default_grid(xi, zeta, samples=samples)
        profile = distance_profile(scenario.space, xi, zeta, grid)
        report = check_contraction(profile)
        d0 = profile.initial
        if d0 > 0.0:
            ratios = profile.values / d0
            imax = int(np.argmax(ratios))
            max_ratio = float(ratios[imax])
            t_max = float(profile.times[imax])
        else:
            max_ratio, t_max = 1.0, 0.0
        runs.append(PairRun(pair.label, xi, zeta, profile, report,
                            max_ratio, t_max))
    best = max(runs, key=lambda pr: pr.max_ratio)
    return ScenarioRun(scenario, tuple(runs), best.max_ratio,
                       best.time_of_max, best.label)


@dataclass(frozen=True)
class Witness:
    """A concrete parameter point together with its achieved ratio."""

    family: str
    params: tuple
    space_spec: str
    max_ratio: float
    time_of_max: float
    pair_label: str
    run: ScenarioRun = field(repr=False)

    def to_dict(self):
        doc = self.run.scenario.to_dict()
        doc.update({
            "max_ratio": self.max_ratio,
            "argmax_params": list(self.params),
            "time_of_max": self.time_of_max,
            "pair_label": self.pair_label,
        })
        return doc


def family_builder(family):
    """(space, params) -> Scenario builder for a named family."""
    builders = {
        "step1": lambda space, ps: _step1_construction(space, *ps),
        "step2": lambda space, ps: _step2_construction(space, *ps),
        "step4": lambda space, ps: _step4_construction(space, *ps),
    }
    if family not in builders:
        raise ValueError(f"unknown scenario family {family!r}; "
                         f"expected one of {sorted(builders)}")
    return builders[family]


def search_witness(space, family, grid, samples=256):
    """Run every grid point through the flow and keep the worst ratio.

    `grid` is an iterable of parameter tuples for the family: (eps, c) for
    step1, (a[, s]) for step4, (c[, s]) for step2. Deterministic.
    """
    grid = [tuple(np.atleast_1d(np.asarray(p, dtype=float))) for p in grid]
    if not grid:
        raise ValueError("empty parameter grid")
    build = family_builder(family)
    best = None
    for params in grid:
        run = run_scenario(build(space, params), samples=samples)
        if best is None or run.max_ratio > best.max_ratio:
            best = Witness(family, tuple(float(v) for v in params), space.spec,
                           run.max_ratio, run.time_of_max, run.best_pair, run)
    return best
