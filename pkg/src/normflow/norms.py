"""Possibly asymmetric norms on R^n with duality, Legendre transform, metric
tensors, and randomized axiom checks.

Four built-in families, all strictly convex:

* ``inner_product(M)``         sqrt(x' M x), M symmetric positive-definite
* ``lp(p)``                    (sum |x_i|^p)^(1/p), 1 < p < inf
* ``euclid_plus_l1(lam)``      |x|_2 + sum_i lam_i |x_i|  (symmetric, nonsmooth
                               where lam_i > 0 and x_i = 0)
* ``euclid_plus_linear(beta)`` |x|_2 + <beta, x>, |beta|_2 < 1 (asymmetric, smooth)

The asymmetric distance is d(x, y) = ||y - x||.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import brentq, minimize

from ._numeric import (
    EPS,
    finite_difference_hessian,
    golden_section_min,
    hessian_step,
)

__all__ = [
    "NormDescriptor",
    "MetricTensor",
    "AxiomReport",
    "NonsmoothPointError",
    "NonConvergenceError",
    "dual_norm_by_maximization",
    "parse_space",
]

#: kink detection band for euclid_plus_l1, relative to max(|x|_2, 1)
KINK_BAND = 1e-12


class NonsmoothPointError(ValueError):
    """Raised when a second derivative is requested at a nonsmooth point."""


class NonConvergenceError(RuntimeError):
    """Raised when an iterative maximization fails to converge.

    Carries the best bound achieved in ``best_value``.
    """

    def __init__(self, message, best_value=None):
        super().__init__(message)
        self.best_value = best_value


@dataclass(frozen=True)
class MetricTensor:
    """Half-Hessian of a squared norm, with a positive-definiteness flag."""

    matrix: np.ndarray
    min_eigenvalue: float
    positive_definite: bool


@dataclass(frozen=True)
class AxiomReport:
    """Result of a randomized check of the norm axioms.

    Violation magnitudes are nonnegative; zero means no violation was found
    on the sampled set.
    """

    positivity_ok: bool
    homogeneity_ok: bool
    triangle_ok: bool
    positivity_violation: float
    homogeneity_violation: float
    triangle_violation: float
    symmetric: bool
    symmetry_gap: float
    symmetry_witness: tuple | None
    strictly_convex: bool
    min_strict_gap: float
    samples: int
    seed: int

    @property
    def all_axioms_ok(self):
        return self.positivity_ok and self.homogeneity_ok and self.triangle_ok

    def to_dict(self):
        return {
            "positivity_ok": self.positivity_ok,
            "homogeneity_ok": self.homogeneity_ok,
            "triangle_ok": self.triangle_ok,
            "positivity_violation": self.positivity_violation,
            "homogeneity_violation": self.homogeneity_violation,
            "triangle_violation": self.triangle_violation,
            "symmetric": self.symmetric,
            "symmetry_gap": self.symmetry_gap,
            "symmetry_witness": None if self.symmetry_witness is None
            else [list(map(float, self.symmetry_witness[0])),
                  float(self.symmetry_witness[1]), float(self.symmetry_witness[2])],
            "strictly_convex": self.strictly_convex,
            "min_strict_gap": self.min_strict_gap,
            "samples": self.samples,
            "seed": self.seed,
        }


def _as_vector(x, dim, name="x"):
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size != dim:
        raise ValueError(f"{name} has dimension {arr.size}, expected {dim}")
    return arr


class NormDescriptor:
    """A parameterized, possibly asymmetric norm on R^n.

    Immutable; all operations are pure functions of their inputs, so
    instances are safe to share across threads.
    """

    FAMILIES = ("inner_product", "lp", "euclid_plus_l1", "euclid_plus_linear")

    def __init__(self, family, dim, matrix=None, p=None, lam=None, beta=None):
        if family not in self.FAMILIES:
            raise ValueError(f"unknown norm family {family!r}")
        dim = int(dim)
        if dim < 1:
            raise ValueError("dimension must be a positive integer")
        self.family = family
        self.dim = dim
        self.matrix = None
        self.p = None
        self.lam = None
        self.beta = None
        if family == "inner_product":
            m = np.asarray(matrix, dtype=float)
            if m.shape != (dim, dim):
                raise ValueError("matrix shape does not match dimension")
            if not np.allclose(m, m.T, atol=1e-12 * max(1.0, float(np.abs(m).max()))):
                raise ValueError("inner_product matrix must be symmetric")
            m = 0.5 * (m + m.T)
            eigs = np.linalg.eigvalsh(m)
            if eigs[0] <= 0.0:
                raise ValueError("inner_product matrix must be positive-definite")
            self.matrix = m
            self._chol = cho_factor(m)
            self._inv = cho_solve(self._chol, np.eye(dim))
            self._inv = 0.5 * (self._inv + self._inv.T)
        elif family == "lp":
            p = float(p)
            if not (1.0 < p < math.inf):
                raise ValueError("lp exponent must lie in (1, inf)")
            self.p = p
            self.q = p / (p - 1.0)
        elif family == "euclid_plus_l1":
            lam = np.asarray(lam, dtype=float).reshape(-1)
            if lam.size != dim:
                raise ValueError("weight tuple length does not match dimension")
            if np.any(lam < 0.0):
                raise ValueError("euclid_plus_l1 weights must be nonnegative")
            self.lam = lam
        else:
            beta = np.asarray(beta, dtype=float).reshape(-1)
            if beta.size != dim:
                raise ValueError("beta length does not match dimension")
            if np.linalg.norm(beta) >= 1.0:
                raise ValueError("euclid_plus_linear requires |beta|_2 < 1")
            self.beta = beta
        for arr in (self.matrix, self.lam, self.beta):
            if arr is not None:
                arr.setflags(write=False)

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def euclidean(cls, dim):
        return cls("inner_product", dim, matrix=np.eye(int(dim)))

    @classmethod
    def inner_product(cls, matrix):
        matrix = np.asarray(matrix, dtype=float)
        return cls("inner_product", matrix.shape[0], matrix=matrix)

    @classmethod
    def lp_norm(cls, p, dim=2):
        return cls("lp", dim, p=p)

    @classmethod
    def euclid_plus_l1(cls, lam):
        lam = np.asarray(lam, dtype=float).reshape(-1)
        return cls("euclid_plus_l1", lam.size, lam=lam)

    @classmethod
    def euclid_plus_linear(cls, beta):
        beta = np.asarray(beta, dtype=float).reshape(-1)
        return cls("euclid_plus_linear", beta.size, beta=beta)

    # ------------------------------------------------------------------
    # basic properties
    # ------------------------------------------------------------------

    @property
    def is_symmetric(self):
        if self.family == "euclid_plus_linear":
            return bool(np.all(self.beta == 0.0))
        return True

    @property
    def is_smooth(self):
        """C^1 away from the origin."""
        if self.family == "euclid_plus_l1":
            return bool(np.all(self.lam == 0.0))
        return True

    @property
    def spec(self):
        """Mini-grammar string accepted by :func:`parse_space` and the CLI."""
        if self.family == "inner_product":
            if np.array_equal(self.matrix, np.eye(self.dim)):
                return "euclid"
            flat = ",".join(repr(float(v)) for v in self.matrix.reshape(-1))
            return f"spd:{flat}"
        if self.family == "lp":
            return f"lp:p={self.p!r}"
        if self.family == "euclid_plus_l1":
            return "euclid_l1:lambda=" + ",".join(repr(float(v)) for v in self.lam)
        return "asym:beta=" + ",".join(repr(float(v)) for v in self.beta)

    def __repr__(self):
        return f"NormDescriptor({self.spec!r}, dim={self.dim})"

    # ------------------------------------------------------------------
    # norm and dual norm
    # ------------------------------------------------------------------

    def norm(self, x):
        """Evaluate ||x||; exact to working precision for every family."""
        x = _as_vector(x, self.dim)
        if self.family == "inner_product":
            return float(np.sqrt(max(x @ self.matrix @ x, 0.0)))
        if self.family == "lp":
            return float(np.sum(np.abs(x) ** self.p) ** (1.0 / self.p))
        if self.family == "euclid_plus_l1":
            return float(np.linalg.norm(x) + self.lam @ np.abs(x))
        return float(np.linalg.norm(x) + self.beta @ x)

    def distance(self, x, y):
        """Asymmetric distance d(x, y) = ||y - x||."""
        return self.norm(np.asarray(y, float) - np.asarray(x, float))

    def _l1mix_dual_scale(self, alpha):
        """Root t of | soft(alpha, t*lam) |_2 = t; equals the dual norm."""
        a = np.abs(alpha)
        na = float(np.linalg.norm(a))
        if na == 0.0:
            return 0.0

        def gap(t):
            return float(np.linalg.norm(np.maximum(a - t * self.lam, 0.0))) - t

        hi = na
        if gap(hi) == 0.0:
            return hi
        return float(brentq(gap, 0.0, hi, xtol=1e-15 * max(na, 1.0), rtol=4 * EPS,
                            maxiter=200))

    def dual_norm(self, alpha):
        """sup { <alpha, x> : ||x|| <= 1 }."""
        alpha = _as_vector(alpha, self.dim, "alpha")
        if not np.any(alpha):
            return 0.0
        if self.family == "inner_product":
            return float(np.sqrt(max(alpha @ cho_solve(self._chol, alpha), 0.0)))
        if self.family == "lp":
            return float(np.sum(np.abs(alpha) ** self.q) ** (1.0 / self.q))
        if self.family == "euclid_plus_l1":
            return self._l1mix_dual_scale(alpha)
        s2 = 1.0 - float(self.beta @ self.beta)
        dot = float(alpha @ self.beta)
        return float((math.sqrt(s2 * float(alpha @ alpha) + dot * dot) - dot) / s2)

    def support_point(self, alpha):
        """The unique unit vector x* with <alpha, x*> = ||alpha||_*.

        Strict convexity of the norm makes the maximizer unique for
        alpha != 0.
        """
        alpha = _as_vector(alpha, self.dim, "alpha")
        if not np.any(alpha):
            raise ValueError("support point undefined for alpha = 0")
        if self.family == "inner_product":
            y = cho_solve(self._chol, alpha)
            return y / self.norm(y)
        if self.family == "lp":
            lx = self._lp_legendre(alpha)
            return lx / self.dual_norm(alpha)
        if self.family == "euclid_plus_l1":
            t = self._l1mix_dual_scale(alpha)
            e = np.sign(alpha) * np.maximum(np.abs(alpha) - t * self.lam, 0.0) / t
            return e / (1.0 + self.lam @ np.abs(e))
        s2 = 1.0 - float(self.beta @ self.beta)
        dot = float(alpha @ self.beta)
        qinv_a = alpha + self.beta * (dot / s2)
        y = qinv_a / (math.sqrt(s2) * math.sqrt(float(alpha @ qinv_a)))
        return y - self.beta / s2

    def _lp_legendre(self, alpha):
        q = self.q
        nq = float(np.sum(np.abs(alpha) ** q) ** (1.0 / q))
        return nq ** (2.0 - q) * np.abs(alpha) ** (q - 1.0) * np.sign(alpha)

    def legendre(self, alpha):
        """Legendre transform L(alpha) = 1/2 grad ||.||_*^2 (alpha).

        Satisfies ||L(alpha)|| = ||alpha||_* and <alpha, L(alpha)> =
        ||alpha||_*^2, with L(0) = 0. Computed as ||alpha||_* times the
        support point (the gradient of a support function is its unique
        maximizer), which is exact wherever a closed form of the maximizer
        exists -- including sphere corners of euclid_plus_l1.
        """
        alpha = _as_vector(alpha, self.dim, "alpha")
        if not np.any(alpha):
            return np.zeros(self.dim)
        if self.family == "inner_product":
            return cho_solve(self._chol, alpha)
        if self.family == "lp":
            return self._lp_legendre(alpha)
        return self.dual_norm(alpha) * self.support_point(alpha)

    # ------------------------------------------------------------------
    # derivatives
    # ------------------------------------------------------------------

    def norm_gradient(self, x):
        """Gradient of ||.|| at a smooth point x != 0."""
        x = _as_vector(x, self.dim)
        nx2 = float(np.linalg.norm(x))
        if nx2 == 0.0:
            raise ValueError("norm gradient undefined at the origin")
        if self.family == "inner_product":
            return self.matrix @ x / self.norm(x)
        if self.family == "lp":
            n = self.norm(x)
            u = np.abs(x) ** (self.p - 1.0) * np.sign(x)
            return n ** (1.0 - self.p) * u
        if self.family == "euclid_plus_l1":
            band = KINK_BAND * max(nx2, 1.0)
            if np.any((self.lam > 0.0) & (np.abs(x) <= band)):
                raise NonsmoothPointError(
                    "norm is not differentiable where a weighted coordinate vanishes")
            return x / nx2 + self.lam * np.sign(x)
        return x / nx2 + self.beta

    def norm_derivative(self, x, v):
        """One-sided forward directional derivative of ||.|| at x != 0.

        Exists for every convex norm; at kinks of euclid_plus_l1 it is the
        one-sided limit lim_{t->0+} (||x + t v|| - ||x||) / t.
        """
        x = _as_vector(x, self.dim)
        v = _as_vector(v, self.dim, "v")
        nx2 = float(np.linalg.norm(x))
        if nx2 == 0.0:
            raise ValueError("directional derivative of the norm at 0 is not supported")
        if self.family == "euclid_plus_l1":
            band = KINK_BAND * max(nx2, 1.0)
            out = float(x @ v / nx2)
            for i in range(self.dim):
                if self.lam[i] == 0.0:
                    continue
                if abs(x[i]) <= band:
                    out += self.lam[i] * abs(v[i])
                else:
                    out += self.lam[i] * math.copysign(1.0, x[i]) * v[i]
            return out
        return float(self.norm_gradient(x) @ v)

    # ------------------------------------------------------------------
    # metric tensors
    # ------------------------------------------------------------------

    def _pd_flag(self, mat):
        eigs = np.linalg.eigvalsh(0.5 * (mat + mat.T))
        scale = max(1.0, float(np.abs(eigs).max()))
        return float(eigs[0]), bool(eigs[0] > 1e-10 * scale)

    def metric_tensor(self, v):
        """g(v) = 1/2 Hess ||.||^2 at v != 0, with a definiteness flag.

        Closed forms are used for every family (the finite-difference route
        is kept as a cross-check, see ``metric_tensor_fd``); degenerate
        tensors (e.g. lp(4) on the axes) are flagged, not rejected.
        """
        v = _as_vector(v, self.dim, "v")
        nv2 = float(np.linalg.norm(v))
        if nv2 == 0.0:
            raise ValueError("metric tensor undefined at v = 0")
        if self.family == "inner_product":
            mat = self.matrix.copy()
        elif self.family == "lp":
            p, n = self.p, self.norm(v)
            band = 1e-9 * max(nv2, 1.0)
            if p < 2.0 and np.any(np.abs(v) <= band):
                raise NonsmoothPointError(
                    f"lp({p}) has unbounded curvature on the axes")
            u = np.abs(v) ** (p - 1.0) * np.sign(v)
            mat = (2.0 - p) * n ** (2.0 - 2.0 * p) * np.outer(u, u)
            mat += (p - 1.0) * n ** (2.0 - p) * np.diag(np.abs(v) ** (p - 2.0))
        else:
            grad = self.norm_gradient(v)  # raises at euclid_plus_l1 kinks
            proj = (np.eye(self.dim) - np.outer(v, v) / nv2 ** 2) / nv2
            mat = np.outer(grad, grad) + self.norm(v) * proj
        mat = 0.5 * (mat + mat.T)
        min_eig, pd = self._pd_flag(mat)
        return MetricTensor(mat, min_eig, pd)

    def metric_tensor_fd(self, v, step=None):
        """Finite-difference route for g(v); used to verify the closed forms."""
        v = _as_vector(v, self.dim, "v")
        return 0.5 * finite_difference_hessian(lambda z: self.norm(z) ** 2, v, step)

    def dual_metric_tensor(self, alpha):
        """g*(alpha) = 1/2 Hess ||.||_*^2 at alpha != 0.

        Inverse of g(L(alpha)) whenever the latter is positive-definite.
        Closed forms for inner_product and lp; finite differences on the
        dual norm for the two mixed families.
        """
        alpha = _as_vector(alpha, self.dim, "alpha")
        na = float(np.linalg.norm(alpha))
        if na == 0.0:
            raise ValueError("dual metric tensor undefined at alpha = 0")
        if self.family == "inner_product":
            return self._inv.copy()
        if self.family == "lp":
            q, nq = self.q, self.dual_norm(alpha)
            band = 1e-9 * max(na, 1.0)
            if q < 2.0 and np.any(np.abs(alpha) <= band):
                raise NonsmoothPointError(
                    "dual norm has unbounded curvature on the axes")
            u = np.abs(alpha) ** (q - 1.0) * np.sign(alpha)
            mat = (2.0 - q) * nq ** (2.0 - 2.0 * q) * np.outer(u, u)
            mat += (q - 1.0) * nq ** (2.0 - q) * np.diag(np.abs(alpha) ** (q - 2.0))
            return 0.5 * (mat + mat.T)
        if self.family == "euclid_plus_l1":
            h = hessian_step(alpha)
            t = self._l1mix_dual_scale(alpha)
            if np.any(np.abs(np.abs(alpha) - t * self.lam) <= 4.0 * h):
                raise NonsmoothPointError(
                    "dual norm is not twice differentiable where the "
                    "soft-threshold pattern changes")
            return 0.5 * finite_difference_hessian(
                lambda a: self.dual_norm(a) ** 2, alpha, step=h)
        return 0.5 * finite_difference_hessian(
            lambda a: self.dual_norm(a) ** 2, alpha)

    # ------------------------------------------------------------------
    # diagnostics
    # ------------------------------------------------------------------

    def parallelogram_defect(self, x, y):
        """||x+y||^2 + ||x-y||^2 - 2||x||^2 - 2||y||^2.

        Identically zero exactly for inner-product norms.
        """
        x = _as_vector(x, self.dim)
        y = _as_vector(y, self.dim, "y")
        return (self.norm(x + y) ** 2 + self.norm(x - y) ** 2
                - 2.0 * self.norm(x) ** 2 - 2.0 * self.norm(y) ** 2)

    def check_axioms(self, samples=1000, seed=0):
        """Randomized verification of the norm axioms; deterministic per seed.

        Checks positivity, positive homogeneity, the triangle inequality,
        the strict midpoint inequality on non-proportional pairs, and
        symmetry. Failures are report entries, never exceptions.
        """
        samples = int(samples)
        if samples < 1:
            raise ValueError("samples must be >= 1")
        rng = np.random.default_rng(seed)
        n = self.dim
        pos_viol = homog_viol = tri_viol = 0.0
        sym_gap = 0.0
        sym_witness = None
        min_strict = np.inf
        for _ in range(samples):
            x = rng.standard_normal(n)
            y = rng.standard_normal(n)
            c = float(rng.lognormal(0.0, 1.0))
            nx, ny = self.norm(x), self.norm(y)
            scale = max(1.0, nx, ny)
            pos_viol = max(pos_viol, -nx, 0.0 if nx > 0.0 else 1.0)
            homog_viol = max(homog_viol, abs(self.norm(c * x) - c * nx) / (c * scale))
            tri_viol = max(tri_viol, (self.norm(x + y) - nx - ny) / scale)
            gap = abs(nx - self.norm(-x)) / scale
            if gap > sym_gap:
                sym_gap = gap
                sym_witness = (x.copy(), nx, self.norm(-x))
            # strict convexity on clearly non-proportional unit pairs
            xu, yu = x / np.linalg.norm(x), y / np.linalg.norm(y)
            if min(np.linalg.norm(xu - yu), np.linalg.norm(xu + yu)) > 1e-2:
                a, b = x / nx, y / ny
                min_strict = min(min_strict,
                                 self.norm(a) + self.norm(b) - self.norm(a + b))
        return AxiomReport(
            positivity_ok=pos_viol <= 0.0,
            homogeneity_ok=homog_viol <= 1e-10,
            triangle_ok=tri_viol <= 1e-12,
            positivity_violation=float(max(pos_viol, 0.0)),
            homogeneity_violation=float(max(homog_viol, 0.0)),
            triangle_violation=float(max(tri_viol, 0.0)),
            symmetric=sym_gap <= 1e-12,
            symmetry_gap=float(sym_gap),
            symmetry_witness=sym_witness if sym_gap > 1e-12 else None,
            strictly_convex=bool(min_strict > 1e-12),
            min_strict_gap=float(min_strict if np.isfinite(min_strict) else 0.0),
            samples=samples,
            seed=int(seed),
        )


# ----------------------------------------------------------------------
# generic dual-norm maximization (oracle route)
# ----------------------------------------------------------------------

def dual_norm_by_maximization(space, alpha, starts=8, seed=0, angular_grid=4096):
    """Dual norm as a direct maximization of <alpha, x> over the unit sphere.

    Independent of the closed forms in :class:`NormDescriptor`; used to
    cross-check them. In n = 2 a dense angular grid plus golden-section
    refinement acts as the oracle; in higher dimensions multi-start local
    ascent over the sphere. Returns (value, maximizer).
    """
    alpha = _as_vector(alpha, space.dim, "alpha")
    if not np.any(alpha):
        return 0.0, np.zeros(space.dim)

    def on_sphere(u):
        return u / space.norm(u)

    def neg_gain_theta(th):
        u = np.array([math.cos(th), math.sin(th)])
        return -float(alpha @ on_sphere(u))

    if space.dim == 2:
        grid = np.linspace(0.0, 2.0 * math.pi, int(angular_grid), endpoint=False)
        vals = np.array([neg_gain_theta(t) for t in grid])
        i = int(np.argmin(vals))
        width = 2.0 * math.pi / angular_grid
        th, val = golden_section_min(neg_gain_theta, grid[i] - width, grid[i] + width)
        x = on_sphere(np.array([math.cos(th), math.sin(th)]))
        return -val, x

    def neg_gain(u):
        nu = np.linalg.norm(u)
        if nu < 1e-12:
            return 0.0
        return -float(alpha @ on_sphere(u))

    rng = np.random.default_rng(seed)
    seeds = [alpha / np.linalg.norm(alpha)]
    seeds += [rng.standard_normal(space.dim) for _ in range(max(starts - 1, 0))]
    best_val, best_u = np.inf, None
    for u0 in seeds:
        res = minimize(neg_gain, u0 / np.linalg.norm(u0), method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
        if res.fun < best_val:
            best_val, best_u = res.fun, res.x
    if best_u is None or not np.isfinite(best_val):
        raise NonConvergenceError("dual norm maximization did not converge",
                                  best_value=None if best_u is None else -best_val)
    return -best_val, on_sphere(best_u)


# ----------------------------------------------------------------------
# mini-grammar parsing
# ----------------------------------------------------------------------

def _parse_floats(text):
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
    except ValueError as exc:
        raise ValueError(f"cannot parse number list {text!r}") from exc


def parse_space(text, dim=None):
    """Parse a norm specification string.

    Grammar: ``euclid`` | ``spd:<row-major matrix>`` | ``lp:p=<float>`` |
    ``euclid_l1:lambda=<tuple>`` | ``asym:beta=<tuple>``. Families that do
    not carry their dimension (``euclid``, ``lp``) take it from `dim`.
    """
    text = text.strip()
    if text == "euclid":
        if dim is None:
            raise ValueError("'euclid' needs a dimension from context")
        return NormDescriptor.euclidean(dim)
    if ":" not in text:
        raise ValueError(f"malformed space spec {text!r}")
    head, _, rest = text.partition(":")
    if head == "spd":
        flat = _parse_floats(rest)
        n = math.isqrt(flat.size)
        if n * n != flat.size:
            raise ValueError("spd matrix must be square (row-major flat list)")
        return NormDescriptor.inner_product(flat.reshape(n, n))
    if head == "lp":
        if not rest.startswith("p="):
            raise ValueError("lp spec must look like lp:p=<float>")
        if dim is None:
            raise ValueError("'lp' needs a dimension from context")
        return NormDescriptor.lp_norm(float(rest[2:]), dim)
    if head == "euclid_l1":
        if not rest.startswith("lambda="):
            raise ValueError("euclid_l1 spec must look like euclid_l1:lambda=<tuple>")
        return NormDescriptor.euclid_plus_l1(_parse_floats(rest[len("lambda="):]))
    if head == "asym":
        if not rest.startswith("beta="):
            raise ValueError("asym spec must look like asym:beta=<tuple>")
        return NormDescriptor.euclid_plus_linear(_parse_floats(rest[len("beta="):]))
    raise ValueError(f"unknown space family {head!r}")
