"""Convex test functions: max-of-affine pieces, convex quadratics, and
positive scalings, with differentials, subdifferential faces, and
minimal-dual-norm subgradient selection."""

import re
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._numeric import golden_section_min, simplex_min_quadratic

__all__ = [
    "MaxAffine",
    "Quadratic",
    "Scaled",
    "SubdifferentialFace",
    "AmbiguousDifferentialError",
    "active_set",
    "differential",
    "min_dual_subgradient",
    "scale",
    "k_modulus",
    "as_max_affine",
    "as_quadratic",
    "parse_function",
]

#: pieces within tol * max(1, |f(x)|) of the max count as active
ACTIVITY_RTOL = 1e-9


class AmbiguousDifferentialError(ValueError):
    """Differential requested where two or more affine pieces are active."""


@dataclass(frozen=True)
class SubdifferentialFace:
    """Active pieces of a max-affine function at a point."""

    indices: tuple
    vertices: np.ndarray  # the active gradients, one row per index
    tolerance: float

    def __len__(self):
        return len(self.indices)


class MaxAffine:
    """f(x) = max_k ( <g_k, x> + b_k ) for a nonempty list of affine pieces."""

    kind = "max_affine"

    def __init__(self, gradients, offsets):
        g = np.asarray(gradients, dtype=float)
        b = np.asarray(offsets, dtype=float).reshape(-1)
        if g.ndim != 2 or g.shape[0] == 0:
            raise ValueError("max_affine needs at least one piece")
        if b.size != g.shape[0]:
            raise ValueError("one offset per piece required")
        rows = {tuple(np.r_[g[i], b[i]]) for i in range(g.shape[0])}
        if len(rows) != g.shape[0]:
            raise ValueError("duplicate affine pieces are not allowed")
        self.gradients = g
        self.offsets = b
        g.setflags(write=False)
        b.setflags(write=False)

    @property
    def dim(self):
        return self.gradients.shape[1]

    @property
    def n_pieces(self):
        return self.gradients.shape[0]

    def piece_values(self, x):
        return self.gradients @ np.asarray(x, float) + self.offsets

    def value(self, x):
        return float(self.piece_values(x).max())

    def __call__(self, x):
        return self.value(x)

    def __repr__(self):
        return f"MaxAffine({self.n_pieces} pieces, dim={self.dim})"


class Quadratic:
    """f(x) = 1/2 x'Ax + <b, x> + c with A symmetric positive-semidefinite."""

    kind = "quadratic"

    def __init__(self, matrix, linear=None, constant=0.0):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("quadratic matrix must be square")
        scale_ = max(1.0, float(np.abs(a).max()))
        if not np.allclose(a, a.T, atol=1e-12 * scale_):
            raise ValueError("quadratic matrix must be symmetric")
        a = 0.5 * (a + a.T)
        eigs = np.linalg.eigvalsh(a)
        if eigs.size and eigs[0] < -1e-10 * scale_:
            raise ValueError("quadratic matrix must be positive-semidefinite")
        self.matrix = a
        self.linear = (np.zeros(a.shape[0]) if linear is None
                       else np.asarray(linear, dtype=float).reshape(-1))
        if self.linear.size != a.shape[0]:
            raise ValueError("linear term length mismatch")
        self.constant = float(constant)
        self._min_eig = float(eigs[0]) if eigs.size else 0.0
        a.setflags(write=False)
        self.linear.setflags(write=False)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def value(self, x):
        x = np.asarray(x, float)
        return float(0.5 * x @ self.matrix @ x + self.linear @ x + self.constant)

    def differential(self, x):
        return self.matrix @ np.asarray(x, float) + self.linear

    def __call__(self, x):
        return self.value(x)

    def __repr__(self):
        return f"Quadratic(dim={self.dim})"


class Scaled:
    """c * f for c > 0; flattened on demand by :func:`scale`."""

    kind = "scaled"

    def __init__(self, factor, inner):
        factor = float(factor)
        if factor <= 0.0:
            raise ValueError("scaling factor must be positive")
        self.factor = factor
        self.inner = inner

    @property
    def dim(self):
        return self.inner.dim

    def value(self, x):
        return self.factor * self.inner.value(x)

    def __call__(self, x):
        return self.value(x)

    def __repr__(self):
        return f"Scaled({self.factor} * {self.inner!r})"


def scale(f, c):
    """Represent c*f for c > 0, flattening into the base variants."""
    c = float(c)
    if c <= 0.0:
        raise ValueError("scaling factor must be positive")
    if isinstance(f, MaxAffine):
        return MaxAffine(c * f.gradients, c * f.offsets)
    if isinstance(f, Quadratic):
        return Quadratic(c * f.matrix, c * f.linear, c * f.constant)
    if isinstance(f, Scaled):
        return scale(f.inner, c * f.factor)
    raise TypeError(f"cannot scale {type(f).__name__}")


def as_max_affine(f):
    """Flatten to a MaxAffine, or raise TypeError."""
    if isinstance(f, MaxAffine):
        return f
    if isinstance(f, Scaled):
        inner = as_max_affine(f.inner)
        return MaxAffine(f.factor * inner.gradients, f.factor * inner.offsets)
    raise TypeError(f"expected a max-affine function, got {type(f).__name__}")


def as_quadratic(f):
    """Flatten to a Quadratic, or raise TypeError."""
    if isinstance(f, Quadratic):
        return f
    if isinstance(f, Scaled):
        inner = as_quadratic(f.inner)
        return Quadratic(f.factor * inner.matrix, f.factor * inner.linear,
                         f.factor * inner.constant)
    raise TypeError(f"expected a quadratic function, got {type(f).__name__}")


def k_modulus(f):
    """Largest K with guaranteed Euclidean K-convexity for the family.

    lambda_min(A) for quadratics, 0 for max-affine, c * K(inner) for
    scalings.
    """
    if isinstance(f, Quadratic):
        return f._min_eig
    if isinstance(f, MaxAffine):
        return 0.0
    if isinstance(f, Scaled):
        return f.factor * k_modulus(f.inner)
    raise TypeError(f"unsupported function {type(f).__name__}")


def active_set(f, x, tol=None):
    """Indices of pieces within tolerance of the max at x (max-affine only)."""
    base = f
    while isinstance(base, Scaled):
        base = base.inner
    if not isinstance(base, MaxAffine):
        raise TypeError("active_set is defined for max-affine functions")
    flat = as_max_affine(f)
    vals = flat.piece_values(x)
    fx = float(vals.max())
    if tol is None:
        tol = ACTIVITY_RTOL * max(1.0, abs(fx))
    idx = tuple(int(i) for i in np.flatnonzero(vals >= fx - tol))
    return SubdifferentialFace(idx, flat.gradients[list(idx)], float(tol))


def differential(f, x):
    """df(x) where f is differentiable; AmbiguousDifferentialError at kinks."""
    if isinstance(f, Quadratic):
        return f.differential(x)
    if isinstance(f, Scaled):
        return f.factor * differential(f.inner, x)
    if isinstance(f, MaxAffine):
        face = active_set(f, x)
        if len(face) > 1:
            raise AmbiguousDifferentialError(
                f"pieces {face.indices} all active at {np.asarray(x, float)}")
        return f.gradients[face.indices[0]].copy()
    raise TypeError(f"unsupported function {type(f).__name__}")


def _min_dual_norm_on_hull(space, vertices):
    """argmin ||-alpha||_* over the convex hull of the given covectors.

    Exact paths: membership of 0 (Euclidean QP by support enumeration) and
    inner-product spaces (the dual norm is quadratic). Generic spaces use
    golden-section on segments and SLSQP on larger hulls.
    """
    verts = np.asarray(vertices, dtype=float)
    k = verts.shape[0]
    if k == 1:
        return verts[0].copy()
    scale_ = max(1.0, float(np.abs(verts).max()))
    _, val0 = simplex_min_quadratic(verts @ verts.T)
    if val0 <= (1e-12 * scale_) ** 2:
        return np.zeros(verts.shape[1])
    if space.family == "inner_product":
        w, _ = simplex_min_quadratic(verts @ space._inv @ verts.T)
        return verts.T @ w
    if k == 2:
        g0, g1 = verts

        def seg_norm(s):
            return space.dual_norm(-((1.0 - s) * g0 + s * g1))

        s_best, _ = golden_section_min(seg_norm, 0.0, 1.0)
        return (1.0 - s_best) * g0 + s_best * g1

    def objective(w):
        return space.dual_norm(-(verts.T @ w)) ** 2

    def gradient(w):
        return -2.0 * verts @ space.legendre(-(verts.T @ w))

    cons = ({"type": "eq", "fun": lambda w: w.sum() - 1.0,
             "jac": lambda w: np.ones_like(w)},)
    bounds = [(0.0, 1.0)] * k
    rng = np.random.default_rng(12345)
    starts = [np.full(k, 1.0 / k)]
    starts += [rng.dirichlet(np.ones(k)) for _ in range(15)]
    best_w, best_val = None, np.inf
    for w0 in starts:
        res = minimize(objective, w0, jac=gradient, method="SLSQP",
                       bounds=bounds, constraints=cons,
                       options={"maxiter": 200, "ftol": 1e-14})
        if res.fun < best_val and np.isfinite(res.fun):
            best_val, best_w = res.fun, res.x
            if best_val <= (1e-12 * scale_) ** 2:
                break
        # the problem is convex, so the first successful start is global
        if res.success and best_w is not None:
            break
    w = np.clip(best_w, 0.0, None)
    w = w / w.sum()
    return verts.T @ w


def min_dual_subgradient(f, x, space):
    """argmin { ||-alpha||_* : alpha in subdifferential of f at x }.

    Returns df(x) wherever f is differentiable; over a kink the minimizer
    over the convex hull of the active gradients, which realizes the local
    descending slope as ||-alpha*||_*.
    """
    if isinstance(f, Quadratic):
        return f.differential(x)
    if isinstance(f, Scaled) and not isinstance(as_base(f), MaxAffine):
        return f.factor * min_dual_subgradient(f.inner, x, space)
    flat = as_max_affine(f)
    face = active_set(flat, x)
    if len(face) == 1:
        return flat.gradients[face.indices[0]].copy()
    return _min_dual_norm_on_hull(space, face.vertices)


def as_base(f):
    """Innermost unscaled function."""
    while isinstance(f, Scaled):
        f = f.inner
    return f


# ----------------------------------------------------------------------
# mini-grammar
# ----------------------------------------------------------------------

_PIECE_RE = re.compile(r"\(([^|()]*)\|([^()]*)\)")


def _floats(text):
    return [float(tok) for tok in text.split(",") if tok.strip() != ""]


def parse_function(text):
    """Parse a function specification string.

    Grammar: ``maxaff:[(g11,g12|b1),(g21,g22|b2),...]`` |
    ``quad:A=<row-major matrix>;b=<tuple>;c=<scalar>`` |
    ``scale:c=<scalar>;f=<inner>``.
    """
    text = text.strip()
    head, _, rest = text.partition(":")
    if head == "maxaff":
        pieces = _PIECE_RE.findall(rest)
        if not pieces:
            raise ValueError(f"no affine pieces found in {text!r}")
        grads = [_floats(g) for g, _ in pieces]
        offs = [float(b) for _, b in pieces]
        if len({len(g) for g in grads}) != 1:
            raise ValueError("all pieces must share one dimension")
        return MaxAffine(np.array(grads), np.array(offs))
    if head == "quad":
        fields = {}
        for part in rest.split(";"):
            key, eq, val = part.partition("=")
            if not eq:
                raise ValueError(f"malformed quad field {part!r}")
            fields[key.strip()] = val
        if "A" not in fields:
            raise ValueError("quad spec needs an A= field")
        flat = np.array(_floats(fields["A"]))
        n = int(round(len(flat) ** 0.5))
        if n * n != len(flat):
            raise ValueError("quad matrix must be square (row-major flat list)")
        b = np.array(_floats(fields["b"])) if "b" in fields else None
        c = float(fields["c"]) if "c" in fields else 0.0
        return Quadratic(flat.reshape(n, n), b, c)
    if head == "scale":
        m = re.match(r"c=([^;]+);f=(.+)", rest, flags=re.S)
        if not m:
            raise ValueError("scale spec must look like scale:c=<scalar>;f=<inner>")
        return Scaled(float(m.group(1)), parse_function(m.group(2)))
    raise ValueError(f"unknown function family {head!r}")


def function_spec(f):
    """Serialize a function back into the mini-grammar."""
    if isinstance(f, MaxAffine):
        pieces = ",".join(
            "(" + ",".join(repr(float(v)) for v in g) + "|" + repr(float(b)) + ")"
            for g, b in zip(f.gradients, f.offsets))
        return f"maxaff:[{pieces}]"
    if isinstance(f, Quadratic):
        flat = ",".join(repr(float(v)) for v in f.matrix.reshape(-1))
        lin = ",".join(repr(float(v)) for v in f.linear)
        return f"quad:A={flat};b={lin};c={f.constant!r}"
    if isinstance(f, Scaled):
        return f"scale:c={f.factor!r};f={function_spec(f.inner)}"
    raise TypeError(f"cannot serialize {type(f).__name__}")
