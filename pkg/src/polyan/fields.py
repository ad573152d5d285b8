"""Generalized-analytic pairs: covariant derivatives, Cauchy-Riemann residuals,
the pair calculus, coordinate transforms, derivative chains and line integrals.

A pair couples a vector field f with a gamma-object field correcting its
partial derivatives into a covariant derivative.  The pair is
generalized-analytic at a point when the corrected derivative matrix factors
through the algebra product, which the residual operations here measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import (
    PolyNumber,
    StructureConstants,
    invert,
    multiply,
    transform_constants,
)
from .errors import ContractError, DomainError, SingularQError

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class DiffConfig:
    """Numerical differentiation and quadrature settings.

    h is the base finite-difference step, scaled per coordinate by
    max(1, |x_k|); None picks eps^(1/3) for the 2nd-order scheme and
    eps^(1/5) for the 4th-order one.
    """

    h: float | None = None
    scheme: str = "central-2"
    tol_residual: float = 1e-7
    quadrature_segments: int = 512

    def __post_init__(self):
        if self.scheme not in ("central-2", "central-4"):
            raise ContractError(f"unknown FD scheme {self.scheme!r}")
        if self.h is not None and self.h <= 0:
            raise ContractError("FD step must be positive")
        if self.quadrature_segments < 1:
            raise ContractError("quadrature_segments must be at least 1")

    def step(self, x: np.ndarray) -> np.ndarray:
        if self.h is not None:
            base = self.h
        elif self.scheme == "central-4":
            base = _EPS ** 0.2
        else:
            base = _EPS ** (1.0 / 3.0)
        h = base * np.maximum(1.0, np.abs(x))
        # keep x + h exactly representable
        return (x + h) - x


DEFAULT_DIFF = DiffConfig()


class Box:
    """Axis-aligned box domain."""

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ContractError("box bounds must be equal-length vectors")
        if np.any(hi < lo):
            raise ContractError("box upper bound below lower bound")
        self.lo = lo
        self.hi = hi
        self.n = lo.shape[0]

    def contains(self, x, pad: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - pad) and np.all(x <= self.hi + pad))

    def grid(self, points_per_axis: int) -> np.ndarray:
        """All grid points as an (m, n) array, fastest index last."""
        axes = [np.linspace(self.lo[k], self.hi[k], points_per_axis) for k in range(self.n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def intersect(self, other: "Box | None") -> "Box | None":
        if other is None:
            return self
        return Box(np.maximum(self.lo, other.lo), np.minimum(self.hi, other.hi))


def fd_jacobian(func, x: np.ndarray, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Finite-difference Jacobian J[i, k] = d func_i / d x_k."""
    x = np.asarray(x, dtype=float)
    h = cfg.step(x)
    cols = []
    for k in range(x.shape[0]):
        e = np.zeros_like(x)
        e[k] = h[k]
        if cfg.scheme == "central-4":
            col = (
                -np.asarray(func(x + 2 * e), dtype=float)
                + 8 * np.asarray(func(x + e), dtype=float)
                - 8 * np.asarray(func(x - e), dtype=float)
                + np.asarray(func(x - 2 * e), dtype=float)
            ) / (12 * h[k])
        else:
            col = (
                np.asarray(func(x + e), dtype=float) - np.asarray(func(x - e), dtype=float)
            ) / (2 * h[k])
        cols.append(col)
    return np.stack(cols, axis=-1)


def fd_partial(func, x: np.ndarray, axis: int, cfg: DiffConfig = DEFAULT_DIFF):
    """Single directional partial derivative of a vector- or array-valued map."""
    x = np.asarray(x, dtype=float)
    h = cfg.step(x)[axis]
    e = np.zeros_like(x)
    e[axis] = h
    if cfg.scheme == "central-4":
        return (
            -np.asarray(func(x + 2 * e), dtype=float)
            + 8 * np.asarray(func(x + e), dtype=float)
            - 8 * np.asarray(func(x - e), dtype=float)
            + np.asarray(func(x - 2 * e), dtype=float)
        ) / (12 * h)
    return (np.asarray(func(x + e), dtype=float) - np.asarray(func(x - e), dtype=float)) / (2 * h)


class VectorField:
    """A map from points to n-vectors, with optional analytic Jacobian and domain."""

    def __init__(self, n: int, func: Callable, jacobian: Callable | None = None, domain: Box | None = None):
        self.n = int(n)
        self.func = func
        self.jacobian = jacobian
        self.domain = domain

    def check_point(self, x: np.ndarray):
        if self.domain is not None and not self.domain.contains(x, pad=1e-9):
            raise DomainError(f"point {np.asarray(x).tolist()} outside field domain")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        self.check_point(x)
        return np.asarray(self.func(x), dtype=float)

    def jac(self, x, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        self.check_point(x)
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        return fd_jacobian(self.func, x, cfg)

    def without_jacobian(self) -> "VectorField":
        """Copy that forgets the analytic Jacobian (forces finite differences)."""
        return VectorField(self.n, self.func, jacobian=None, domain=self.domain)


class GammaField:
    """Field of gamma-objects: point -> (n, n) array, [i, k] = component i, direction k."""

    def __init__(self, n: int, func: Callable):
        self.n = int(n)
        self.func = func

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


def zero_gamma(n: int) -> GammaField:
    return GammaField(n, lambda x: np.zeros((n, n)))


class GAPair:
    """A vector field together with its gamma-object field over a fixed algebra."""

    def __init__(self, f: VectorField, gamma: GammaField, S: StructureConstants):
        if f.n != S.n or gamma.n != S.n:
            raise ContractError("pair components disagree with the algebra dimension")
        self.f = f
        self.gamma = gamma
        self.S = S

    @property
    def n(self) -> int:
        return self.S.n


def _same_algebra(p1: GAPair, p2: GAPair):
    if p1.S.basis_tag != p2.S.basis_tag or p1.S.n != p2.S.n:
        raise ContractError(
            f"pairs live over different algebras: {p1.S.basis_tag!r} vs {p2.S.basis_tag!r}"
        )


def covariant_derivative(pair: GAPair, x, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Corrected derivative matrix D[i, k] = df_i/dx_k + gamma[i, k]."""
    x = np.asarray(x, dtype=float)
    return pair.f.jac(x, cfg) + pair.gamma(x)


def _derivative_coords(pair: GAPair, x, cfg: DiffConfig, form: str = "auto") -> np.ndarray:
    D = covariant_derivative(pair, x, cfg)
    S = pair.S
    if form == "auto":
        form = "unit" if S.unit_index is not None else "invariant"
    if form == "unit":
        if S.unit_index is None:
            raise ContractError("unit-direction derivative needs an algebra with a unit basis element")
        return D[:, S.unit_index].copy()
    if form == "invariant":
        qt = S.qtensor
        if qt.q_inv is None:
            raise SingularQError(
                f"q-tensor of algebra {S.basis_tag!r} is singular; invariant derivative undefined"
            )
        return np.einsum("is,rsm,mr->i", qt.q_inv, S.p.astype(float), D)
    raise ContractError(f"unknown derivative form {form!r}")


def derivative(pair: GAPair, x, cfg: DiffConfig = DEFAULT_DIFF, form: str = "auto") -> PolyNumber:
    """The derivative element of a generalized-analytic pair at a point.

    form "unit" reads the unit-direction column of the covariant derivative;
    form "invariant" contracts with the inverse q-tensor and works in any
    basis with nonsingular q; "auto" picks whichever is available.
    """
    return PolyNumber(_derivative_coords(pair, x, cfg, form), pair.S.basis_tag)


def cr_residual(pair: GAPair, x, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Generalized Cauchy-Riemann residual matrix R[i, k].

    R = D - p . f', with f' eliminated through the unit direction when the
    algebra has one and through the invariant q-form otherwise.  The pair is
    generalized-analytic at x iff max|R| <= cfg.tol_residual.  With gamma = 0
    this is exactly the analyticity residual of the plain theory.
    """
    D = covariant_derivative(pair, x, cfg)
    S = pair.S
    if S.unit_index is not None:
        fp = D[:, S.unit_index]
    else:
        qt = S.qtensor
        if qt.q_inv is None:
            raise SingularQError(
                f"q-tensor of algebra {S.basis_tag!r} is singular; residual needs a unit element"
            )
        fp = np.einsum("is,rsm,mr->i", qt.q_inv, S.p.astype(float), D)
    return D - np.einsum("ikj,j->ik", S.p.astype(float), fp)


def residual_grid_report(pair: GAPair, points: np.ndarray, cfg: DiffConfig = DEFAULT_DIFF) -> dict:
    """Max-abs Cauchy-Riemann residual per point, plus grid max and mean."""
    per_point = []
    for x in points:
        r = float(np.max(np.abs(cr_residual(pair, x, cfg))))
        per_point.append({"point": [float(v) for v in x], "max_abs": r})
    values = [e["max_abs"] for e in per_point]
    return {
        "points": per_point,
        "grid_max": max(values) if values else 0.0,
        "grid_mean": (sum(values) / len(values)) if values else 0.0,
    }


def gamma_from_prescribed(
    f: VectorField, fprime: VectorField, S: StructureConstants, cfg: DiffConfig = DEFAULT_DIFF
) -> GAPair:
    """Pair with gamma = -df/dx + p . f', which satisfies the residual identically.

    Any two smooth vector fields define a generalized-analytic pair this way;
    the prescribed fprime becomes the pair's derivative.
    """
    if f.n != S.n or fprime.n != S.n:
        raise ContractError("field dimensions disagree with the algebra")
    p = S.p.astype(float)

    def gamma_func(x):
        return -f.jac(x, cfg) + np.einsum("ikj,j->ik", p, fprime(x))

    return GAPair(f, GammaField(S.n, gamma_func), S)


def pair_combine(alpha: float, p1: GAPair, beta: float, p2: GAPair) -> GAPair:
    """Linear combination with real coefficients; analyticity is preserved."""
    _same_algebra(p1, p2)
    a, b = float(alpha), float(beta)
    n = p1.n

    def func(x):
        return a * p1.f(x) + b * p2.f(x)

    jac = None
    if p1.f.jacobian is not None and p2.f.jacobian is not None:
        def jac(x):
            return a * p1.f.jac(x) + b * p2.f.jac(x)

    domain = p1.f.domain.intersect(p2.f.domain) if p1.f.domain is not None else p2.f.domain
    f = VectorField(n, func, jacobian=jac, domain=domain)
    gamma = GammaField(n, lambda x: a * p1.gamma(x) + b * p2.gamma(x))
    return GAPair(f, gamma, p1.S)


def pair_product(p1: GAPair, p2: GAPair) -> GAPair:
    """Algebra product of two pairs, valid in the frame of constant structure constants.

    The product field is p . (f1 x f2) and the gamma-object is the bilinear
    expression p . (gamma1 f2 + f1 gamma2); the derivative of the result obeys
    the usual product rule.
    """
    _same_algebra(p1, p2)
    S = p1.S
    p = S.p.astype(float)
    n = p1.n

    def func(x):
        return np.einsum("kij,i,j->k", p, p1.f(x), p2.f(x))

    jac = None
    if p1.f.jacobian is not None and p2.f.jacobian is not None:
        def jac(x):
            f1, f2 = p1.f(x), p2.f(x)
            j1, j2 = p1.f.jac(x), p2.f.jac(x)
            return np.einsum("kij,im,j->km", p, j1, f2) + np.einsum("kij,i,jm->km", p, f1, j2)

    def gamma_func(x):
        f1, f2 = p1.f(x), p2.f(x)
        g1, g2 = p1.gamma(x), p2.gamma(x)
        return np.einsum("iab,ak,b->ik", p, g1, f2) + np.einsum("iab,a,bk->ik", p, f1, g2)

    domain = p1.f.domain.intersect(p2.f.domain) if p1.f.domain is not None else p2.f.domain
    f = VectorField(n, func, jacobian=jac, domain=domain)
    return GAPair(f, GammaField(n, gamma_func), S)


def product_compatibility_residual(Gamma, S: StructureConstants, x=None) -> np.ndarray:
    """Residual of the frame condition under which the product rule survives a
    position-dependent connection.  Zero identically for the constant frame."""
    G = Gamma(x) if callable(Gamma) else np.asarray(Gamma, dtype=float)
    p = S.p.astype(float)
    return (
        np.einsum("ikm,mab->ikab", G, p)
        - np.einsum("mka,imb->ikab", G, p)
        - np.einsum("mkb,iam->ikab", G, p)
    )


def pair_quotient(num: GAPair, den: GAPair, x, cfg: DiffConfig = DEFAULT_DIFF):
    """Pointwise quotient value and its derivative.

    Returns (num/den, (den * num' - den' * num) / den^2) as algebra elements;
    raises ZeroDivisorError when the denominator value divides zero.
    """
    _same_algebra(num, den)
    S = num.S
    x = np.asarray(x, dtype=float)
    f1 = PolyNumber(den.f(x), S.basis_tag)
    f2 = PolyNumber(num.f(x), S.basis_tag)
    f1_inv = invert(f1, S)
    value = multiply(f2, f1_inv, S)
    d1 = derivative(den, x, cfg)
    d2 = derivative(num, x, cfg)
    numerator = multiply(f1, d2, S) - multiply(d1, f2, S)
    deriv = multiply(numerator, multiply(f1_inv, f1_inv, S), S)
    return value, deriv


def pair_compose(outer: GAPair, inner: GAPair, x, cfg: DiffConfig = DEFAULT_DIFF) -> PolyNumber:
    """Chain-rule derivative of outer(inner(.)) at x, as an algebra product."""
    _same_algebra(outer, inner)
    x = np.asarray(x, dtype=float)
    y = inner.f(x)
    d_outer = derivative(outer, y, cfg)
    d_inner = derivative(inner, x, cfg)
    return multiply(d_outer, d_inner, inner.S)


# ---------------------------------------------------------------------------
# coordinate transformations
# ---------------------------------------------------------------------------

class Diffeo:
    """Smooth invertible coordinate map with analytic Jacobian and Hessian.

    hessian(x)[I, k, i] is the second derivative of the I-th new coordinate
    by the old coordinates k and i.  When no inverse map is supplied, inverse
    points are found by Newton iteration on the forward map.
    """

    def __init__(self, n, func, jacobian, hessian, inverse=None):
        self.n = int(n)
        self.func = func
        self.jacobian = jacobian
        self.hessian = hessian
        self._inverse = inverse

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def jac(self, x):
        return np.asarray(self.jacobian(np.asarray(x, dtype=float)), dtype=float)

    def hess(self, x):
        return np.asarray(self.hessian(np.asarray(x, dtype=float)), dtype=float)

    def inverse_point(self, y, tol: float = 1e-13, maxiter: int = 60) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if self._inverse is not None:
            return np.asarray(self._inverse(y), dtype=float)
        u = y.copy()
        for _ in range(maxiter):
            r = self(u) - y
            if np.max(np.abs(r)) <= tol * max(1.0, float(np.max(np.abs(y)))):
                return u
            u = u - np.linalg.solve(self.jac(u), r)
        raise ContractError("diffeomorphism inverse did not converge")


def linear_diffeo(m: np.ndarray, offset=None) -> Diffeo:
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    off = np.zeros(n) if offset is None else np.asarray(offset, dtype=float)
    m_inv = np.linalg.inv(m)
    return Diffeo(
        n,
        func=lambda x: m @ x + off,
        jacobian=lambda x: m,
        hessian=lambda x: np.zeros((n, n, n)),
        inverse=lambda y: m_inv @ (y - off),
    )


def gamma_transform(pair: GAPair, diffeo: Diffeo, x, cfg: DiffConfig = DEFAULT_DIFF):
    """Pointwise transform of (f, gamma, covariant derivative) under a coordinate change.

    f transforms as a contravariant vector, gamma picks up the inhomogeneous
    Hessian term, and the covariant derivative transforms as a (1,1)-tensor;
    returns the transformed triple at the image point.
    """
    x = np.asarray(x, dtype=float)
    a = diffeo.jac(x)
    try:
        b = np.linalg.inv(a)
    except np.linalg.LinAlgError as exc:
        raise ContractError("coordinate map has singular Jacobian") from exc
    h = diffeo.hess(x)
    fval = pair.f(x)
    gval = pair.gamma(x)
    f_new = a @ fval
    gamma_new = np.einsum("Ii,ik,kK->IK", a, gval, b) - np.einsum("Iki,i,kK->IK", h, fval, b)
    nabla_new = a @ covariant_derivative(pair, x, cfg) @ b
    return f_new, gamma_new, nabla_new


def transform_pair(pair: GAPair, diffeo: Diffeo) -> GAPair:
    """The pair as fields over the new coordinates (evaluated through the inverse map)."""
    n = pair.n

    def f_new(y):
        u = diffeo.inverse_point(y)
        return diffeo.jac(u) @ pair.f(u)

    def gamma_new(y):
        u = diffeo.inverse_point(y)
        a = diffeo.jac(u)
        b = np.linalg.inv(a)
        h = diffeo.hess(u)
        return (
            np.einsum("Ii,ik,kK->IK", a, pair.gamma(u), b)
            - np.einsum("Iki,i,kK->IK", h, pair.f(u), b)
        )

    return GAPair(VectorField(n, f_new), GammaField(n, gamma_new), pair.S)


def pair_change_basis(pair: GAPair, B) -> GAPair:
    """Re-express a pair in another linear basis, transforming the constants too."""
    s = B.s
    s_inv = B.s_inv
    n = pair.n
    S_new = transform_constants(pair.S, B)

    def f_new(y):
        return s @ pair.f(s_inv @ y)

    jac = None
    if pair.f.jacobian is not None:
        def jac(y):
            return s @ pair.f.jac(s_inv @ y) @ s_inv

    def gamma_new(y):
        return s @ pair.gamma(s_inv @ y) @ s_inv

    return GAPair(VectorField(n, f_new, jacobian=jac), GammaField(n, gamma_new), S_new)


# ---------------------------------------------------------------------------
# connection-driven chains
# ---------------------------------------------------------------------------

class ConnectionSlice:
    """Position-dependent coefficients, point -> (n, n, n) array G[i, k, j]."""

    def __init__(self, n: int, func: Callable):
        self.n = int(n)
        self.func = func

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


def connection_residual(pair: GAPair, Gamma: ConnectionSlice, x, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Residual of gamma[i, k] = G[i, k, j] f_j, linking a pair to a shared connection."""
    x = np.asarray(x, dtype=float)
    return np.einsum("ikj,j->ik", Gamma(x), pair.f(x)) - pair.gamma(x)


def chain_conditions(Gamma: ConnectionSlice, S: StructureConstants, x, cfg: DiffConfig = DEFAULT_DIFF):
    """Residual arrays of the two closure conditions under which repeated
    unit-direction derivatives of a pair stay generalized-analytic.

    The first is the algebraic compatibility of the unit-direction slice of
    the connection with the structure constants; the second is the
    curvature-like expression mixing its derivatives.  Both vanish for the
    zero connection.
    """
    if S.unit_index is None:
        raise ContractError("chain conditions need an algebra with a unit basis element")
    u = S.unit_index
    x = np.asarray(x, dtype=float)
    p = S.p.astype(float)
    G = Gamma(x)
    G1 = G[:, u, :]
    res_a = np.einsum("ij,jkr->ikr", G1, p) - np.einsum("ikj,jr->ikr", p, G1)

    dG = np.stack([fd_partial(Gamma, x, m, cfg) for m in range(S.n)], axis=-1)
    t1 = dG[:, u, :, :].transpose(0, 2, 1)        # d G[i, u, r] / d x_k  -> [i, k, r]
    t2 = dG[:, :, :, u]                           # d G[i, k, r] / d x_u
    m1 = G - np.einsum("ikm,mj->ikj", p, G1)
    term_a = np.einsum("ikj,jr->ikr", m1, G1)
    m2 = G - np.einsum("jkm,mr->jkr", p, G1)
    term_b = np.einsum("ij,jkr->ikr", G1, m2)
    res_b = t1 - t2 + term_a - term_b
    return res_a, res_b


def derivative_chain(pair: GAPair, Gamma: ConnectionSlice, m: int, cfg: DiffConfig = DEFAULT_DIFF) -> GAPair:
    """m-fold unit-direction derivative of the pair, re-paired with gamma = G . f.

    Each step maps f to df/dx_unit + G[:, unit, :] f; when the chain
    conditions hold every iterate is again generalized-analytic.
    """
    S = pair.S
    if S.unit_index is None:
        raise ContractError("derivative chain needs an algebra with a unit basis element")
    if m < 0:
        raise ContractError("chain order must be nonnegative")
    u = S.unit_index

    f = pair.f
    for _ in range(m):
        f = _chain_step(f, Gamma, u, cfg)

    def gamma_func(x, f=f):
        return np.einsum("ikj,j->ik", Gamma(x), f(x))

    return GAPair(f, GammaField(S.n, gamma_func), S)


def _chain_step(f: VectorField, Gamma: ConnectionSlice, u: int, cfg: DiffConfig) -> VectorField:
    def func(x, f=f):
        if f.jacobian is not None:
            df = f.jac(x)[:, u]
        else:
            df = fd_partial(f.func, x, u, cfg)
        return df + Gamma(x)[:, u, :] @ f(x)

    return VectorField(f.n, func, domain=f.domain)


# ---------------------------------------------------------------------------
# paths and line integrals
# ---------------------------------------------------------------------------

class Path:
    """Piecewise-smooth parametric curve on [0, 1].

    breakpoints are parameter values where the velocity may jump; quadrature
    splits there.  A velocity callable may be supplied, otherwise central
    differences in the parameter are used.
    """

    def __init__(self, func, velocity=None, breakpoints=(), name="path"):
        self.func = func
        self.velocity = velocity
        self.breakpoints = tuple(sorted(float(b) for b in breakpoints))
        if any(not 0.0 < b < 1.0 for b in self.breakpoints):
            raise ContractError("breakpoints must lie strictly inside (0, 1)")
        self.name = name
        self.start = np.asarray(func(0.0), dtype=float)
        self.end = np.asarray(func(1.0), dtype=float)

    def __call__(self, tau: float) -> np.ndarray:
        return np.asarray(self.func(float(tau)), dtype=float)

    def vel(self, tau: float) -> np.ndarray:
        if self.velocity is not None:
            return np.asarray(self.velocity(float(tau)), dtype=float)
        h = 1e-7
        return (self(tau + h) - self(tau - h)) / (2 * h)


def straight_path(x0, x1) -> Path:
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    d = x1 - x0
    return Path(lambda t: x0 + t * d, velocity=lambda t: d, name="straight")


def polyline_path(vertices) -> Path:
    """Straight legs through the vertices, equal parameter share per leg."""
    verts = [np.asarray(v, dtype=float) for v in vertices]
    if len(verts) < 2:
        raise ContractError("polyline needs at least two vertices")
    m = len(verts) - 1

    def func(t):
        s = min(max(t, 0.0), 1.0) * m
        leg = min(int(s), m - 1)
        local = s - leg
        return verts[leg] + local * (verts[leg + 1] - verts[leg])

    def velocity(t):
        s = min(max(t, 0.0), 1.0 - 1e-15) * m
        leg = min(int(s), m - 1)
        return m * (verts[leg + 1] - verts[leg])

    breaks = [i / m for i in range(1, m)]
    return Path(func, velocity=velocity, breakpoints=breaks, name="polyline")


def rectangle_loop(origin, edge1, edge2) -> Path:
    """Closed loop around the parallelogram spanned by two edges."""
    o = np.asarray(origin, dtype=float)
    u = np.asarray(edge1, dtype=float)
    v = np.asarray(edge2, dtype=float)
    p = polyline_path([o, o + u, o + u + v, o + v, o])
    p.name = "rectangle"
    return p


def line_integral(F: VectorField, path: Path, S: StructureConstants, cfg: DiffConfig = DEFAULT_DIFF) -> PolyNumber:
    """Integral of p . F(x(tau)) dx/dtau over the path, by composite Simpson.

    Pieces between breakpoints are integrated separately so corners of
    polylines do not degrade the even-order convergence.
    """
    if F.n != S.n:
        raise ContractError("field dimension disagrees with the algebra")
    p = S.p.astype(float)
    total = np.zeros(S.n)
    knots = [0.0, *path.breakpoints, 1.0]
    for a, b in zip(knots[:-1], knots[1:]):
        # velocity probes stay strictly inside the smooth piece so panel
        # endpoints shared with a corner read the correct one-sided velocity
        lo, hi = a + 1e-11, b - 1e-11

        def integrand(t):
            return np.einsum("ikj,k,j->i", p, F(path(t)), path.vel(min(max(t, lo), hi)))

        m = max(1, round(cfg.quadrature_segments * (b - a)))
        h = (b - a) / m
        for idx in range(m):
            t0 = a + idx * h
            total += (h / 6.0) * (
                integrand(t0) + 4.0 * integrand(t0 + h / 2.0) + integrand(t0 + h)
            )
    return PolyNumber(total, S.basis_tag)


def path_independence_residual(pair: GAPair, x, cfg: DiffConfig = DEFAULT_DIFF) -> np.ndarray:
    """Antisymmetrized product of the field's Jacobian with the constants.

    T[i, k, m] = p[i,k,j] J[j,m] - p[i,m,j] J[j,k]; it vanishes exactly when
    line integrals of the field are path independent, which forces the field
    to be analytic in the plain sense.
    """
    x = np.asarray(x, dtype=float)
    J = pair.f.jac(x, cfg)
    p = pair.S.p.astype(float)
    return np.einsum("ikj,jm->ikm", p, J) - np.einsum("imj,jk->ikm", p, J)


# ---------------------------------------------------------------------------
# field constructors
# ---------------------------------------------------------------------------

def constant_field(values) -> VectorField:
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    return VectorField(n, lambda x: values, jacobian=lambda x: np.zeros((n, n)))


def linear_field(a, offset=None) -> VectorField:
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    off = np.zeros(n) if offset is None else np.asarray(offset, dtype=float)
    return VectorField(n, lambda x: a @ x + off, jacobian=lambda x: a)


def identity_field(n: int) -> VectorField:
    return linear_field(np.eye(n))


def componentwise_power_field(n: int, power: int) -> VectorField:
    k = int(power)

    def func(x):
        return x ** k

    def jac(x):
        return np.diag(k * x ** (k - 1)) if k != 0 else np.zeros((n, n))

    return VectorField(n, func, jacobian=jac)


def componentwise_exp_field(n: int, scale: float = 1.0) -> VectorField:
    c = float(scale)
    return VectorField(
        n,
        lambda x: np.exp(c * x),
        jacobian=lambda x: np.diag(c * np.exp(c * x)),
    )


def monomial_field(n: int, component: int, exponents) -> VectorField:
    """Single nonzero component equal to a monomial in the coordinates."""
    comp = int(component)
    exps = np.asarray(exponents, dtype=int)
    if exps.shape != (n,):
        raise ContractError("exponents must have one entry per coordinate")

    def func(x):
        out = np.zeros(n)
        out[comp] = np.prod(x ** exps)
        return out

    def jac(x):
        out = np.zeros((n, n))
        for m in range(n):
            if exps[m] == 0:
                continue
            rest = np.prod([x[k] ** exps[k] for k in range(n) if k != m])
            out[comp, m] = exps[m] * x[m] ** (exps[m] - 1) * rest
        return out

    return VectorField(n, func, jacobian=jac)


def random_smooth_field(n: int, rng: np.random.Generator, amplitude: float = 1.0, trig: bool = True) -> VectorField:
    """Random field with linear, componentwise-quadratic and sine terms.

    Coefficients are bounded by the amplitude so finite differences of the
    field stay accurate; the analytic Jacobian is attached.
    """
    a = rng.uniform(-amplitude, amplitude, size=(n, n))
    b = rng.uniform(-amplitude, amplitude, size=n)
    q = rng.uniform(-amplitude, amplitude, size=(n, n))
    if trig:
        t = rng.uniform(-0.5 * amplitude, 0.5 * amplitude, size=(n, n))
        ph = rng.uniform(0.0, 2 * np.pi, size=(n, n))
    else:
        t = np.zeros((n, n))
        ph = np.zeros((n, n))

    def func(x):
        return a @ x + b + q @ (x * x) + np.sum(t * np.sin(x[None, :] + ph), axis=1)

    def jac(x):
        return a + 2.0 * q * x[None, :] + t * np.cos(x[None, :] + ph)

    return VectorField(n, func, jacobian=jac)
