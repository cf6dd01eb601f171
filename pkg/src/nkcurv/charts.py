"""Local chart descriptions of the model geometries.

A :class:`Chart` is a coordinate box together with callables for the
metric and the almost complex structure, optionally accompanied by
analytic derivative oracles (metric to third order, J to first order).
Charts without oracles are differentiated by central differences in
:mod:`nkcurv.diffgeo`.

Built-in charts:

* ``flat_chart`` — constant identity metric, constant J0;
* ``fubini_study_chart`` — complex space form of holomorphic sectional
  curvature ``c > 0`` in inhomogeneous coordinates,
  ``g = (4/c) [ I/(1+s) - (u u^T + (Ju)(Ju)^T)/(1+s)^2 ]``, ``s = |u|^2``;
* ``complex_hyperbolic_chart`` — the ``c < 0`` counterpart on ``s < 1``,
  ``g = (4/|c|) [ I/(1-s) + (u u^T + (Ju)(Ju)^T)/(1-s)^2 ]``;
* ``s6_chart`` — the unit sphere in R^7 through the normalized-offset
  parametrization ``x(u) = (p + E u)/|p + E u|`` (induced metric
  ``I/(1+s) - u u^T/(1+s)^2``), with J pulled back from the cross
  product ``J_x v = x * v`` and the embedding retained so curvature can
  also be computed via the Gauss equation;
* ``polynomial_chart`` — seeded random polynomial perturbations of the
  flat metric with exact polynomial derivatives (or none, to exercise
  the finite-difference fallback).

The first three all draw their derivative oracles from one radial
family ``g(u) = a(s) I + b(s) u u^T + c(s) (Ju)(Ju)^T`` whose scalar
coefficient functions carry closed-form derivatives to third order.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .hermitian import standard_complex_structure
from .octonion import cross7_matrix, tangent_frame
from .rng import substream

__all__ = [
    "Box",
    "Chart",
    "SphereEmbedding",
    "flat_chart",
    "fubini_study_chart",
    "complex_hyperbolic_chart",
    "s6_chart",
    "polynomial_chart",
]


@dataclass(frozen=True)
class Box:
    """Axis-aligned coordinate domain."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def contains(self, u: np.ndarray, margin: float = 0.0) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all(u >= self.lo + margin) and np.all(u <= self.hi - margin))

    def sample(self, rng: np.random.Generator, shrink: float = 0.2) -> np.ndarray:
        span = self.hi - self.lo
        lo = self.lo + shrink * span
        hi = self.hi - shrink * span
        return lo + rng.random(self.dim) * (hi - lo)

    @staticmethod
    def cube(dim: int, half_width: float) -> "Box":
        return Box(-half_width * np.ones(dim), half_width * np.ones(dim))


@dataclass(frozen=True)
class SphereEmbedding:
    """Normalized-offset parametrization of the unit sphere in R^7."""

    p0: np.ndarray
    frame: np.ndarray  # 7 x 6, orthonormal columns spanning p0^perp

    def point(self, u: np.ndarray) -> np.ndarray:
        y = self.p0 + self.frame @ u
        return y / np.linalg.norm(y)

    def differential(self, u: np.ndarray) -> np.ndarray:
        """7x6 Jacobian of ``point`` at u."""
        y = self.p0 + self.frame @ u
        r = np.linalg.norm(y)
        return self.frame / r - np.outer(y, u) / r ** 3


@dataclass(frozen=True)
class Chart:
    """Coordinate description of a model geometry.

    ``metric``/``J_field`` map a coordinate vector to the metric matrix
    and the almost complex operator.  The optional oracles return
    derivative stacks with derivative axes appended last:
    ``metric_d1(u)[i, j, a] = d_a g_ij`` and so on; ``J_d1(u)[i, j, a] =
    d_a J^i_j``.  Charts are immutable and all callables are pure.
    """

    kind: str
    name: str
    domain: Box
    metric: Callable[[np.ndarray], np.ndarray]
    J_field: Callable[[np.ndarray], np.ndarray]
    metric_d1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    metric_d2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    metric_d3: Optional[Callable[[np.ndarray], np.ndarray]] = None
    J_d1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    embedding: Optional[SphereEmbedding] = None

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def analytic(self) -> bool:
        return all(
            f is not None for f in (self.metric_d1, self.metric_d2, self.metric_d3)
        )


# ---------------------------------------------------------------------------
# radial metric family


def _inv_power(p: float, sign: float, scale: float):
    """Coefficient s -> scale * (1 + sign*s)^(-p) with derivatives to order 3."""

    def coef(s: float):
        base = 1.0 + sign * s
        f0 = scale * base ** (-p)
        f1 = scale * (-p) * sign * base ** (-p - 1)
        f2 = scale * p * (p + 1) * base ** (-p - 2)
        f3 = scale * (-p) * (p + 1) * (p + 2) * sign * base ** (-p - 3)
        return f0, f1, f2, f3

    return coef


_ZERO_COEF = lambda s: (0.0, 0.0, 0.0, 0.0)  # noqa: E731


class _RadialMetric:
    """g(u) = a(s) I + b(s) u u^T + c(s) v v^T with v = Ju, s = |u|^2."""

    def __init__(self, dim: int, J: np.ndarray, coef_a, coef_b=None, coef_c=None):
        self.dim = dim
        self.J = np.asarray(J, dtype=float)
        self.I = np.eye(dim)
        self.coef_a = coef_a
        self.coef_b = coef_b or _ZERO_COEF
        self.coef_c = coef_c or _ZERO_COEF

    def _parts(self, u):
        u = np.asarray(u, dtype=float)
        s = float(u @ u)
        v = self.J @ u
        a = self.coef_a(s)
        b = self.coef_b(s)
        c = self.coef_c(s)
        U = np.outer(u, u)
        V = np.outer(v, v)
        return u, v, a, b, c, U, V

    def _du(self, u, v):
        I, J = self.I, self.J
        dU = np.einsum("ik,j->ijk", I, u) + np.einsum("i,jk->ijk", u, I)
        dV = np.einsum("ik,j->ijk", J, v) + np.einsum("i,jk->ijk", v, J)
        return dU, dV

    def value(self, u):
        _, _, a, b, c, U, V = self._parts(u)
        return a[0] * self.I + b[0] * U + c[0] * V

    def d1(self, u):
        u, v, a, b, c, U, V = self._parts(u)
        dU, dV = self._du(u, v)
        A1 = a[1] * self.I + b[1] * U + c[1] * V
        return 2.0 * np.einsum("k,ij->ijk", u, A1) + b[0] * dU + c[0] * dV

    def d2(self, u):
        u, v, a, b, c, U, V = self._parts(u)
        I, J = self.I, self.J
        dU, dV = self._du(u, v)
        A1 = a[1] * I + b[1] * U + c[1] * V
        A2 = a[2] * I + b[2] * U + c[2] * V
        B1 = b[1] * dU + c[1] * dV
        D = np.einsum("ik,jl->ijkl", I, I) + np.einsum("il,jk->ijkl", I, I)
        Ecap = np.einsum("ik,jl->ijkl", J, J) + np.einsum("il,jk->ijkl", J, J)
        return (
            2.0 * np.einsum("kl,ij->ijkl", I, A1)
            + 4.0 * np.einsum("k,l,ij->ijkl", u, u, A2)
            + 2.0 * np.einsum("k,ijl->ijkl", u, B1)
            + 2.0 * np.einsum("l,ijk->ijkl", u, B1)
            + b[0] * D
            + c[0] * Ecap
        )

    def d3(self, u):
        u, v, a, b, c, U, V = self._parts(u)
        I, J = self.I, self.J
        dU, dV = self._du(u, v)
        A2 = a[2] * I + b[2] * U + c[2] * V
        A3 = a[3] * I + b[3] * U + c[3] * V
        B1 = b[1] * dU + c[1] * dV
        B2 = b[2] * dU + c[2] * dV
        D = np.einsum("ik,jl->ijkl", I, I) + np.einsum("il,jk->ijkl", I, I)
        Ecap = np.einsum("ik,jl->ijkl", J, J) + np.einsum("il,jk->ijkl", J, J)
        DE1 = b[1] * D + c[1] * Ecap
        return (
            4.0 * np.einsum("kl,m,ij->ijklm", I, u, A2)
            + 2.0 * np.einsum("kl,ijm->ijklm", I, B1)
            + 4.0 * np.einsum("km,l,ij->ijklm", I, u, A2)
            + 4.0 * np.einsum("k,lm,ij->ijklm", u, I, A2)
            + 8.0 * np.einsum("k,l,m,ij->ijklm", u, u, u, A3)
            + 4.0 * np.einsum("k,l,ijm->ijklm", u, u, B2)
            + 2.0 * np.einsum("km,ijl->ijklm", I, B1)
            + 4.0 * np.einsum("k,m,ijl->ijklm", u, u, B2)
            + 2.0 * np.einsum("k,ijlm->ijklm", u, DE1)
            + 2.0 * np.einsum("lm,ijk->ijklm", I, B1)
            + 4.0 * np.einsum("l,m,ijk->ijklm", u, u, B2)
            + 2.0 * np.einsum("l,ijkm->ijklm", u, DE1)
            + 2.0 * np.einsum("m,ijkl->ijklm", u, DE1)
        )


def _constant_j_chart(kind, name, domain, radial, J):
    J = np.asarray(J, dtype=float)
    zero_dj = np.zeros((J.shape[0], J.shape[0], J.shape[0]))
    return Chart(
        kind=kind,
        name=name,
        domain=domain,
        metric=radial.value,
        metric_d1=radial.d1,
        metric_d2=radial.d2,
        metric_d3=radial.d3,
        J_field=lambda u: J,
        J_d1=lambda u: zero_dj,
    )


def flat_chart(n: int) -> Chart:
    """Flat complex space: identity metric, constant J0."""
    dim = 2 * n
    J = standard_complex_structure(dim)
    I = np.eye(dim)
    zeros1 = np.zeros((dim, dim, dim))
    zeros2 = np.zeros((dim, dim, dim, dim))
    zeros3 = np.zeros((dim, dim, dim, dim, dim))
    return Chart(
        kind="parametric",
        name=f"flat-{dim}d",
        domain=Box.cube(dim, 1.0),
        metric=lambda u: I,
        metric_d1=lambda u: zeros1,
        metric_d2=lambda u: zeros2,
        metric_d3=lambda u: zeros3,
        J_field=lambda u: J,
        J_d1=lambda u: zeros1,
    )


def fubini_study_chart(n: int, c: float = 4.0) -> Chart:
    """Complex space form with holomorphic sectional curvature c > 0."""
    if c <= 0:
        raise ValueError("fubini_study_chart needs c > 0")
    dim = 2 * n
    J = standard_complex_structure(dim)
    k = 4.0 / c
    radial = _RadialMetric(
        dim,
        J,
        coef_a=_inv_power(1, +1.0, k),
        coef_b=_inv_power(2, +1.0, -k),
        coef_c=_inv_power(2, +1.0, -k),
    )
    return _constant_j_chart(
        "parametric", f"fubini-study-{dim}d-c{c:g}", Box.cube(dim, 1.0), radial, J
    )


def complex_hyperbolic_chart(n: int, c: float = -4.0) -> Chart:
    """Complex space form with holomorphic sectional curvature c < 0.

    Coordinates are restricted to ``s = |u|^2 < 1``; the default box stays
    well inside.
    """
    if c >= 0:
        raise ValueError("complex_hyperbolic_chart needs c < 0")
    dim = 2 * n
    J = standard_complex_structure(dim)
    k = -4.0 / c
    radial = _RadialMetric(
        dim,
        J,
        coef_a=_inv_power(1, -1.0, k),
        coef_b=_inv_power(2, -1.0, k),
        coef_c=_inv_power(2, -1.0, k),
    )
    half = 0.3 / np.sqrt(n)
    return _constant_j_chart(
        "parametric", f"complex-hyperbolic-{dim}d-c{c:g}", Box.cube(dim, half), radial, J
    )


def s6_chart(p=None, seed: int = 0) -> Chart:
    """Round unit six-sphere around ``p`` (seeded direction when omitted).

    Metric oracles come from the radial family; J is the pullback of the
    cross-product structure along the embedding, ``J(u) = G(u)^{-1} M^T
    C(x) M`` with ``M`` the embedding differential and ``C(x) v = x * v``.
    """
    if p is None:
        rng = substream(seed, "s6-base-point")
        p = rng.standard_normal(7)
        p = p / np.linalg.norm(p)
    else:
        p = np.asarray(p, dtype=float)
        if abs(np.linalg.norm(p) - 1.0) > 1e-9:
            raise ValueError("base point must be a unit 7-vector")
    E = tangent_frame(p, seed)
    emb = SphereEmbedding(p0=p, frame=E)
    radial = _RadialMetric(
        6,
        np.zeros((6, 6)),
        coef_a=_inv_power(1, +1.0, 1.0),
        coef_b=_inv_power(2, +1.0, -1.0),
    )

    def j_field(u):
        x = emb.point(u)
        M = emb.differential(u)
        G = M.T @ M
        return np.linalg.solve(G, M.T @ cross7_matrix(x) @ M)

    return Chart(
        kind="embedded-sphere",
        name="s6-round",
        domain=Box.cube(6, 0.8),
        metric=radial.value,
        metric_d1=radial.d1,
        metric_d2=radial.d2,
        metric_d3=radial.d3,
        J_field=j_field,
        embedding=emb,
    )


# ---------------------------------------------------------------------------
# random polynomial metrics


class _PolynomialMetric:
    """I + sum_k C_k * u^{e_k} with exact derivatives."""

    def __init__(self, dim: int, coeffs: np.ndarray, exponents: np.ndarray):
        self.dim = dim
        self.coeffs = coeffs          # (m, dim, dim), symmetric matrices
        self.exponents = exponents    # (m, dim), nonnegative ints
        self.I = np.eye(dim)

    @staticmethod
    def _mono(e: np.ndarray, u: np.ndarray) -> float:
        return float(np.prod(u ** e))

    def _mono_deriv(self, e: np.ndarray, u: np.ndarray, axes: tuple) -> float:
        """Value of (prod_a d_a) u^e, exact."""
        e = e.astype(float).copy()
        pref = 1.0
        for a in axes:
            if e[a] <= 0:
                return 0.0
            pref *= e[a]
            e[a] -= 1.0
        return pref * float(np.prod(u ** e))

    def value(self, u):
        u = np.asarray(u, dtype=float)
        out = self.I.copy()
        for C, e in zip(self.coeffs, self.exponents):
            out = out + C * self._mono(e, u)
        return out

    def _deriv(self, u, order: int):
        u = np.asarray(u, dtype=float)
        d = self.dim
        out = np.zeros((d, d) + (d,) * order)
        for C, e in zip(self.coeffs, self.exponents):
            for axes in np.ndindex(*(d,) * order):
                val = self._mono_deriv(e, u, axes)
                if val != 0.0:
                    out[(slice(None), slice(None)) + axes] += C * val
        return out

    def d1(self, u):
        return self._deriv(u, 1)

    def d2(self, u):
        return self._deriv(u, 2)

    def d3(self, u):
        return self._deriv(u, 3)


def _sqrtm_spd(g: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(g)
    return (V * np.sqrt(w)) @ V.T


def polynomial_chart(
    n: int,
    seed: int,
    degree: int = 5,
    amplitude: float = 0.08,
    terms: int = 10,
    analytic: bool = True,
) -> Chart:
    """Seeded random polynomial perturbation of the flat metric.

    The metric is ``I + sum C_k u^{e_k}`` with symmetric coefficient
    matrices and total monomial degrees between 1 and ``degree``; the
    amplitude is shrunk (deterministically) until the metric stays
    positive definite on the domain box.  ``analytic=False`` drops the
    derivative oracles so the finite-difference fallback is exercised.
    J is ``g^{-1/2} J0 g^{1/2}``, compatible with g at every point.
    """
    dim = 2 * n
    rng = substream(seed, "polynomial-metric")
    exps = np.zeros((terms, dim), dtype=int)
    for k in range(terms):
        total = 1 + int(rng.integers(degree))
        for _ in range(total):
            exps[k, int(rng.integers(dim))] += 1
    raw = rng.standard_normal((terms, dim, dim))
    sym = (raw + raw.transpose(0, 2, 1)) / 2.0

    domain = Box.cube(dim, 0.5)
    amp = amplitude
    probes = [domain.lo, domain.hi] + [domain.sample(rng, shrink=0.0) for _ in range(40)]
    for _ in range(30):
        metric = _PolynomialMetric(dim, amp * sym, exps)
        if min(np.linalg.eigvalsh(metric.value(q)).min() for q in probes) > 0.3:
            break
        amp *= 0.5
    metric = _PolynomialMetric(dim, amp * sym, exps)

    J0 = standard_complex_structure(dim)

    def j_field(u):
        g = metric.value(u)
        root = _sqrtm_spd(g)
        return np.linalg.solve(root, J0 @ root)

    return Chart(
        kind="parametric",
        name=f"polynomial-{dim}d-seed{seed}",
        domain=domain,
        metric=metric.value,
        metric_d1=metric.d1 if analytic else None,
        metric_d2=metric.d2 if analytic else None,
        metric_d3=metric.d3 if analytic else None,
        J_field=j_field,
    )
