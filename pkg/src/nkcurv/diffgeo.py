"""Numerical Levi-Civita geometry on charts and the differential identity checks.

Derivative conventions: stacks carry derivative axes last,
``dg[i, j, a] = d_a g_ij``, ``d2g[i, j, a, b]``, ``d3g[i, j, a, b, c]``,
``dJ[i, j, a] = d_a J^i_j``.  Covariant derivative stacks carry the
derivative axis first: ``nabla_S[a, j, k] = (nabla_a S)(e_j, e_k)``,
``nabla_R[a, i, j, k, l]``, ``nabla_J[a, i, j] = ((nabla_a J) e_j)^i``.

The differential half of the identity catalog (see
:mod:`nkcurv.invariants` for the algebraic half) consists of the two
contracted Bianchi identities, valid for every metric,

  (1)  sum_i (nabla_{E_i} R)(X, Y, Z, E_i)
          = (nabla_X S)(Y, Z) - (nabla_Y S)(X, Z)
  (2)  sum_i (nabla_{E_i} S)(X, E_i) = (1/2) X tau

and the nearly Kahler family

  (3)  sum_i (nabla_{E_i} S*)(X, E_i) = (1/2) X tau*
  (4)  X (tau - tau*) = 0
  (5)  2 (nabla_X (S - S*))(Y, Z)
          = (S - S*)((nabla_X J) Y, JZ) + (S - S*)(JY, (nabla_X J) Z)
  (10) 2 (nabla_X S)(Y, Z) = S((nabla_X J) Y, JZ) + S(JY, (nabla_X J) Z)
  (11) (nabla_X S)(Y, Z) + (nabla_{JX} S)(JY, Z) = 0
  (12) (nabla_X S)(Y, Z) + (nabla_Y S)(Z, X) + (nabla_Z S)(X, Y) = 0

together with the defining condition ``(nabla_X J) X = 0``.  Defects are
max-norms over a g-orthonormal frame.

Finite differences: when a chart lacks analytic oracles, first
derivatives use central differences with one Richardson extrapolation at
step ``h``; second and third derivatives nest plain central differences
at steps ``3h`` and ``10h`` on top of the level below.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .charts import Chart
from .defaults import CHART_TOL
from .hermitian import HermitianPoint, structure_defects
from .invariants import RicciData, contractions, trace_nu
from .rng import substream
from .tensors import FourTensor, constant_curvature_tensor

__all__ = [
    "ChartGeometry",
    "IdentityReport",
    "GaussRouteMismatch",
    "geometry_at",
    "gauss_curvature_tensor",
    "grad_ricci_identities",
    "nk_identities",
    "nearly_kahler_defect",
    "schur_scan",
    "pointwise_data",
]


class GaussRouteMismatch(RuntimeError):
    """Christoffel-route and Gauss-equation curvature disagree."""


@dataclass(frozen=True)
class ChartGeometry:
    """Everything the identity checks need at one chart point."""

    point: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    J: np.ndarray
    christoffels: np.ndarray        # Gamma[m, j, k], symmetric in (j, k)
    R: FourTensor
    ricci: RicciData
    grad_tau: np.ndarray
    grad_tau_star: np.ndarray
    nabla_R: np.ndarray
    nabla_S: np.ndarray
    nabla_S_star: np.ndarray
    nabla_J: np.ndarray
    frame: np.ndarray               # columns g-orthonormal
    hermitian_point: HermitianPoint
    gauss_defect: Optional[float] = None


@dataclass(frozen=True)
class IdentityReport:
    """Max-norm residuals of catalog entries (1)-(5), (10)-(12).

    ``nk_defect`` is ``max |(nabla_X J) X|`` over frame vectors;
    ``kahler_defect`` is the full ``max |(nabla_X J) Y|`` (zero exactly
    for parallel J).
    """

    eq1_defect: float
    eq2_defect: float
    eq3_defect: float
    eq4_defect: float
    eq5_defect: float
    eq10_defect: float
    eq11_defect: float
    eq12_defect: float
    nk_defect: float
    kahler_defect: float


# ---------------------------------------------------------------------------
# derivative oracles


def _fd_stack(f, u, h, richardson):
    """Stack of central-difference partials, derivative axis appended."""
    d = u.shape[0]
    sample = np.asarray(f(u), dtype=float)
    out = np.empty(sample.shape + (d,))

    def central(step, a):
        e = np.zeros(d)
        e[a] = step
        return (np.asarray(f(u + e), dtype=float) - np.asarray(f(u - e), dtype=float)) / (2 * step)

    for a in range(d):
        if richardson:
            coarse = central(h, a)
            fine = central(h / 2, a)
            out[..., a] = (4.0 * fine - coarse) / 3.0
        else:
            out[..., a] = central(h, a)
    return out


class _Oracles:
    """Best-available derivative evaluators for one chart and base step.

    Per-order steps follow the defaults: order-1 differences at ``h``,
    the nested order-2 and order-3 stages at ``3h`` and ``10h``.
    """

    def __init__(self, chart: Chart, h: float):
        self.chart = chart
        self.h1 = h
        self.h2 = 3.0 * h
        self.h3 = 10.0 * h

    def g(self, u):
        return np.asarray(self.chart.metric(u), dtype=float)

    def dg(self, u):
        if self.chart.metric_d1 is not None:
            return np.asarray(self.chart.metric_d1(u), dtype=float)
        return _fd_stack(self.chart.metric, u, self.h1, richardson=True)

    def d2g(self, u):
        return np.asarray(self.chart.metric_d2(u), dtype=float)

    def d3g(self, u):
        return np.asarray(self.chart.metric_d3(u), dtype=float)

    def J(self, u):
        return np.asarray(self.chart.J_field(u), dtype=float)

    def dJ(self, u):
        if self.chart.J_d1 is not None:
            return np.asarray(self.chart.J_d1(u), dtype=float)
        return _fd_stack(self.chart.J_field, u, self.h1, richardson=True)

    @property
    def reach(self) -> float:
        """Largest stencil offset any evaluation may use."""
        r = 0.0
        if self.chart.metric_d1 is None:
            r += self.h1
        if self.chart.metric_d2 is None:
            r += self.h2
        if self.chart.metric_d3 is None:
            r += self.h3
        if self.chart.J_d1 is None:
            r = max(r, self.h1)
        return r


# ---------------------------------------------------------------------------
# geometry assembly


class _Engine:
    """Stage-wise evaluators: each stage differentiates the one below.

    Differencing the assembled lower-stage quantities (rather than
    assembling everything from one derivative jet at the base point)
    keeps the finite-difference route an honest numerical check: a jet
    assembled at a single point satisfies the Bianchi-type identities as
    polynomial identities regardless of oracle accuracy.
    """

    def __init__(self, chart: Chart, h: float):
        self.chart = chart
        self.orc = _Oracles(chart, h)

    # --- stage 1: metric jets and Christoffel symbols

    def first_kind(self, u):
        dg = self.orc.dg(u)
        return 0.5 * (
            np.einsum("kpj->pjk", dg)
            + np.einsum("jpk->pjk", dg)
            - np.einsum("jkp->pjk", dg)
        )

    def gamma(self, u):
        g = self.orc.g(u)
        return np.einsum("mp,pjk->mjk", np.linalg.inv(g), self.first_kind(u))

    # --- stage 2: curvature

    def dgamma(self, u):
        """dGamma[m, j, k, i] = d_i Gamma^m_jk."""
        if self.chart.metric_d2 is not None:
            g = self.orc.g(u)
            ginv = np.linalg.inv(g)
            dg = self.orc.dg(u)
            d2g = self.orc.d2g(u)
            A = self.first_kind(u)
            dginv = -np.einsum("mb,bca,cp->mpa", ginv, dg, ginv)
            dA = 0.5 * (
                np.einsum("kpji->pjki", d2g)
                + np.einsum("jpki->pjki", d2g)
                - np.einsum("jkpi->pjki", d2g)
            )
            return np.einsum("mpi,pjk->mjki", dginv, A) + np.einsum(
                "mp,pjki->mjki", ginv, dA
            )
        return _fd_stack(self.gamma, u, self.orc.h2, richardson=False)

    def curvature(self, u):
        """Rlow[i, j, k, l] from Christoffel first derivatives."""
        g = self.orc.g(u)
        Gamma = self.gamma(u)
        dGamma = self.dgamma(u)
        Rup = (
            np.einsum("mjki->mkij", dGamma)
            - np.einsum("mikj->mkij", dGamma)
            + np.einsum("mip,pjk->mkij", Gamma, Gamma)
            - np.einsum("mjp,pik->mkij", Gamma, Gamma)
        )
        return np.einsum("lm,mkij->ijkl", g, Rup)

    # --- stage 3: coordinate derivatives of curvature and Ricci data

    def ricci_packed(self, u):
        """S, S*, tau, tau* flattened into one vector (for one FD stack)."""
        g = self.orc.g(u)
        ginv = np.linalg.inv(g)
        J = self.orc.J(u)
        Rlow = self.curvature(u)
        S = np.einsum("ajkb,ab->jk", Rlow, ginv)
        S_star = np.einsum("ajcd,ck,db,ab->jk", Rlow, J, J, ginv, optimize=True)
        tau = np.einsum("jk,jk->", S, ginv)
        tau_star = np.einsum("jk,jk->", S_star, ginv)
        return np.concatenate([S.ravel(), S_star.ravel(), [tau], [tau_star]])

    def analytic_third_stage(self, u, g0, ginv, J0, dg, dJ, A, dginv, Gamma,
                             dGamma, Rup, Rlow, ric):
        """Exact dR, dS, dS*, dtau, dtau* from third metric derivatives."""
        d2g = self.orc.d2g(u)
        d3g = self.orc.d3g(u)
        dA = 0.5 * (
            np.einsum("kpji->pjki", d2g)
            + np.einsum("jpki->pjki", d2g)
            - np.einsum("jkpi->pjki", d2g)
        )
        d2A = 0.5 * (
            np.einsum("kpjia->pjkia", d3g)
            + np.einsum("jpkia->pjkia", d3g)
            - np.einsum("jkpia->pjkia", d3g)
        )
        d2ginv = -(
            np.einsum("mba,bci,cp->mpia", dginv, dg, ginv)
            + np.einsum("mb,bcia,cp->mpia", ginv, d2g, ginv)
            + np.einsum("mb,bci,cpa->mpia", ginv, dg, dginv)
        )
        d2Gamma = (
            np.einsum("mpia,pjk->mjkia", d2ginv, A)
            + np.einsum("mpi,pjka->mjkia", dginv, dA)
            + np.einsum("mpa,pjki->mjkia", dginv, dA)
            + np.einsum("mp,pjkia->mjkia", ginv, d2A)
        )
        dRup = (
            np.einsum("mjkia->mkija", d2Gamma)
            - np.einsum("mikja->mkija", d2Gamma)
            + np.einsum("mipa,pjk->mkija", dGamma, Gamma)
            + np.einsum("mip,pjka->mkija", Gamma, dGamma)
            - np.einsum("mjpa,pik->mkija", dGamma, Gamma)
            - np.einsum("mjp,pika->mkija", Gamma, dGamma)
        )
        dRlow = np.einsum("lma,mkij->ijkla", dg, Rup) + np.einsum(
            "lm,mkija->ijkla", g0, dRup
        )
        dS = np.einsum("abc,ajkb->jkc", dginv, Rlow) + np.einsum(
            "ab,ajkbc->jkc", ginv, dRlow
        )
        dS_star = (
            np.einsum("ijcde,ck,db,ib->jke", dRlow, J0, J0, ginv, optimize=True)
            + np.einsum("ijcd,cke,db,ib->jke", Rlow, dJ, J0, ginv, optimize=True)
            + np.einsum("ijcd,ck,dbe,ib->jke", Rlow, J0, dJ, ginv, optimize=True)
            + np.einsum("ijcd,ck,db,ibe->jke", Rlow, J0, J0, dginv, optimize=True)
        )
        grad_tau = np.einsum("jka,jk->a", dginv, ric.S) + np.einsum(
            "jk,jka->a", ginv, dS
        )
        grad_tau_star = np.einsum("jka,jk->a", dginv, ric.S_star) + np.einsum(
            "jk,jka->a", ginv, dS_star
        )
        return dRlow, dS, dS_star, grad_tau, grad_tau_star

    def fd_third_stage(self, u):
        """dR, dS, dS*, dtau, dtau* by differencing stage-2 evaluations."""
        d = self.chart.dim
        dRlow = _fd_stack(self.curvature, u, self.orc.h3, richardson=False)
        packed = _fd_stack(self.ricci_packed, u, self.orc.h3, richardson=False)
        nsq = d * d
        dS = packed[:nsq].reshape(d, d, d)
        dS_star = packed[nsq : 2 * nsq].reshape(d, d, d)
        grad_tau = packed[2 * nsq]
        grad_tau_star = packed[2 * nsq + 1]
        return dRlow, dS, dS_star, grad_tau, grad_tau_star


def geometry_at(chart: Chart, u, h: float = 1e-3, tol: float = CHART_TOL) -> ChartGeometry:
    """Levi-Civita data at a chart point.

    Christoffel symbols come from first metric derivatives, the curvature
    tensor from Christoffel first derivatives, covariant derivative
    stacks from curvature first derivatives; each stage uses the chart's
    analytic oracle when present and central differences of the stage
    below otherwise.  For charts carrying a sphere embedding the
    curvature is recomputed through the Gauss equation and the two routes
    must agree within ``tol``.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (chart.dim,):
        raise ValueError("coordinate dimension mismatch")
    eng = _Engine(chart, h)
    orc = eng.orc
    margin = max(2 * h, 1.2 * orc.reach)
    if not chart.domain.contains(u, margin=margin):
        raise ValueError("point too close to the domain boundary for the stencil")

    g0 = orc.g(u)
    try:
        L = np.linalg.cholesky(g0)
    except np.linalg.LinAlgError as exc:
        raise ValueError("metric is not positive definite at u") from exc
    ginv = np.linalg.inv(g0)
    frame = np.linalg.inv(L).T

    J0 = orc.J(u)
    P = HermitianPoint(g0, J0)
    j_sq, compat = structure_defects(P)
    if max(j_sq, compat) > tol:
        raise ValueError(
            f"chart (g, J) is not almost Hermitian at u (defects {j_sq:.2e}, {compat:.2e})"
        )

    dg = orc.dg(u)
    dJ = orc.dJ(u)
    A = eng.first_kind(u)
    Gamma = np.einsum("mp,pjk->mjk", ginv, A)
    dginv = -np.einsum("mb,bca,cp->mpa", ginv, dg, ginv)
    dGamma = eng.dgamma(u)

    Rup = (
        np.einsum("mjki->mkij", dGamma)
        - np.einsum("mikj->mkij", dGamma)
        + np.einsum("mip,pjk->mkij", Gamma, Gamma)
        - np.einsum("mjp,pik->mkij", Gamma, Gamma)
    )
    Rlow = np.einsum("lm,mkij->ijkl", g0, Rup)
    R = FourTensor(Rlow)

    gauss_defect = None
    if chart.embedding is not None:
        gauss = gauss_curvature_tensor(chart, u)
        gauss_defect = float(np.abs(Rlow - gauss.components).max())
        if gauss_defect > tol:
            raise GaussRouteMismatch(
                f"curvature routes disagree by {gauss_defect:.3e} (tol {tol:.1e})"
            )

    ric = contractions(R, P)

    if chart.metric_d3 is not None and chart.metric_d2 is not None:
        dRlow, dS, dS_star, grad_tau, grad_tau_star = eng.analytic_third_stage(
            u, g0, ginv, J0, dg, dJ, A, dginv, Gamma, dGamma, Rup, Rlow, ric
        )
    else:
        dRlow, dS, dS_star, grad_tau, grad_tau_star = eng.fd_third_stage(u)

    # covariant derivatives (derivative axis first)
    nabla_R = (
        np.einsum("ijkla->aijkl", dRlow)
        - np.einsum("mai,mjkl->aijkl", Gamma, Rlow)
        - np.einsum("maj,imkl->aijkl", Gamma, Rlow)
        - np.einsum("mak,ijml->aijkl", Gamma, Rlow)
        - np.einsum("mal,ijkm->aijkl", Gamma, Rlow)
    )
    nabla_S = (
        np.einsum("jka->ajk", dS)
        - np.einsum("maj,mk->ajk", Gamma, ric.S)
        - np.einsum("mak,jm->ajk", Gamma, ric.S)
    )
    nabla_S_star = (
        np.einsum("jka->ajk", dS_star)
        - np.einsum("maj,mk->ajk", Gamma, ric.S_star)
        - np.einsum("mak,jm->ajk", Gamma, ric.S_star)
    )
    nabla_J = (
        np.einsum("ija->aij", dJ)
        + np.einsum("iam,mj->aij", Gamma, J0)
        - np.einsum("maj,im->aij", Gamma, J0)
    )

    return ChartGeometry(
        point=u,
        g=g0,
        ginv=ginv,
        J=J0,
        christoffels=Gamma,
        R=R,
        ricci=ric,
        grad_tau=grad_tau,
        grad_tau_star=grad_tau_star,
        nabla_R=nabla_R,
        nabla_S=nabla_S,
        nabla_S_star=nabla_S_star,
        nabla_J=nabla_J,
        frame=frame,
        hermitian_point=P,
        gauss_defect=gauss_defect,
    )


def gauss_curvature_tensor(chart: Chart, u) -> FourTensor:
    """Gauss-equation curvature of the unit sphere: R1 of the induced metric.

    The second fundamental form of the unit sphere is ``-g(x, y) * normal``,
    so the ambient-flat Gauss equation collapses to the constant-curvature
    tensor of the pulled-back metric.
    """
    if chart.embedding is None:
        raise ValueError("chart carries no embedding")
    u = np.asarray(u, dtype=float)
    M = chart.embedding.differential(u)
    G = M.T @ M
    return FourTensor(np.einsum("jk,il->ijkl", G, G) - np.einsum("ik,jl->ijkl", G, G))


# ---------------------------------------------------------------------------
# identity defects


def _frame3(D, E):
    return np.einsum("abc,ai,bj,ck->ijk", D, E, E, E, optimize=True)


def _eq1_defect(geom: ChartGeometry) -> float:
    div_r = np.einsum("aijkl,al->ijk", geom.nabla_R, geom.ginv)
    rhs = geom.nabla_S - geom.nabla_S.transpose(1, 0, 2)
    # nabla_S[a, j, k]: derivative slot first, so rhs[x, y, z] matches
    return float(np.abs(_frame3(div_r - rhs, geom.frame)).max())


def _eq2_defect(geom: ChartGeometry) -> float:
    div_s = np.einsum("ajk,ak->j", geom.nabla_S, geom.ginv)
    return float(np.abs(geom.frame.T @ (div_s - 0.5 * geom.grad_tau)).max())


def _eq3_defect(geom: ChartGeometry) -> float:
    div = np.einsum("ajk,ak->j", geom.nabla_S_star, geom.ginv)
    return float(np.abs(geom.frame.T @ (div - 0.5 * geom.grad_tau_star)).max())


def _eq4_defect(geom: ChartGeometry) -> float:
    return float(np.abs(geom.frame.T @ (geom.grad_tau - geom.grad_tau_star)).max())


def _coupling(D: np.ndarray, geom: ChartGeometry) -> np.ndarray:
    """D((nabla_a J) Y, JZ) + D(JY, (nabla_a J) Z) as a stack [a, j, k]."""
    return np.einsum("mp,amj,pk->ajk", D, geom.nabla_J, geom.J) + np.einsum(
        "mp,mj,apk->ajk", D, geom.J, geom.nabla_J
    )


def _eq5_defect(geom: ChartGeometry) -> float:
    D = geom.ricci.S - geom.ricci.S_star
    nabla_D = geom.nabla_S - geom.nabla_S_star
    delta = 2.0 * nabla_D - _coupling(D, geom)
    return float(np.abs(_frame3(delta, geom.frame)).max())


def _eq10_defect(geom: ChartGeometry) -> float:
    delta = 2.0 * geom.nabla_S - _coupling(geom.ricci.S, geom)
    return float(np.abs(_frame3(delta, geom.frame)).max())


def _eq11_defect(geom: ChartGeometry) -> float:
    delta = geom.nabla_S + np.einsum(
        "ba,mj,bmk->ajk", geom.J, geom.J, geom.nabla_S
    )
    return float(np.abs(_frame3(delta, geom.frame)).max())


def _eq12_defect(geom: ChartGeometry) -> float:
    delta = (
        geom.nabla_S
        + geom.nabla_S.transpose(1, 2, 0)
        + geom.nabla_S.transpose(2, 0, 1)
    )
    return float(np.abs(_frame3(delta, geom.frame)).max())


def _nk_values(geom: ChartGeometry) -> tuple[float, float, float]:
    E = geom.frame
    V = np.einsum("aij,ac,jd->icd", geom.nabla_J, E, E)  # (nabla_{E_c} J) E_d
    norms = np.sqrt(np.einsum("icd,ik,kcd->cd", V, geom.g, V))
    nk = float(np.max(np.diag(norms)))
    kahler = float(norms.max())
    W = V + V.transpose(0, 2, 1)
    skew = float(np.sqrt(np.einsum("icd,ik,kcd->cd", W, geom.g, W)).max())
    return nk, kahler, skew


def grad_ricci_identities(chart: Chart, u, h: float = 1e-3,
                          tol: float = CHART_TOL) -> tuple[float, float]:
    """Residuals of the metric-independent identities (1) and (2)."""
    geom = geometry_at(chart, u, h=h, tol=tol)
    return _eq1_defect(geom), _eq2_defect(geom)


def nk_identities(chart: Chart, u, h: float = 1e-3, tol: float = CHART_TOL) -> IdentityReport:
    """Full identity report at one chart point.

    Entries (1)-(2) hold for every metric; (3)-(5) and (10)-(12) are only
    expected to vanish when the chart is nearly Kahler at ``u`` (check
    ``nk_defect`` first).
    """
    geom = geometry_at(chart, u, h=h, tol=tol)
    nk, kahler, _ = _nk_values(geom)
    return IdentityReport(
        eq1_defect=_eq1_defect(geom),
        eq2_defect=_eq2_defect(geom),
        eq3_defect=_eq3_defect(geom),
        eq4_defect=_eq4_defect(geom),
        eq5_defect=_eq5_defect(geom),
        eq10_defect=_eq10_defect(geom),
        eq11_defect=_eq11_defect(geom),
        eq12_defect=_eq12_defect(geom),
        nk_defect=nk,
        kahler_defect=kahler,
    )


def nearly_kahler_defect(chart: Chart, u, h: float = 1e-3,
                         tol: float = CHART_TOL) -> tuple[float, float, float]:
    """(nk, kahler, skew) norms of the J-derivative at a chart point.

    ``nk = max |(nabla_X J) X|`` over frame vectors; ``kahler`` the full
    ``max |(nabla_X J) Y|``; ``skew = max |(nabla_X J) Y + (nabla_Y J) X|``
    (equivalent to ``nk`` by polarization, reported separately).
    """
    geom = geometry_at(chart, u, h=h, tol=tol)
    return _nk_values(geom)


def schur_scan(chart: Chart, points=None, budget: int = 10, seed: int = 0,
               h: float = 1e-3, tol: float = CHART_TOL):
    """Trace value (8) of nu across chart points.

    Returns ``(nu_values, spread)``.  When ``points`` is omitted,
    ``budget`` points are sampled (seeded) from the shrunken domain box.
    A spread at the chart-tolerance level is the numerical signature of
    nu being constant.
    """
    if points is None:
        points = [
            chart.domain.sample(substream(seed, "schur-point", i))
            for i in range(budget)
        ]
    n = chart.dim // 2
    values = []
    for u in points:
        geom = geometry_at(chart, u, h=h, tol=tol)
        values.append(trace_nu(geom.ricci, n))
    spread = float(max(values) - min(values)) if values else 0.0
    return values, spread


def pointwise_data(chart: Chart, u, h: float = 1e-3,
                   tol: float = CHART_TOL) -> tuple[HermitianPoint, FourTensor]:
    """Chart curvature at ``u`` expressed in a g-orthonormal frame.

    The returned pair feeds the pointwise classifier directly (use the
    chart tolerance there).
    """
    geom = geometry_at(chart, u, h=h, tol=tol)
    E = geom.frame
    J_frame = np.linalg.solve(E, geom.J @ E)
    R_frame = FourTensor(_kernels.transform4(geom.R.components, E))
    return HermitianPoint(np.eye(chart.dim), J_frame), R_frame
