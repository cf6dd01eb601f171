"""Pointwise curvature invariants, identity residuals and classification.

This module owns the algebraic half of the toolkit's identity catalog.
With ``S(y, z) = sum_i R(E_i, y, z, E_i)`` and ``S*(y, z) = sum_i
R(E_i, y, Jz, JE_i)`` the two Ricci contractions over any g-orthonormal
frame, ``tau``/``tau*`` their traces, ``R1``/``R2`` the constant-curvature
and Kahler-form tensors and ``psi(S)`` the Ricci coupling (see
:mod:`nkcurv.tensors`), the catalog entries checked here are:

  (6)  R = (1/6) psi(S) + nu R1 - ((2n-1)/3) nu R2
  (7)  3 S* - (n+1) S = (1/(2n)) (3 tau* - (n+1) tau) g
  (8)  nu = ((2n+1) tau - 3 tau*) / (8 n (n^2 - 1))
  (9)  S(x, x) - R(x, Jx, Jx, x) = 2 (n-1) nu          (unit x)
  (13) S(X, X) + S(Y, Y) = 0                           (unit X, Y in
                                                        distinct factors)

(6)-(9) hold for curvature data that is J-invariant in all four slots and
has pointwise constant sectional curvature ``nu`` on antiholomorphic
planes; (13) is the constraint a curvature product with ``nu = 0`` puts
on its factor Ricci curvatures.  The kernel lemma behind (6) states that
a (0,4) tensor with the four curvature symmetries

  1) T(x,y,z,u) = -T(y,x,z,u)
  2) T(x,y,z,u) + T(y,z,x,u) + T(z,x,y,u) = 0
  3) T(x,y,z,u) = -T(x,y,u,z)
  4) T(x,y,z,u) = T(Jx,Jy,Jz,Ju)

that vanishes on every holomorphic and antiholomorphic 2-plane is zero;
:func:`lemma_kernel_singular_values` realises it as a finite rank check.

Differential entries (1)-(5) and (10)-(12) of the catalog live in
:mod:`nkcurv.diffgeo`.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .defaults import DEFAULT_REFINE_STEPS, DEFAULT_SAMPLES, STRUCTURAL_TOL
from .hermitian import (
    HermitianPoint,
    TwoPlane,
    random_unit_vector,
    sample_antiholomorphic_plane,
)
from .rng import substream
from .tensors import (
    FourTensor,
    ProductSpec,
    constant_curvature_tensor,
    kahler_form_tensor,
    ricci_kahler_coupling,
)

__all__ = [
    "RicciData",
    "Prop1Report",
    "Label",
    "ClassLabel",
    "LemmaHypothesisError",
    "sectional",
    "contractions",
    "symmetry_defects",
    "rk_defect",
    "first_bianchi_defect",
    "lemma_defect",
    "antiholo_range",
    "reconstruct_curvature",
    "trace_nu",
    "prop1_report",
    "eq13_value",
    "classify",
    "curvature_symmetry_space",
    "canonical_plane_family",
    "lemma_kernel_singular_values",
]


class LemmaHypothesisError(ValueError):
    """Conditions 1-4 fail, so a condition-5 defect would be meaningless."""


@dataclass(frozen=True)
class RicciData:
    """Contractions of a (0,4) tensor: S, S* and their traces."""

    S: np.ndarray
    S_star: np.ndarray
    tau: float
    tau_star: float


@dataclass(frozen=True)
class Prop1Report:
    """Residuals of catalog entries (6)-(9) plus symmetry diagnostics.

    ``nu_hat`` is the trace value (8); ``nu_min``/``nu_max`` the sampled
    extrema of sectional curvature over antiholomorphic planes.  All
    defect fields are max-norms measured in a g-orthonormal frame and are
    nonnegative.
    """

    nu_hat: float
    nu_min: float
    nu_max: float
    eq6_residual: float
    eq7_defect: float
    eq9_max_defect: float
    rk_defect: float
    bianchi_defect: float


class Label(str, enum.Enum):
    CN = "Cn"
    CPN = "CPn"
    CDN = "CDn"
    S6 = "S6"
    NON_CONSTANT = "NonConstant"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class ClassLabel:
    """Classifier verdict with the invariants it was based on."""

    label: Label
    nu: float
    holomorphic_curvature_estimate: float
    tau_gap: float
    nu_min: float
    nu_max: float


def sectional(R: FourTensor, P: HermitianPoint, plane: TwoPlane,
              tol: float = STRUCTURAL_TOL) -> float:
    """Sectional value R(x, y, y, x) of a g-orthonormal plane."""
    worst = max(
        abs(P.inner(plane.x, plane.x) - 1.0),
        abs(P.inner(plane.y, plane.y) - 1.0),
        abs(P.inner(plane.x, plane.y)),
    )
    if worst > tol:
        raise ValueError(f"plane basis is not g-orthonormal (defect {worst:.3e})")
    return R(plane.x, plane.y, plane.y, plane.x)


def contractions(R: FourTensor, P: HermitianPoint) -> RicciData:
    """Ricci data of ``R``.

    Uses ``sum_i E_i E_i^T = g^{-1}`` for any g-orthonormal frame, so the
    result is frame-independent by construction.
    """
    if R.dim != P.dim:
        raise ValueError("tensor and point dimensions differ")
    Rc = R.components
    ginv = P.ginv
    J = P.J
    S = np.einsum("ajkb,ab->jk", Rc, ginv, optimize=True)
    S_star = np.einsum("ajcd,ck,db,ab->jk", Rc, J, J, ginv, optimize=True)
    tau = float(np.einsum("jk,jk->", S, ginv))
    tau_star = float(np.einsum("jk,jk->", S_star, ginv))
    return RicciData(S=S, S_star=S_star, tau=tau, tau_star=tau_star)


def symmetry_defects(T: FourTensor, P: HermitianPoint) -> tuple[float, float, float, float]:
    """Max-norm violations of symmetry conditions 1-4 (see module docstring)."""
    Tc = T.components
    c1 = _kernels.antisym12_defect(Tc)
    c2 = _kernels.bianchi_defect(Tc)
    c3 = _kernels.antisym34_defect(Tc)
    c4 = rk_defect(T, P)
    return c1, c2, c3, c4


def rk_defect(R: FourTensor, P: HermitianPoint) -> float:
    """max |R(x,y,z,u) - R(Jx,Jy,Jz,Ju)| over basis tuples."""
    Rc = R.components
    return float(np.abs(Rc - _kernels.transform4(Rc, P.J)).max())


def first_bianchi_defect(T: FourTensor) -> float:
    return _kernels.bianchi_defect(T.components)


def _holomorphic_pairs(P: HermitianPoint, count: int, seed: int, tag: str):
    X = np.empty((count, P.dim))
    for i in range(count):
        X[i] = random_unit_vector(P, substream(seed, tag, i))
    Y = X @ P.J.T
    return X, Y


def _antiholomorphic_pairs(P: HermitianPoint, count: int, seed: int):
    X = np.empty((count, P.dim))
    Y = np.empty((count, P.dim))
    for i in range(count):
        pl = sample_antiholomorphic_plane(P, seed, i)
        X[i], Y[i] = pl.x, pl.y
    return X, Y


def lemma_defect(T: FourTensor, P: HermitianPoint, plane_budget: int = 200,
                 seed: int = 0, hypothesis_tol: float = STRUCTURAL_TOL
                 ) -> tuple[float, float]:
    """Condition-5 defect of a tensor already satisfying conditions 1-4.

    Returns ``(condition5_defect, tensor_norm)`` where the first entry is
    ``max |T(x, y, y, x)|`` over ``plane_budget`` sampled holomorphic and
    antiholomorphic planes.  By the kernel lemma a small condition-5
    defect over enough planes forces a small tensor norm.  Raises
    :class:`LemmaHypothesisError` when conditions 1-4 do not hold within
    ``hypothesis_tol`` (relative to the tensor norm).
    """
    norm = T.max_norm()
    c = symmetry_defects(T, P)
    bound = hypothesis_tol * max(1.0, norm)
    if max(c) > bound:
        raise LemmaHypothesisError(
            f"symmetry conditions 1-4 violated (defects {c}, allowed {bound:.3e})"
        )
    n_hol = plane_budget // 2
    n_anti = plane_budget - n_hol
    Xh, Yh = _holomorphic_pairs(P, n_hol, seed, "lemma-hol")
    Xa, Ya = _antiholomorphic_pairs(P, n_anti, seed)
    vals_h = _kernels.sectional_batch(T.components, Xh, Yh)
    vals_a = _kernels.sectional_batch(T.components, Xa, Ya)
    worst = float(max(np.abs(vals_h).max(), np.abs(vals_a).max()))
    return worst, norm


def _reproject_plane(P: HermitianPoint, x: np.ndarray, y: np.ndarray):
    """Re-enforce g-orthonormality and g(Jx, y) = 0; None when degenerate."""
    r = P.norm(x)
    if r < 1e-8:
        return None
    x = x / r
    jx = P.jmul(x)
    jn = P.norm(jx)
    if jn < 1e-8:
        return None
    jx = jx / jn
    for _ in range(2):
        y = y - P.inner(x, y) * x - P.inner(jx, y) * jx
    r = P.norm(y)
    if r < 1e-3:
        return None
    return x, y / r


def _refine_extremum(R: FourTensor, P: HermitianPoint, x, y, steps: int, sign: float):
    """Deterministic coordinate ascent (sign=+1) / descent (-1) over the
    antiholomorphic Grassmannian; moves keep g(Jx, y) = 0 exactly."""
    d = P.dim
    Rc = R.components
    best = R(x, y, y, x)
    step = 0.2
    for _ in range(steps):
        cand = []
        for a in range(d):
            w = np.zeros(d)
            w[a] = 1.0
            for t in (step, -step):
                moved = _reproject_plane(P, x + t * w, y.copy())
                if moved is not None:
                    cand.append(moved)
                moved = _reproject_plane(P, x.copy(), y + t * w)
                if moved is not None:
                    cand.append(moved)
        if not cand:
            break
        X = np.array([c[0] for c in cand])
        Y = np.array([c[1] for c in cand])
        vals = _kernels.sectional_batch(Rc, X, Y)
        idx = int(np.argmax(sign * vals))
        if sign * (vals[idx] - best) > 1e-15:
            best = float(vals[idx])
            x, y = cand[idx]
        else:
            step *= 0.5
            if step < 1e-8:
                break
    return best


def antiholo_range(R: FourTensor, P: HermitianPoint, samples: int = DEFAULT_SAMPLES,
                   refine_steps: int = DEFAULT_REFINE_STEPS, seed: int = 0
                   ) -> tuple[float, float]:
    """Estimated (min, max) of sectional curvature over antiholomorphic planes.

    Seeded sampling followed by local descent/ascent from the few most
    extreme samples; every move preserves antiholomorphicity, so for data
    whose antiholomorphic curvature is constant the returned interval
    collapses to that constant at round-off.  Deterministic per seed.
    """
    if P.dim < 4:
        raise ValueError("antiholomorphic planes need dim >= 4")
    if samples < 1:
        raise ValueError("samples must be positive")
    X, Y = _antiholomorphic_pairs(P, samples, seed)
    vals = _kernels.sectional_batch(R.components, X, Y)
    order = np.argsort(vals, kind="stable")
    starts = min(3, samples)
    lo = float(vals[order[0]])
    hi = float(vals[order[-1]])
    if refine_steps > 0:
        for i in order[:starts]:
            lo = min(lo, _refine_extremum(R, P, X[i].copy(), Y[i].copy(),
                                          refine_steps, -1.0))
        for i in order[-starts:]:
            hi = max(hi, _refine_extremum(R, P, X[i].copy(), Y[i].copy(),
                                          refine_steps, +1.0))
    return lo, hi


def reconstruct_curvature(S: np.ndarray, nu: float, P: HermitianPoint) -> FourTensor:
    """Right-hand side of catalog entry (6) for given Ricci data and nu."""
    if P.dim < 4:
        raise ValueError("reconstruction needs dim >= 4")
    n = P.n
    psi = ricci_kahler_coupling(P, S)
    R1 = constant_curvature_tensor(P)
    R2 = kahler_form_tensor(P)
    return (1.0 / 6.0) * psi + nu * R1 - ((2 * n - 1) / 3.0) * nu * R2


def _frame_transform2(M: np.ndarray, E: np.ndarray) -> np.ndarray:
    return E.T @ M @ E


def trace_nu(ric: RicciData, n: int) -> float:
    """Catalog entry (8) applied to precomputed Ricci traces."""
    if n < 2:
        raise ValueError("entry (8) needs dim >= 4")
    return ((2 * n + 1) * ric.tau - 3 * ric.tau_star) / (8 * n * (n * n - 1))


def prop1_report(R: FourTensor, P: HermitianPoint, samples: int = DEFAULT_SAMPLES,
                 refine_steps: int = DEFAULT_REFINE_STEPS, seed: int = 0) -> Prop1Report:
    """Evaluate catalog entries (6)-(9) on pointwise curvature data.

    ``eq6_residual`` reconstructs R from its own contraction S and the
    trace value ``nu_hat`` and reports the max-norm difference;
    ``eq7_defect`` and ``eq9_max_defect`` are the residuals of (7) and
    (9); J-invariance and first-Bianchi defects come along since (6)-(9)
    presuppose them.  All in a g-orthonormal frame.
    """
    if P.dim < 4:
        raise ValueError("the decomposition identities need dim >= 4")
    n = P.n
    E = P.orthonormal_frame_matrix()
    ric = contractions(R, P)
    nu_hat = trace_nu(ric, n)

    recon = reconstruct_curvature(ric.S, nu_hat, P)
    eq6 = float(np.abs(_kernels.transform4(
        R.components - recon.components, E)).max())

    coef = (3 * ric.tau_star - (n + 1) * ric.tau) / (2 * n)
    eq7_mat = 3 * ric.S_star - (n + 1) * ric.S - coef * P.g
    eq7 = float(np.abs(_frame_transform2(eq7_mat, E)).max())

    m = max(8, samples // 4)
    X = np.empty((m, P.dim))
    for i in range(m):
        X[i] = random_unit_vector(P, substream(seed, "unit-x", i))
    sxx = np.einsum("jk,mj,mk->m", ric.S, X, X)
    hol = _kernels.sectional_batch(R.components, X, X @ P.J.T)
    eq9 = float(np.abs(sxx - hol - 2 * (n - 1) * nu_hat).max())

    nu_min, nu_max = antiholo_range(R, P, samples=samples,
                                    refine_steps=refine_steps, seed=seed)
    return Prop1Report(
        nu_hat=nu_hat,
        nu_min=nu_min,
        nu_max=nu_max,
        eq6_residual=eq6,
        eq7_defect=eq7,
        eq9_max_defect=eq9,
        rk_defect=rk_defect(R, P),
        bianchi_defect=first_bianchi_defect(R),
    )


def eq13_value(spec: ProductSpec, X: np.ndarray, Y: np.ndarray,
               tol: float = STRUCTURAL_TOL) -> float:
    """S(X, X) + S(Y, Y) for unit vectors in distinct product factors."""
    P = spec.point
    fx, fy = spec.factor_of(X), spec.factor_of(Y)
    if fx < 0 or fy < 0:
        raise ValueError("vectors must be supported in a single factor each")
    if fx == fy:
        raise ValueError("vectors must lie in distinct factors")
    for v in (X, Y):
        if abs(P.inner(v, v) - 1.0) > tol:
            raise ValueError("factor vectors must be unit")
    ric = contractions(spec.tensor, P)
    return float(X @ ric.S @ X + Y @ ric.S @ Y)


def classify(R: FourTensor, P: HermitianPoint, samples: int = DEFAULT_SAMPLES,
             refine_steps: int = DEFAULT_REFINE_STEPS, seed: int = 0,
             tol: float = STRUCTURAL_TOL) -> ClassLabel:
    """Label pointwise curvature data by model space.

    Decision order (first match wins):

    * sampled antiholomorphic curvature spread above ``tol`` (relative to
      the tensor scale) -> ``NonConstant``;
    * vanishing tensor -> ``Cn``;
    * J-invariant with ``tau = tau*`` (Kahler-type) -> ``CPn`` / ``CDn`` /
      ``Cn`` by the sign of nu;
    * dimension 6 with ``tau != tau*`` and ``R = nu * R1`` -> ``S6``;
    * otherwise ``Indeterminate``.

    Structural inputs use the default ``tol``; chart-derived inputs
    should pass the chart tolerance instead.  Requires ``dim >= 6``.
    """
    if P.dim < 6:
        raise ValueError("classification applies to dim >= 6 only")
    d, n = P.dim, P.n

    # move to a g-orthonormal frame so max-norms are scale-meaningful
    E = P.orthonormal_frame_matrix()
    Rt = FourTensor(_kernels.transform4(R.components, E))
    Pt = HermitianPoint(np.eye(d), np.linalg.solve(E, P.J @ E))

    scale = Rt.max_norm()
    ric = contractions(Rt, Pt)
    tau_gap = ric.tau - ric.tau_star

    m = max(8, samples // 4)
    X = np.empty((m, d))
    for i in range(m):
        X[i] = random_unit_vector(Pt, substream(seed, "unit-x", i))
    mu_est = float(np.mean(_kernels.sectional_batch(
        Rt.components, X, X @ Pt.J.T)))

    if scale <= tol:
        return ClassLabel(Label.CN, 0.0, mu_est, tau_gap, 0.0, 0.0)

    nu_min, nu_max = antiholo_range(Rt, Pt, samples=samples,
                                    refine_steps=refine_steps, seed=seed)
    nu_hat = trace_nu(ric, n)

    def verdict(label: Label) -> ClassLabel:
        return ClassLabel(label, nu_hat, mu_est, tau_gap, nu_min, nu_max)

    if nu_max - nu_min > tol * scale:
        return verdict(Label.NON_CONSTANT)

    kahler_type = (
        rk_defect(Rt, Pt) <= tol * scale
        and abs(tau_gap) <= tol * scale * d * d
    )
    if kahler_type:
        if nu_hat > tol * scale:
            return verdict(Label.CPN)
        if nu_hat < -tol * scale:
            return verdict(Label.CDN)
        return verdict(Label.CN)

    if d == 6:
        R1 = constant_curvature_tensor(Pt)
        if np.abs(Rt.components - nu_hat * R1.components).max() <= tol * scale:
            return verdict(Label.S6)

    return verdict(Label.INDETERMINATE)


# ---------------------------------------------------------------------------
# kernel lemma as finite linear algebra


def curvature_symmetry_space(P: HermitianPoint, eig_tol: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (columns) of the tensors satisfying conditions 1-4.

    Brute force: stack the four linear constraint maps on the full
    ``d^4``-dimensional component space and return the null space of the
    normal matrix.  Intended for small dimensions (d <= 8).
    """
    d = P.dim
    N = d ** 4
    eye = np.eye(N).reshape(N, d, d, d, d)
    J = P.J

    blocks = [
        (eye + eye.transpose(0, 2, 1, 3, 4)).reshape(N, N),
        (eye + eye.transpose(0, 2, 3, 1, 4) + eye.transpose(0, 3, 1, 2, 4)).reshape(N, N),
        (eye + eye.transpose(0, 1, 2, 4, 3)).reshape(N, N),
    ]
    jj = np.einsum("nabcd,ai->nibcd", eye, J)
    jj = np.einsum("nibcd,bj->nijcd", jj, J)
    jj = np.einsum("nijcd,ck->nijkd", jj, J)
    jj = np.einsum("nijkd,dl->nijkl", jj, J)
    blocks.append((eye - jj).reshape(N, N))

    normal = np.zeros((N, N))
    for b in blocks:
        normal += b @ b.T
    # rows of each block are the constraints; b[n] is the image of basis
    # tensor n, so the constraint matrix is b.T and the normal matrix is
    # sum b b^T as accumulated above
    w, V = np.linalg.eigh(normal)
    null = w <= eig_tol * max(1.0, w.max())
    return V[:, null]


def canonical_plane_family(P: HermitianPoint, seed: int = 0, extra: int = 200):
    """Deterministic evaluation planes for the kernel lemma rank check.

    Returns ``(X, Y)`` row-paired spanning vectors of holomorphic and
    antiholomorphic planes: a structured family built from the coordinate
    basis (single vectors, pair sums and differences) plus ``extra``
    seeded planes of each kind.  Spanning pairs need not be orthonormal;
    on the condition 1-4 space, ``T(x, y, y, x)`` only picks up the plane
    and a positive scale factor.
    """
    d = P.dim
    vecs = [np.eye(d)[i] for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros(d)
            e[i] = e[j] = 1.0 / np.sqrt(2.0)
            vecs.append(e.copy())
            e[j] = -e[j]
            vecs.append(e)

    xs, ys = [], []
    for v in vecs:
        xs.append(v)
        ys.append(P.jmul(v))
    for a, va in enumerate(vecs):
        x = va / P.norm(va)
        jx = P.jmul(x)
        for b, vb in enumerate(vecs):
            if a == b:
                continue
            w = vb - P.inner(x, vb) * x - P.inner(jx, vb) * jx
            r = P.norm(w)
            if r > 0.35:
                xs.append(x)
                ys.append(w / r)

    Xh, Yh = _holomorphic_pairs(P, extra, seed, "lemma-kernel-hol")
    Xa, Ya = _antiholomorphic_pairs(P, extra, seed)
    X = np.vstack([np.array(xs), Xh, Xa])
    Y = np.vstack([np.array(ys), Yh, Ya])
    return X, Y


def lemma_kernel_singular_values(P: HermitianPoint, seed: int = 0,
                                 extra: int = 200):
    """Singular values of plane evaluation restricted to the 1-4 space.

    The kernel lemma predicts a trivial kernel: the smallest singular
    value stays bounded away from zero relative to the largest.  Returns
    ``(singular_values, space_dimension)``.
    """
    B = curvature_symmetry_space(P)
    if B.shape[1] == 0:
        return np.zeros(0), 0
    X, Y = canonical_plane_family(P, seed=seed, extra=extra)
    W = np.einsum("mi,mj,mk,ml->mijkl", X, Y, Y, X).reshape(X.shape[0], -1)
    M = W @ B
    svals = np.linalg.svd(M, compute_uv=False)
    return svals, B.shape[1]
