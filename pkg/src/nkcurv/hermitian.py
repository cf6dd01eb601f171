"""Pointwise Hermitian linear algebra.

A :class:`HermitianPoint` is the tangent-space arena everything else works
in: an even-dimensional real inner-product space ``(R^d, g)`` together
with an almost complex structure ``J`` (``J^2 = -I``, ``g(Jx, Jy) =
g(x, y)``).  This module provides construction, structure diagnostics,
Gram-Schmidt frames, 2-plane classification (holomorphic / antiholomorphic
/ generic) and deterministic sampling of antiholomorphic planes.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to share across threads.
"""

from dataclasses import dataclass, field

import numpy as np

from .defaults import INDEPENDENCE_TOL, STRUCTURAL_TOL
from .rng import substream

__all__ = [
    "HermitianPoint",
    "TwoPlane",
    "Frame",
    "standard_complex_structure",
    "make_standard_point",
    "structure_defects",
    "gram_schmidt",
    "orthonormalize",
    "plane_type",
    "sample_antiholomorphic_plane",
    "random_unit_vector",
    "random_orthonormal_frame",
]


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class HermitianPoint:
    """Inner product ``g`` and almost complex structure ``J`` on ``R^dim``.

    Only shape sanity is enforced at construction; how far ``(g, J)`` is
    from an actual almost Hermitian structure is measured by
    :func:`structure_defects`.
    """

    g: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        g = _freeze(self.g)
        J = _freeze(self.J)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("metric must be a square matrix")
        if J.shape != g.shape:
            raise ValueError(
                f"dimension mismatch: g is {g.shape}, J is {J.shape}"
            )
        if g.shape[0] % 2 != 0 or g.shape[0] == 0:
            raise ValueError("dimension must be a positive even integer")
        if not np.allclose(g, g.T, atol=1e-12 * max(1.0, np.abs(g).max())):
            raise ValueError("metric must be symmetric")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "J", J)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @property
    def n(self) -> int:
        return self.dim // 2

    @property
    def ginv(self) -> np.ndarray:
        cached = self.__dict__.get("_ginv")
        if cached is None:
            cached = _freeze(np.linalg.inv(self.g))
            object.__setattr__(self, "_ginv", cached)
        return cached

    def inner(self, x, y) -> float:
        return float(x @ self.g @ y)

    def norm(self, x) -> float:
        return float(np.sqrt(max(0.0, self.inner(x, x))))

    def jmul(self, x) -> np.ndarray:
        return self.J @ x

    def orthonormal_frame_matrix(self) -> np.ndarray:
        """Columns form a g-orthonormal basis (inverse Cholesky transpose)."""
        L = np.linalg.cholesky(self.g)
        return np.linalg.inv(L).T


@dataclass(frozen=True)
class TwoPlane:
    """Span of two vectors; the ops that consume it require g-orthonormality."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _freeze(self.x))
        object.__setattr__(self, "y", _freeze(self.y))


@dataclass(frozen=True)
class Frame:
    """g-orthonormal basis, stored as the columns of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vectors", _freeze(self.vectors))

    def __len__(self) -> int:
        return self.vectors.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.vectors[:, i]

    def gram_defect(self, P: HermitianPoint) -> float:
        G = self.vectors.T @ P.g @ self.vectors
        return float(np.abs(G - np.eye(len(self))).max())


def standard_complex_structure(dim: int) -> np.ndarray:
    """Block-diagonal J0 with 2x2 blocks [[0, -1], [1, 0]]."""
    if dim % 2 != 0 or dim <= 0:
        raise ValueError("dimension must be a positive even integer")
    J = np.zeros((dim, dim))
    for k in range(dim // 2):
        J[2 * k + 1, 2 * k] = 1.0
        J[2 * k, 2 * k + 1] = -1.0
    return J


def make_standard_point(n: int) -> HermitianPoint:
    """Flat model: R^{2n} with the identity metric and J0."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    dim = 2 * n
    return HermitianPoint(np.eye(dim), standard_complex_structure(dim))


def structure_defects(P: HermitianPoint) -> tuple[float, float]:
    """How far (g, J) is from an almost Hermitian structure.

    Returns ``(j_square_defect, compat_defect)``: the max-norm of
    ``J^2 + I`` and the largest deviation of ``g(Je_i, Je_j)`` from
    ``g(e_i, e_j)`` over basis pairs.  Both vanish (to round-off) exactly
    when ``P`` is almost Hermitian.
    """
    d = P.dim
    j_square = float(np.abs(P.J @ P.J + np.eye(d)).max())
    compat = float(np.abs(P.J.T @ P.g @ P.J - P.g).max())
    return j_square, compat


def gram_schmidt(vectors, g: np.ndarray, independence_tol: float = INDEPENDENCE_TOL):
    """Modified Gram-Schmidt in the inner product of the matrix ``g``."""
    basis: list[np.ndarray] = []
    for v in vectors:
        v = np.array(v, dtype=float)
        scale = max(float(np.sqrt(v @ g @ v)), 1.0)
        # two projection passes keep orthogonality near round-off
        for _ in range(2):
            for b in basis:
                v = v - (b @ g @ v) * b
        r = float(np.sqrt(max(0.0, v @ g @ v)))
        if r <= independence_tol * scale:
            raise ValueError("rank deficiency: input vectors are not independent")
        basis.append(v / r)
    return basis


def orthonormalize(vectors, P: HermitianPoint, independence_tol: float = INDEPENDENCE_TOL):
    """g-orthonormalize ``vectors`` by modified Gram-Schmidt.

    Deterministic for a fixed input order; the output spans the same
    subspace.  Raises ``ValueError`` when a vector's residual after
    projection falls below ``independence_tol`` times its original norm
    (rank deficiency).
    """
    return gram_schmidt(vectors, P.g, independence_tol)


def _span_distance(P: HermitianPoint, v, basis) -> float:
    """g-distance from v to the span of g-orthonormal basis vectors."""
    w = np.array(v, dtype=float)
    for b in basis:
        w = w - P.inner(b, w) * b
    return P.norm(w)


def _require_orthonormal(P: HermitianPoint, plane: TwoPlane, tol: float):
    x, y = plane.x, plane.y
    worst = max(
        abs(P.inner(x, x) - 1.0),
        abs(P.inner(y, y) - 1.0),
        abs(P.inner(x, y)),
    )
    if worst > tol:
        raise ValueError(f"plane basis is not g-orthonormal (defect {worst:.3e})")


def plane_type(
    P: HermitianPoint, plane: TwoPlane, tol: float = STRUCTURAL_TOL
) -> tuple[str, float, float]:
    """Classify a 2-plane as holomorphic, antiholomorphic or generic.

    ``antihol_defect = |g(Jx, y)|`` — since ``g(J., .)`` is skew,
    ``g(Jx, x) = 0`` automatically and this single scalar characterises
    ``J(plane) perp plane``.  ``hol_defect`` is the g-distance of ``Jx``
    from the plane plus that of ``Jy`` (zero iff ``J(plane) = plane``).
    """
    _require_orthonormal(P, plane, tol)
    x, y = plane.x, plane.y
    antihol = abs(P.inner(P.jmul(x), y))
    basis = [x, y]
    hol = _span_distance(P, P.jmul(x), basis) + _span_distance(P, P.jmul(y), basis)
    if hol <= tol:
        label = "holomorphic"
    elif antihol <= tol:
        label = "antiholomorphic"
    else:
        label = "generic"
    return label, hol, antihol


def random_unit_vector(P: HermitianPoint, rng: np.random.Generator) -> np.ndarray:
    """g-unit vector from an isotropic Gaussian draw."""
    for _ in range(16):
        v = rng.standard_normal(P.dim)
        r = P.norm(v)
        if r > 1e-6:
            return v / r
    raise RuntimeError("failed to draw a unit vector")


def random_orthonormal_frame(P: HermitianPoint, seed: int) -> Frame:
    """Full g-orthonormal frame from seeded Gaussian draws."""
    rng = substream(seed, "frame")
    for _ in range(8):
        raw = rng.standard_normal((P.dim, P.dim))
        try:
            basis = orthonormalize(raw.T, P, independence_tol=1e-8)
        except ValueError:
            continue
        return Frame(np.column_stack(basis))
    raise RuntimeError("failed to draw an orthonormal frame")


def sample_antiholomorphic_plane(P: HermitianPoint, seed: int, index: int = 0) -> TwoPlane:
    """Deterministic antiholomorphic plane for ``(seed, index)``.

    Draws a g-unit ``x``, then a g-unit ``y`` in the g-orthogonal
    complement of ``span{x, Jx}``; the construction forces
    ``g(Jx, y) = 0`` to round-off.  Requires ``dim >= 4`` (in dimension 2
    the complement of ``{x, Jx}`` is empty).
    """
    if P.dim < 4:
        raise ValueError("antiholomorphic planes need dim >= 4")
    rng = substream(seed, "antiholo-plane", index)
    for _ in range(32):
        x = random_unit_vector(P, rng)
        jx = P.jmul(x)
        jx = jx / P.norm(jx)
        y = rng.standard_normal(P.dim)
        for b in (x, jx):
            y = y - P.inner(b, y) * b
        # second pass to push the projection to round-off
        for b in (x, jx):
            y = y - P.inner(b, y) * b
        r = P.norm(y)
        if r > 1e-6:
            return TwoPlane(x, y / r)
    raise RuntimeError("failed to sample an antiholomorphic plane")
