"""Seven-dimensional cross product and the round six-sphere's structure.

The cross product comes from a fixed octonionic multiplication table: the
seven oriented triples below (0-indexed imaginary units, the cyclic
convention ``e_i e_{i+1} = e_{i+3}`` mod 7).  Any consistent table gives a
product with the three defining properties

    x * x = 0,   <x * y, x> = 0,   |x * y|^2 = |x|^2 |y|^2 - <x, y>^2,

and only those properties are relied on downstream.

At a unit vector ``p`` the tangent space ``p^perp`` of the unit sphere in
R^7 carries the compatible almost complex structure ``J_p v = p * v``;
:func:`s6_point` expresses it in a seeded orthonormal tangent frame.
"""

import numpy as np

from .hermitian import HermitianPoint, gram_schmidt
from .rng import substream
from .tensors import FourTensor, constant_curvature_tensor

__all__ = [
    "CROSS7_TRIPLES",
    "cross7",
    "cross7_matrix",
    "tangent_frame",
    "s6_point",
    "s6_curvature",
]

CROSS7_TRIPLES = (
    (0, 1, 3),
    (1, 2, 4),
    (2, 3, 5),
    (3, 4, 6),
    (4, 5, 0),
    (5, 6, 1),
    (6, 0, 2),
)


def _structure_constants() -> np.ndarray:
    f = np.zeros((7, 7, 7))
    for a, b, c in CROSS7_TRIPLES:
        for i, j, k in ((a, b, c), (b, c, a), (c, a, b)):
            f[i, j, k] = 1.0
            f[j, i, k] = -1.0
    return f


_F = _structure_constants()
_F.flags.writeable = False


def cross7(x, y) -> np.ndarray:
    """Octonionic cross product of two 7-vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (7,) or y.shape != (7,):
        raise ValueError("cross7 expects 7-vectors")
    return np.einsum("ijk,i,j->k", _F, x, y)


def cross7_matrix(p) -> np.ndarray:
    """Matrix C with C @ v = cross7(p, v)."""
    p = np.asarray(p, dtype=float)
    return np.einsum("ijk,i->kj", _F, p)


def tangent_frame(p: np.ndarray, seed: int) -> np.ndarray:
    """7x6 matrix whose columns are a seeded orthonormal basis of p^perp."""
    p = np.asarray(p, dtype=float)
    rng = substream(seed, "s6-frame")
    for _ in range(8):
        raw = rng.standard_normal((6, 7))
        proj = raw - np.outer(raw @ p, p)
        try:
            basis = gram_schmidt(proj, np.eye(7), independence_tol=1e-8)
        except ValueError:
            continue
        return np.column_stack(basis)
    raise RuntimeError("failed to build a tangent frame")


def s6_point(p, frame_seed: int = 0, tol: float = 1e-9) -> HermitianPoint:
    """Tangent-space data of the unit six-sphere at ``p``.

    Returns the 6-dimensional ``HermitianPoint`` with the induced (flat
    identity) metric in a seeded orthonormal tangent frame and
    ``J = E^T C(p) E`` where ``C(p) v = p x v``.  ``|p|`` must be 1 within
    ``tol``.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (7,):
        raise ValueError("p must be a 7-vector")
    if abs(np.linalg.norm(p) - 1.0) > tol:
        raise ValueError("p must be a unit vector")
    E = tangent_frame(p, frame_seed)
    J = E.T @ cross7_matrix(p) @ E
    return HermitianPoint(np.eye(6), J)


def s6_curvature(P: HermitianPoint) -> FourTensor:
    """Round-sphere curvature (constant sectional curvature one) at an s6 point."""
    if P.dim != 6:
        raise ValueError("the six-sphere has dimension 6")
    return constant_curvature_tensor(P)
