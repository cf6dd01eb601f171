"""Builders for the (0,4) curvature-type tensors of the model geometries.

The three algebraic building blocks (with ``Om(x, y) = g(Jx, y)`` the
fundamental 2-form and ``S`` a symmetric bilinear form) are

* ``constant_curvature_tensor``:
  ``g(y,z) g(x,u) - g(x,z) g(y,u)`` — every 2-plane has sectional
  curvature one;
* ``kahler_form_tensor``:
  ``Om(y,z) Om(x,u) - Om(x,z) Om(y,u) - 2 Om(x,y) Om(z,u)`` — vanishes on
  antiholomorphic planes and contributes 3 on holomorphic ones;
* ``ricci_kahler_coupling``: the six-term pairing of ``Om`` with ``S``
  that reduces to ``2*lambda*kahler_form_tensor`` when ``S = lambda*g``.

``kahler_space_form`` combines the first two into the curvature tensor of
a complex space form of constant holomorphic sectional curvature ``c``
(flat for ``c = 0``, projective-type for ``c > 0``, hyperbolic-type for
``c < 0``).  ``product_curvature`` assembles block-diagonal product data.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .hermitian import HermitianPoint, _freeze

__all__ = [
    "FourTensor",
    "zero_tensor",
    "constant_curvature_tensor",
    "kahler_form_tensor",
    "ricci_kahler_coupling",
    "kahler_space_form",
    "ProductSpec",
    "product_curvature",
]


@dataclass(frozen=True)
class FourTensor:
    """Dense (0,4) tensor; ``components[i,j,k,l] = T(e_i, e_j, e_k, e_l)``.

    No symmetry is assumed; predicates live in :mod:`nkcurv.invariants`.
    """

    components: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(self.components, dtype=float)
        if c.ndim != 4 or len(set(c.shape)) != 1:
            raise ValueError("components must have shape (d, d, d, d)")
        c.flags.writeable = False
        object.__setattr__(self, "components", c)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def __call__(self, x, y, z, u) -> float:
        return _kernels.contract4(
            self.components,
            np.ascontiguousarray(x, dtype=float),
            np.ascontiguousarray(y, dtype=float),
            np.ascontiguousarray(z, dtype=float),
            np.ascontiguousarray(u, dtype=float),
        )

    def max_norm(self) -> float:
        return float(np.abs(self.components).max())

    def __add__(self, other: "FourTensor") -> "FourTensor":
        return FourTensor(self.components + other.components)

    def __sub__(self, other: "FourTensor") -> "FourTensor":
        return FourTensor(self.components - other.components)

    def __mul__(self, t: float) -> "FourTensor":
        return FourTensor(self.components * float(t))

    __rmul__ = __mul__

    def __neg__(self) -> "FourTensor":
        return FourTensor(-self.components)


def zero_tensor(P: HermitianPoint) -> FourTensor:
    return FourTensor(np.zeros((P.dim,) * 4))


def constant_curvature_tensor(P: HermitianPoint) -> FourTensor:
    """R(x,y,z,u) = g(y,z) g(x,u) - g(x,z) g(y,u); K(plane) = 1 everywhere."""
    g = P.g
    comp = np.einsum("jk,il->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)
    return FourTensor(comp)


def _fundamental_form(P: HermitianPoint) -> np.ndarray:
    # Om[a, b] = g(J e_a, e_b); skew because J is g-compatible
    return P.J.T @ P.g


def kahler_form_tensor(P: HermitianPoint) -> FourTensor:
    """Om(y,z)Om(x,u) - Om(x,z)Om(y,u) - 2 Om(x,y)Om(z,u)."""
    Om = _fundamental_form(P)
    comp = (
        np.einsum("jk,il->ijkl", Om, Om)
        - np.einsum("ik,jl->ijkl", Om, Om)
        - 2.0 * np.einsum("ij,kl->ijkl", Om, Om)
    )
    return FourTensor(comp)


def ricci_kahler_coupling(P: HermitianPoint, S: np.ndarray) -> FourTensor:
    """Six-term coupling of the fundamental form with a symmetric form S.

    ``Om(y,z)S(Jx,u) - Om(x,z)S(Jy,u) - 2Om(x,y)S(Jz,u)
    + Om(x,u)S(Jy,z) - Om(y,u)S(Jx,z) - 2Om(z,u)S(Jx,y)``

    For ``S = lambda * g`` this equals ``2*lambda*kahler_form_tensor(P)``.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != P.g.shape:
        raise ValueError("S has wrong dimension")
    if not np.allclose(S, S.T, atol=1e-10 * max(1.0, np.abs(S).max())):
        raise ValueError("S must be symmetric")
    Om = _fundamental_form(P)
    B = P.J.T @ S  # B[a, b] = S(J e_a, e_b)
    comp = (
        np.einsum("jk,il->ijkl", Om, B)
        - np.einsum("ik,jl->ijkl", Om, B)
        - 2.0 * np.einsum("ij,kl->ijkl", Om, B)
        + np.einsum("il,jk->ijkl", Om, B)
        - np.einsum("jl,ik->ijkl", Om, B)
        - 2.0 * np.einsum("kl,ij->ijkl", Om, B)
    )
    return FourTensor(comp)


def kahler_space_form(P: HermitianPoint, c: float) -> FourTensor:
    """Curvature of constant holomorphic sectional curvature ``c``.

    ``(c/4) * (constant_curvature_tensor + kahler_form_tensor)``;
    holomorphic planes see ``c``, antiholomorphic planes see ``c/4``.
    """
    if c == 0.0:
        return zero_tensor(P)
    comb = constant_curvature_tensor(P) + kahler_form_tensor(P)
    return (c / 4.0) * comb


@dataclass(frozen=True)
class ProductSpec:
    """Direct-sum curvature data built by :func:`product_curvature`.

    ``factors`` holds ``(point, tensor, einstein_constant-or-None)`` per
    factor; ``offsets[i]`` is where factor ``i``'s block starts in the
    combined coordinates.  Components of the combined tensor mixing
    distinct factors vanish identically.
    """

    factors: tuple
    offsets: tuple
    point: HermitianPoint
    tensor: FourTensor

    def factor_of(self, X: np.ndarray, tol: float = 1e-12) -> int:
        """Index of the unique factor supporting X; -1 if support is mixed."""
        X = np.asarray(X, dtype=float)
        scale = max(1.0, float(np.abs(X).max()))
        hit = -1
        for i, (P, _, _) in enumerate(self.factors):
            lo = self.offsets[i]
            block = X[lo : lo + P.dim]
            if np.abs(block).max() > tol * scale:
                if hit >= 0:
                    return -1
                hit = i
        return hit


def _einstein_constant(P: HermitianPoint, R: FourTensor) -> float | None:
    # local import: invariants depends on this module
    from .invariants import contractions

    ric = contractions(R, P)
    lam = ric.tau / P.dim
    if np.abs(ric.S - lam * P.g).max() <= 1e-10 * max(1.0, abs(lam)):
        return lam
    return None


def product_curvature(factors) -> ProductSpec:
    """Block-diagonal metric, J and curvature of a product of factors.

    ``factors`` is a sequence of ``(HermitianPoint, FourTensor)`` pairs
    (at least two).  Sectional curvature of any plane spanned by unit
    vectors taken from two distinct factors is zero by construction.
    """
    factors = list(factors)
    if len(factors) < 2:
        raise ValueError("a product needs at least two factors")
    dims = []
    for P, R in factors:
        if R.dim != P.dim:
            raise ValueError("factor tensor dimension mismatch")
        dims.append(P.dim)
    D = sum(dims)
    offsets = np.concatenate([[0], np.cumsum(dims)[:-1]]).astype(int)

    g = np.zeros((D, D))
    J = np.zeros((D, D))
    comp = np.zeros((D,) * 4)
    annotated = []
    for (P, R), lo, d in zip(factors, offsets, dims):
        sl = slice(lo, lo + d)
        g[sl, sl] = P.g
        J[sl, sl] = P.J
        comp[sl, sl, sl, sl] = R.components
        annotated.append((P, R, _einstein_constant(P, R)))

    return ProductSpec(
        factors=tuple(annotated),
        offsets=tuple(int(o) for o in offsets),
        point=HermitianPoint(g, J),
        tensor=FourTensor(comp),
    )
