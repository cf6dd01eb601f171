"""Pure numpy implementations of the hot tensor kernels.

Reference semantics for the compiled backend in ``nkcurv._fast``; either
module can serve the whole package.  All tensors are C-contiguous float64
arrays of shape ``(d, d, d, d)`` holding components ``T[i, j, k, l] =
T(e_i, e_j, e_k, e_l)`` in a fixed basis.
"""

import numpy as np

BACKEND_NAME = "numpy"


def contract4(T, x, y, z, u):
    """Multilinear evaluation T(x, y, z, u)."""
    return float(np.einsum("ijkl,i,j,k,l->", T, x, y, z, u, optimize=True))


def sectional_batch(T, X, Y):
    """T(x_m, y_m, y_m, x_m) for row-paired batches X, Y of shape (m, d)."""
    return np.einsum("ijkl,mi,mj,mk,ml->m", T, X, Y, Y, X, optimize=True)


def transform4(T, A):
    """Pullback along A in every slot: out(x,y,z,u) = T(Ax, Ay, Az, Au)."""
    return np.einsum("abcd,ai,bj,ck,dl->ijkl", T, A, A, A, A, optimize=True)


def antisym12_defect(T):
    """max |T(x,y,z,u) + T(y,x,z,u)| over basis tuples."""
    return float(np.abs(T + T.transpose(1, 0, 2, 3)).max())


def antisym34_defect(T):
    """max |T(x,y,z,u) + T(x,y,u,z)| over basis tuples."""
    return float(np.abs(T + T.transpose(0, 1, 3, 2)).max())


def bianchi_defect(T):
    """max |T(x,y,z,u) + T(y,z,x,u) + T(z,x,y,u)| over basis tuples."""
    cyc = T + T.transpose(1, 2, 0, 3) + T.transpose(2, 0, 1, 3)
    return float(np.abs(cyc).max())
