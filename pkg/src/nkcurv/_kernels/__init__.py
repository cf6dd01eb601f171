"""Kernel backend selection.

The compiled extension ``nkcurv._fast`` (Cython) is preferred when it
imported cleanly; otherwise the numpy reference backend is used.  Setting
the environment variable ``NKCURV_PURE_PYTHON=1`` forces the numpy
backend regardless of what is installed.  Both backends implement the
same functions with identical semantics (see ``numpy_backend``).
"""

import os

import numpy as np

from . import numpy_backend

if os.environ.get("NKCURV_PURE_PYTHON"):
    _impl = numpy_backend
else:
    try:
        from .. import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = numpy_backend

BACKEND_NAME = _impl.BACKEND_NAME


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def contract4(T, x, y, z, u):
    return _impl.contract4(_c(T), _c(x), _c(y), _c(z), _c(u))


def sectional_batch(T, X, Y):
    return _impl.sectional_batch(_c(T), _c(X), _c(Y))


def transform4(T, A):
    return _impl.transform4(_c(T), _c(A))


def antisym12_defect(T):
    return _impl.antisym12_defect(_c(T))


def antisym34_defect(T):
    return _impl.antisym34_defect(_c(T))


def bianchi_defect(T):
    return _impl.bianchi_defect(_c(T))
