"""Curvature toolkit for almost Hermitian model geometries.

The package verifies, numerically and to stated tolerances, a catalog of
algebraic and differential identities satisfied by curvature data with
pointwise constant antiholomorphic sectional curvature, and classifies
such data among the model spaces: flat complex space, the positively and
negatively curved complex space forms, and the round six-sphere with its
cross-product almost complex structure.

Layers:

* :mod:`nkcurv.hermitian` — pointwise linear algebra (metric + almost
  complex structure, frames, 2-plane types, plane sampling);
* :mod:`nkcurv.tensors` / :mod:`nkcurv.octonion` — builders for the
  model curvature tensors, products, and the octonionic structure;
* :mod:`nkcurv.invariants` — contractions, symmetry predicates, the
  algebraic identity catalog (6)-(9), (13), the kernel lemma as a rank
  check, and the classifier;
* :mod:`nkcurv.charts` / :mod:`nkcurv.diffgeo` — local charts with
  derivative oracles and the differential catalog (1)-(5), (10)-(12);
* :mod:`nkcurv.cli` — deterministic batch driver (``nkcurv`` command).

Hot tensor kernels run on a compiled Cython backend when available, with
a pure numpy fallback selected at import (see :mod:`nkcurv._kernels`).
"""

__version__ = "0.1.0"

from .hermitian import (
    Frame,
    HermitianPoint,
    TwoPlane,
    make_standard_point,
    orthonormalize,
    plane_type,
    sample_antiholomorphic_plane,
    standard_complex_structure,
    structure_defects,
)
from .tensors import (
    FourTensor,
    ProductSpec,
    constant_curvature_tensor,
    kahler_form_tensor,
    kahler_space_form,
    product_curvature,
    ricci_kahler_coupling,
    zero_tensor,
)
from .octonion import cross7, s6_curvature, s6_point
from .invariants import (
    ClassLabel,
    Label,
    LemmaHypothesisError,
    Prop1Report,
    RicciData,
    antiholo_range,
    classify,
    contractions,
    eq13_value,
    lemma_defect,
    lemma_kernel_singular_values,
    prop1_report,
    reconstruct_curvature,
    rk_defect,
    sectional,
    symmetry_defects,
    trace_nu,
)
from .charts import (
    Box,
    Chart,
    complex_hyperbolic_chart,
    flat_chart,
    fubini_study_chart,
    polynomial_chart,
    s6_chart,
)
from .diffgeo import (
    ChartGeometry,
    GaussRouteMismatch,
    IdentityReport,
    gauss_curvature_tensor,
    geometry_at,
    grad_ricci_identities,
    nearly_kahler_defect,
    nk_identities,
    pointwise_data,
    schur_scan,
)

__all__ = [
    "__version__",
    "Frame",
    "HermitianPoint",
    "TwoPlane",
    "make_standard_point",
    "orthonormalize",
    "plane_type",
    "sample_antiholomorphic_plane",
    "standard_complex_structure",
    "structure_defects",
    "FourTensor",
    "ProductSpec",
    "constant_curvature_tensor",
    "kahler_form_tensor",
    "kahler_space_form",
    "product_curvature",
    "ricci_kahler_coupling",
    "zero_tensor",
    "cross7",
    "s6_curvature",
    "s6_point",
    "ClassLabel",
    "Label",
    "LemmaHypothesisError",
    "Prop1Report",
    "RicciData",
    "antiholo_range",
    "classify",
    "contractions",
    "eq13_value",
    "lemma_defect",
    "lemma_kernel_singular_values",
    "prop1_report",
    "reconstruct_curvature",
    "rk_defect",
    "sectional",
    "symmetry_defects",
    "trace_nu",
    "Box",
    "Chart",
    "complex_hyperbolic_chart",
    "flat_chart",
    "fubini_study_chart",
    "polynomial_chart",
    "s6_chart",
    "ChartGeometry",
    "GaussRouteMismatch",
    "IdentityReport",
    "gauss_curvature_tensor",
    "geometry_at",
    "grad_ricci_identities",
    "nearly_kahler_defect",
    "nk_identities",
    "pointwise_data",
    "schur_scan",
]
