"""Shared default tolerances and budgets.

Two tolerance regimes coexist: pointwise linear algebra is exact to
round-off and is judged against ``STRUCTURAL_TOL``, while quantities
obtained by differentiating a chart numerically carry a finite-difference
noise floor and are judged against the much looser ``CHART_TOL``.
"""

# Exact-structure assertions (J^2 = -I, metric compatibility, tensor symmetries).
STRUCTURAL_TOL = 1e-9

# Chart-derived quantities (Christoffel symbols, curvature, covariant derivatives).
CHART_TOL = 1e-4

# Gram-Schmidt rank rejection.
INDEPENDENCE_TOL = 1e-10

# Plane-sampling budgets.
DEFAULT_SAMPLES = 200
DEFAULT_REFINE_STEPS = 25
