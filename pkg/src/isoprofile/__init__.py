"""Numerical toolkit for isoperimetric profiles of rotationally symmetric surfaces.

Modules: ``space_forms`` (constant-curvature oracles), ``surface`` and
``geodesics`` (warped surfaces and curve shooting), ``exhaustion`` (convex
exhaustion functions), ``placement`` (small-ball placement), ``profile``
(sublevel and whole-surface profiles), ``limits`` (monotone limits) and
``cli``.
"""

__version__ = "0.1.0"
