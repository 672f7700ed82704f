"""Modular flows and their generators for thermal and massive free fields.

Submodules: ``lcgeom`` (light-cone geometry and reference flows), ``byflow``
(thermal flows), ``specfun`` (sampled functions, spectral calculus,
quadrature), ``bygen`` (generators of the thermal flows), ``yngvason``
(wedge model in momentum space), ``symcheck`` (symbol-class checks) and
``cli``.
"""
__version__ = "0.1.0"

from .errors import DomainError, ModgenError, NumericalError, ShapeError, SupportError  # noqa: E402,F401
