"""Exception types shared across the package."""


class ModgenError(Exception):
    """Base class for all library errors."""


class DomainError(ModgenError, ValueError):
    """A point or parameter lies outside the domain of a flow or formula."""


class ShapeError(ModgenError, ValueError):
    """Array shapes or grids do not match."""


class NumericalError(ModgenError, ArithmeticError):
    """A numerical quantity is non-finite or below a usable noise floor."""


class SupportError(ModgenError, ValueError):
    """A sampled function's declared support violates a precondition."""
