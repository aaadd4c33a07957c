"""Exception types shared across the package."""


class PembError(Exception):
    pass


class ValidationError(PembError, ValueError):
    """Input that violates a structural precondition."""


class DisconnectedGraphError(ValidationError):
    pass


class RangeError(PembError, IndexError):
    """A vertex, position or rank outside the valid range."""


class StructureError(PembError, RuntimeError):
    """Internal linked structure is broken (e.g. an Euler tour chain with a cycle)."""
