# raagtool/errors.py
"""
Exception hierarchy shared by every module.
The CLI maps the families below to exit codes (see main.py).
"""


class RaagToolkitError(Exception):
    """Base class for all library errors."""


# -----------------------------
# Bad input (exit 1)
# -----------------------------

class InputError(RaagToolkitError):
    """Raised when user-supplied text or objects are malformed."""


class MalformedGraphError(InputError):
    pass


class LoopEdgeError(InputError):
    pass


class UnknownVertexError(InputError):
    def __init__(self, vertex):
        super().__init__(f"unknown vertex: {vertex!r}")
        self.vertex = vertex


class DuplicateVertexError(InputError):
    pass


class DuplicateEdgeError(InputError):
    pass


class ExpressionSyntaxError(InputError):
    """Raised by the expression grammars; carries the character position."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class GraphMismatchError(InputError):
    pass


class MissingSymbolError(InputError):
    pass


class StarredSymbolError(InputError):
    pass


class ShapeMismatchError(InputError):
    pass


# -----------------------------
# Violated preconditions (exit 1)
# -----------------------------

class PreconditionError(RaagToolkitError):
    """Raised when arguments are well formed but outside an operation's domain."""


class RadiusTooSmallError(PreconditionError):
    pass


class DepthTooSmallError(PreconditionError):
    pass


class AdjacentVerticesError(PreconditionError):
    pass


class ParameterRangeError(PreconditionError):
    pass


class NotHermitianError(PreconditionError):
    pass


class OffCircleError(PreconditionError):
    pass


# -----------------------------
# Guards (exit 2)
# -----------------------------

class GuardExceededError(RaagToolkitError):
    """Raised when a computation would exceed a configured size guard."""


class DimensionGuardError(GuardExceededError):
    pass


class SupportGuardError(GuardExceededError):
    pass


class RecursionGuardError(GuardExceededError):
    pass


# -----------------------------
# Self-checks (exit 3)
# -----------------------------

class SelfCheckError(RaagToolkitError):
    """Raised when an identity that must hold exactly fails."""


class RelationCheckError(SelfCheckError):
    pass


class ConvergenceError(RaagToolkitError):
    """Raised only when a caller explicitly requires a converged estimate."""
