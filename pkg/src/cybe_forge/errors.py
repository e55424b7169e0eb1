"""Exception types shared across the package."""


class CybeForgeError(Exception):
    """Base class for all library errors."""


class TagMismatchError(CybeForgeError):
    """Arithmetic attempted between polynomials with different variable tags."""


class DimensionMismatchError(CybeForgeError):
    """Vector/matrix/algebra dimensions do not agree."""


class SingularFormError(CybeForgeError):
    """A bilinear form or matrix required to be invertible is singular."""


class DecompositionError(CybeForgeError):
    """Root decomposition failed (non-abelian input or bad spectrum)."""


class EnumerationBudgetError(CybeForgeError):
    """Subsystem enumeration refused: the instance exceeds the search budget."""


class NotAGroupError(CybeForgeError):
    """The supplied matrix list is not closed under product and inverse."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionError(CybeForgeError):
    """An operation was invoked on input that fails its stated precondition."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DegreeOverflowError(CybeForgeError):
    """A derivation degree exceeded the hard cap."""


class SchemaError(CybeForgeError):
    """A JSON document does not match the expected schema/version."""
