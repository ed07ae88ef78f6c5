"""Exception hierarchy.

Every numerical refusal derives from :class:`MetaplecticError` so callers
(and the command line runner) can catch them in one place.
"""


class MetaplecticError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(MetaplecticError, ValueError):
    pass


class KindError(MetaplecticError, ValueError):
    """Centre/chord kind mismatch."""


class SymmetryError(MetaplecticError, ValueError):
    pass


class CayleyDomainError(MetaplecticError):
    """The Cayley map is undefined for the given symmetric form."""


class SheetError(MetaplecticError, ValueError):
    """A phase winding is inconsistent with the sign of det(I + M)."""


class CausticError(MetaplecticError):
    """The Weyl (centre) symbol is singular: det(I + M) = 0."""


class ChordCausticError(MetaplecticError):
    """The chord symbol is singular: det(I - M) = 0."""


class FourierDomainError(MetaplecticError):
    pass


class TraceResolutionError(MetaplecticError):
    pass


class DegenerateFamilyError(MetaplecticError):
    pass


class BracketError(MetaplecticError):
    pass


class ProductCausticError(MetaplecticError):
    """The product of two elements sits on a Weyl caustic (Delta = 0)."""


class FactorCausticError(MetaplecticError):
    """A factor of a product sits on its own Weyl caustic."""


class ReflectionProductError(MetaplecticError):
    pass


class OracleDomainError(MetaplecticError):
    pass


class OracleConvergenceError(MetaplecticError):
    pass


class OracleStepError(MetaplecticError):
    pass
