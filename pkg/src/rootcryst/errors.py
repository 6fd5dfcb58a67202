"""Exception hierarchy shared by all modules."""


class RootCrystError(Exception):
    """Base class for every error raised by the package."""


class UsageError(RootCrystError, ValueError):
    """Bad input from the caller."""


class CeilingError(RootCrystError):
    """A configured work ceiling was hit."""


class InternalError(RootCrystError):
    """An internal consistency check failed."""


class DimensionMismatch(UsageError):
    pass


class NotASublattice(UsageError):
    pass


class UnsupportedType(UsageError):
    pass


class NotARoot(UsageError):
    pass


class UnsupportedFamily(UsageError):
    pass


class NotAnInvolution(UsageError):
    pass


class MixedParents(UsageError):
    pass


class UnknownCatalogEntry(UsageError):
    pass


class FamilyMismatch(UsageError):
    pass


class UnsupportedFormat(UsageError):
    pass


class InconsistentVectorSystem(UsageError):
    pass


class GroupTooLarge(CeilingError):
    pass


class DiagramTooLarge(CeilingError):
    pass


class BoundTooLarge(CeilingError):
    pass


class QuotientTooLarge(CeilingError):
    pass


class CatalogCorrupt(InternalError):
    pass
