"""Exception hierarchy.

Domain errors (bad input, violated preconditions) derive from
``ArakelovError``; the CLI maps them to exit code 2.  ``InternalInvariantError``
signals a bug and maps to exit code 3.
"""


class ArakelovError(ValueError):
    pass


class InternalInvariantError(RuntimeError):
    pass


# fiber
class NonPrime(ArakelovError):
    pass


class PTooSmall(ArakelovError):
    pass


class NonIntegralMass(InternalInvariantError):
    pass


class ComponentOutOfRange(ArakelovError):
    pass


class InvalidPermutation(ArakelovError):
    pass


# heights
class PDegenerate(ArakelovError):
    pass


class GonalityPrecondition(ArakelovError):
    pass


class DimensionOverflow(ArakelovError):
    pass


class GenusDegenerate(ArakelovError):
    pass


class DimATooSmall(ArakelovError):
    pass


class LedgerError(ArakelovError):
    pass


# modsym
class BadPrime(ArakelovError):
    pass


class SturmNotReached(ArakelovError):
    pass


# theta
class NotPositiveDefinite(ArakelovError):
    pass


class TailBoundFailure(ArakelovError):
    pass


# linear algebra
class InconsistentSystem(ArakelovError):
    pass


class SingularSystem(ArakelovError):
    pass
