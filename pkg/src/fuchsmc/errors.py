"""Exception hierarchy shared by all modules.

Three tiers matter for the CLI exit status: precondition violations (exit 1),
parse errors (exit 2) and internal invariant breaches (exit 3).  Every error
raised by the library derives from CalculusError so callers can catch one type.
"""


class CalculusError(Exception):
    exit_code = 1


class ParseError(CalculusError):
    exit_code = 2


class InvariantError(CalculusError):
    """A theorem-backed internal consistency check failed."""

    exit_code = 3


# -- generic shape/argument preconditions -----------------------------------

class NonSquareError(CalculusError):
    pass


class SizeMismatchError(CalculusError):
    pass


class LengthMismatchError(CalculusError):
    pass


class IndexRangeError(CalculusError):
    pass


class NotAPermutationError(CalculusError):
    pass


class DuplicatePoleError(CalculusError):
    pass


class PartitionSizeMismatchError(CalculusError):
    pass


class PointMismatchError(CalculusError):
    pass


class InconsistentColumnsError(CalculusError):
    pass


class NegativePartError(CalculusError):
    pass


class PreconditionFailError(CalculusError):
    pass


# -- scheme handling ---------------------------------------------------------

class NotNormalizableError(CalculusError):
    pass


class SchemeUnavailableError(CalculusError):
    pass


class NotONFShapeError(CalculusError):
    pass


# -- structural conditions on systems ---------------------------------------

class NotIrreducibleError(CalculusError):
    pass


class NotOkuboConvertibleError(CalculusError):
    pass


class EigenvalueCollisionError(CalculusError):
    pass


class ConditionsFailError(CalculusError):
    pass


class ZeroRhoError(CalculusError):
    pass


class DegenerateExtensionError(CalculusError):
    pass


class NotQ2Error(CalculusError):
    pass


class CRViolatedError(CalculusError):
    pass


class NotGenericError(CalculusError):
    pass
