"""Exception hierarchy.

``ValidationError`` subclasses flag bad input (CLI exit status 1).
``ContractViolation`` subclasses flag an internal guarantee that did not
hold (CLI exit status 2).
"""


class BootwalkError(Exception):
    pass


class ValidationError(BootwalkError, ValueError):
    pass


class ContractViolation(BootwalkError, RuntimeError):
    pass


class NonPrimeP(ValidationError):
    pass


class BadValues(ValidationError):
    pass


class NonZeroMean(ValidationError):
    pass


class OddSteps(ValidationError):
    pass


class ZeroExponent(ValidationError):
    pass


class UnsupportedGroup(ValidationError):
    pass


class BudgetExceeded(ValidationError):
    pass


class SingularMatrix(ContractViolation):
    pass


class ScanCapExceeded(ContractViolation):
    pass
