"""
Errors raised by the urforcing package. Every error carries a stable code that the
command line prints, so scripts can react to failures without parsing messages.
"""

class UrforcingError(Exception):
    code = 'urforcing-error'
    exit_code = 3

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_json(self):
        payload = {'error': self.code, 'message': str(self)}
        if self.details:
            payload['details'] = self.details
        return payload

class BudgetExceededError(UrforcingError):
    code = 'budget-exceeded'

class UnknownConditionError(UrforcingError):
    code = 'unknown-condition'

class UnknownUrelementError(UrforcingError):
    code = 'unknown-urelement'

class InvalidPosetError(UrforcingError):
    code = 'invalid-poset'
    exit_code = 1

class InvalidNameError(UrforcingError):
    code = 'invalid-name'
    exit_code = 1

class AmbiguousValuationError(UrforcingError):
    code = 'ambiguous-valuation'

class NotAnAntichainError(UrforcingError):
    code = 'not-an-antichain'

class NotInRangeError(UrforcingError):
    code = 'not-in-range-of-j'

class UnboundVariableError(UrforcingError):
    code = 'unbound-variable'

class ConstantNotInPoolError(UrforcingError):
    code = 'constant-not-in-pool'

class PoolNotClosedError(UrforcingError):
    code = 'pool-not-closed'

class PreconditionError(UrforcingError):
    code = 'precondition'

class OverlapError(UrforcingError):
    code = 'overlap'

class NoSpareUrelementError(UrforcingError):
    code = 'no-spare-urelement'

class NotAnIdealError(UrforcingError):
    code = 'not-an-ideal'

class UnsupportedFormulaError(UrforcingError):
    code = 'unsupported-formula'

class DecodeError(UrforcingError):
    code = 'decode'
    exit_code = 2
