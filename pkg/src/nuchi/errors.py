class NuChiError(Exception):
    """Base class for all errors raised by this package."""


class OversizeError(NuChiError):
    """A point, element or relator budget was exceeded."""


class ExceededError(OversizeError):
    """Coset enumeration hit ``max_cosets`` before closing."""


class NotRegularError(NuChiError):
    pass


class NotNormalError(NuChiError):
    pass


class NotAbelianError(NuChiError):
    pass


class NotPGroupError(NuChiError):
    pass


class NotClosedError(NuChiError):
    pass


class OrderMismatchError(NuChiError):
    """A presentation enumerated to an order other than the expected one."""


class RelatorViolation(NuChiError):
    pass


class CentralityError(NuChiError):
    pass


class CheckFailed(NuChiError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PresentationParseError(NuChiError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class CorpusError(NuChiError):
    """A corpus entry is malformed or its tags disagree with its group."""


class TagExpressionError(NuChiError):
    pass
