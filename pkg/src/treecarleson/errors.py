"""Exception hierarchy shared by all modules."""


class TreeCarlesonError(Exception):
    """Base class for every error raised by this package."""


class CapacityError(TreeCarlesonError, ValueError):
    pass


class StructureError(TreeCarlesonError, ValueError):
    pass


class UnsupportedOperation(TreeCarlesonError, TypeError):
    pass


class ValidationError(TreeCarlesonError, ValueError):
    pass


class DomainError(TreeCarlesonError, ValueError):
    pass


class MeasureParseError(ValidationError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
