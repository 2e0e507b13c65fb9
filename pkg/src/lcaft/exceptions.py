"""Exception hierarchy shared by every module of the package."""


class LCAFTError(Exception):
    """Base class for all package errors."""


class ValidationError(LCAFTError, ValueError):
    """A constructor argument violates its documented range.

    ``field`` names the offending argument.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(LCAFTError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapabilityError(LCAFTError, NotImplementedError):
    """The requested model/representation combination is not supported."""


class NumericError(LCAFTError, ArithmeticError):
    """Non-finite data or a numerical breakdown."""


class GroupSpecError(LCAFTError, ValueError):
    """Malformed group-spec string; carries the offending column."""

    def __init__(self, text, position, message):
        caret = " " * position + "^"
        super().__init__(f"{message} at column {position}\n  {text}\n  {caret}")
        self.text = text
        self.position = position
