"""Error hierarchy with stable error codes.

Every failure the library reports on purpose is a ``CMPeriodsError``; the
``code`` attribute is what the CLI prints and what tests match on.
"""
import re
from typing import Optional


def _snake(name: str) -> str:
    return re.sub(r"(?<=[a-z0-9])(?=[A-Z])|(?<=[A-Z])(?=[A-Z][a-z])", "_", name).lower()


class CMPeriodsError(Exception):
    """Base class for all library errors."""

    code: str = "cm_periods_error"

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if "code" not in cls.__dict__:
            cls.code = _snake(cls.__name__)

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


# galois
class NotAGroup(CMPeriodsError):
    pass


class ConjNotInvolution(CMPeriodsError):
    pass


class SubgroupNotClosed(CMPeriodsError):
    pass


class UnknownField(CMPeriodsError):
    pass


class NotASubfield(CMPeriodsError):
    pass


class NoCMSubfield(CMPeriodsError):
    pass


class NotACMType(CMPeriodsError):
    code = "not_a_cm_type"


class NotHeckeCharacterType(CMPeriodsError):
    pass


class InternalInconsistency(CMPeriodsError):
    """Raised when an internal postcondition fails; never caused by valid input."""


# quadarith / hecke
class ZeroIdeal(CMPeriodsError):
    pass


class ModulusTooLarge(CMPeriodsError):
    pass


class NotCoprime(CMPeriodsError):
    pass


class TrivialModulus(CMPeriodsError):
    pass


class ClassNumberTooLarge(CMPeriodsError):
    pass


# numerics
class OutsideConvergenceRegion(CMPeriodsError):
    pass


class PrecisionUnachievable(CMPeriodsError):
    pass


class TranslateNotTorsion(CMPeriodsError):
    pass


class NonIntegralJ(CMPeriodsError):
    pass


class NotCritical(CMPeriodsError):
    pass


# plumbing
class SpecParseError(CMPeriodsError):
    """Parse failure with a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1, text: Optional[str] = None):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
        self.text = text

    def to_dict(self) -> dict:
        data = super().to_dict()
        data.update({"line": self.line, "column": self.column})
        return data


class GoldenDataError(CMPeriodsError):
    pass
