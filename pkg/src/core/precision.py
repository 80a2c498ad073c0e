"""Working precision management and the precision-tagged complex type."""

import logging
from contextlib import contextmanager
from typing import Iterator, Union

import mpmath
from mpmath import mp

from src.config.settings import settings
from src.core.exceptions import PrecisionUnachievable

logger = logging.getLogger(__name__)

Number = Union[int, float, complex, "mpmath.mpf", "mpmath.mpc", "BigComplex"]


class PrecisionManager:
    """
    Validates precision requests and scopes mpmath's working precision.

    All numeric services run inside ``precision_manager.working(bits)``, which
    adds the configured guard bits on top of the requested precision.
    """

    def __init__(self, guard_bits: int = None, min_bits: int = None, max_bits: int = None):
        self.guard_bits = settings.precision.guard_bits if guard_bits is None else guard_bits
        self.min_bits = settings.precision.min_bits if min_bits is None else min_bits
        self.max_bits = settings.precision.max_bits if max_bits is None else max_bits

    def validate(self, bits: int) -> int:
        """
        Check a user-facing precision request.

        Raises:
            PrecisionUnachievable: If bits lies outside the configured range
        """
        if not self.min_bits <= bits <= self.max_bits:
            raise PrecisionUnachievable(
                f"precision {bits} outside [{self.min_bits}, {self.max_bits}]"
            )
        return bits

    @contextmanager
    def working(self, bits: int) -> Iterator[int]:
        """Run the block at ``bits`` plus guard bits; yields the effective precision."""
        effective = int(bits) + self.guard_bits
        with mp.workprec(effective):
            yield effective

    def tolerance(self, bits: int):
        """2^-bits as an mpf at the current precision."""
        return mpmath.ldexp(mpmath.mpf(1), -int(bits))


class BigComplex:
    """
    Complex number carried at a fixed binary precision.

    Arithmetic between two values runs at the smaller of the two precisions,
    so a result never claims more accuracy than its weakest operand.
    """

    __slots__ = ("_value", "_prec")

    def __init__(self, value: Number, prec: int):
        if isinstance(value, BigComplex):
            value = value.value
        with mp.workprec(int(prec)):
            self._value = mpmath.mpc(value)
        self._prec = int(prec)

    @property
    def value(self) -> mpmath.mpc:
        return self._value

    @property
    def prec(self) -> int:
        return self._prec

    @property
    def real(self) -> mpmath.mpf:
        return self._value.real

    @property
    def imag(self) -> mpmath.mpf:
        return self._value.imag

    def _coerce(self, other: Number):
        if isinstance(other, BigComplex):
            return other.value, min(self._prec, other.prec)
        return other, self._prec

    def _binary(self, other: Number, op) -> "BigComplex":
        rhs, prec = self._coerce(other)
        with mp.workprec(prec):
            return BigComplex(op(self._value, rhs), prec)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._binary(other, lambda x, y: y - x)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda x, y: x / y)

    def __rtruediv__(self, other):
        return self._binary(other, lambda x, y: y / x)

    def __pow__(self, n: int):
        with mp.workprec(self._prec):
            return BigComplex(self._value ** n, self._prec)

    def __neg__(self):
        return BigComplex(-self._value, self._prec)

    def __abs__(self):
        with mp.workprec(self._prec):
            return abs(self._value)

    def conjugate(self) -> "BigComplex":
        return BigComplex(mpmath.conj(self._value), self._prec)

    def __eq__(self, other) -> bool:
        if isinstance(other, BigComplex):
            return self._prec == other.prec and self._value == other.value
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._prec, self._value.real, self._value.imag))

    def __repr__(self) -> str:
        return f"BigComplex({self.to_decimal_string()}, prec={self._prec})"

    def digits(self) -> int:
        """Decimal digits justified by the precision."""
        return max(1, int(self._prec * 0.30103))

    def to_decimal_string(self, digits: int = None) -> str:
        """Render as ``re`` or ``re+imj`` with decimal digits only."""
        n = digits or self.digits()
        re_part = mpmath.nstr(self._value.real, n, strip_zeros=False, min_fixed=-mp.inf, max_fixed=mp.inf)
        if self._value.imag == 0:
            return re_part
        im_abs = mpmath.nstr(abs(self._value.imag), n, strip_zeros=False, min_fixed=-mp.inf, max_fixed=mp.inf)
        sign = "-" if self._value.imag < 0 else "+"
        return f"{re_part}{sign}{im_abs}j"

    def relative_error(self, other: Number):
        rhs, prec = self._coerce(other)
        with mp.workprec(prec):
            denom = max(abs(self._value), abs(mpmath.mpc(rhs)))
            if denom == 0:
                return mpmath.mpf(0)
            return abs(self._value - rhs) / denom


def decimal_string(x, bits: int) -> str:
    """Decimal rendering of a real mpmath value with digits matching ``bits``."""
    return mpmath.nstr(x, max(1, int(bits * 0.30103)), strip_zeros=False,
                       min_fixed=-mp.inf, max_fixed=mp.inf)


# Global precision manager instance
precision_manager = PrecisionManager()
