"""Extended reals: finite values plus a single positive infinity."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

from .exc import UndefinedDifferenceError


class Tag(enum.Enum):
    FINITE = "finite"
    POSITIVE_INFINITY = "inf"


@dataclass(frozen=True)
class ExtendedReal:
    """A real number or +inf, with guarded arithmetic.

    Addition is closed. Subtraction is defined unless the subtrahend is
    infinite: inf - x is inf for finite x, but x - inf and inf - inf raise
    UndefinedDifferenceError instead of silently producing a value.

    >>> ExtendedReal.finite(1.5) + INFINITY
    ExtendedReal(value=inf)
    """

    value: float

    def __post_init__(self) -> None:
        if math.isnan(self.value) or self.value == -math.inf:
            raise ValueError(f"{self.value!r} is not an extended real")

    @classmethod
    def finite(cls, value: float) -> ExtendedReal:
        if not math.isfinite(value):
            raise ValueError(f"{value!r} is not finite")
        return cls(float(value))

    @property
    def tag(self) -> Tag:
        return Tag.FINITE if self.is_finite else Tag.POSITIVE_INFINITY

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)

    @property
    def is_infinite(self) -> bool:
        return not self.is_finite

    def __float__(self) -> float:
        return self.value

    def __add__(self, other: _Operand) -> ExtendedReal:
        return ExtendedReal(self.value + _as_float(other))

    __radd__ = __add__

    def __sub__(self, other: _Operand) -> ExtendedReal:
        rhs = _as_float(other)
        if math.isinf(rhs):
            raise UndefinedDifferenceError(
                msg=f"{self} - inf is undefined for extended reals"
            )
        return ExtendedReal(self.value - rhs)

    def __rsub__(self, other: _Operand) -> ExtendedReal:
        return _coerce(other) - self

    def __abs__(self) -> ExtendedReal:
        return ExtendedReal(abs(self.value))

    def __lt__(self, other: _Operand) -> bool:
        return self.value < _as_float(other)

    def __le__(self, other: _Operand) -> bool:
        return self.value <= _as_float(other)

    def __gt__(self, other: _Operand) -> bool:
        return self.value > _as_float(other)

    def __ge__(self, other: _Operand) -> bool:
        return self.value >= _as_float(other)

    def __str__(self) -> str:
        return repr(self.value) if self.is_finite else "inf"

    def to_json(self) -> float | str:
        """Encode for reports: the number itself, or the string "inf"."""
        return self.value if self.is_finite else "inf"

    @classmethod
    def from_json(cls, value: float | str) -> ExtendedReal:
        if value == "inf":
            return INFINITY
        return cls.finite(float(value))


_Operand = Union[ExtendedReal, float, int]

INFINITY = ExtendedReal(math.inf)
ZERO = ExtendedReal(0.0)


def _as_float(value: _Operand) -> float:
    if isinstance(value, ExtendedReal):
        return value.value
    return float(value)


def _coerce(value: _Operand) -> ExtendedReal:
    if isinstance(value, ExtendedReal):
        return value
    return ExtendedReal(float(value))
