from __future__ import annotations

from collections.abc import Sequence
from os import PathLike
from typing import Any


class DtcError(Exception):
    """Base class for dtc-utils exceptions."""


class StateValidationError(DtcError):
    """Input data does not describe a valid state, channel, or party set."""


class DimensionMismatchError(StateValidationError):
    """Two dimensions that must agree do not.

    By default, a message is generated from the supplied attributes, but
    a custom message can be provided.

    Arguments and fields:
    expected -- the dimension (or dims list) that was required
    actual -- the dimension (or dims list) that was found
    """

    def __init__(
        self, expected: Any, actual: Any, *, msg: str | None = None
    ) -> None:
        if msg is None:
            msg = f"dimension mismatch: expected {expected!r}, got {actual!r}"
        super().__init__(msg)
        self.expected = expected
        self.actual = actual


class NonFiniteMatrixError(StateValidationError):
    def __init__(self, *, msg: str | None = None) -> None:
        super().__init__(msg or "matrix contains NaN or infinite entries")


class NotHermitianError(StateValidationError):
    """The matrix deviates from its adjoint by more than the tolerance.

    deviation is the max-norm of M - M† relative to the max-norm of M.
    """

    def __init__(self, deviation: float, *, msg: str | None = None) -> None:
        if msg is None:
            msg = (
                "matrix is not Hermitian "
                f"(relative deviation {deviation:.3e})"
            )
        super().__init__(msg)
        self.deviation = deviation


class NotUnitTraceError(StateValidationError):
    def __init__(self, trace: complex, *, msg: str | None = None) -> None:
        if msg is None:
            msg = f"trace is {trace.real:.12g}, expected 1"
        super().__init__(msg)
        self.trace = trace


class NotPSDError(StateValidationError):
    """The matrix has an eigenvalue below the negative tolerance.

    eigenvalue -- the most negative eigenvalue found
    """

    def __init__(self, eigenvalue: float, *, msg: str | None = None) -> None:
        if msg is None:
            msg = (
                "matrix is not positive semidefinite "
                f"(eigenvalue {eigenvalue:.3e})"
            )
        super().__init__(msg)
        self.eigenvalue = eigenvalue


class InvalidPartySetError(StateValidationError):
    def __init__(
        self,
        parties: Sequence[int],
        n_parties: int,
        *,
        msg: str | None = None,
    ) -> None:
        if msg is None:
            msg = (
                f"invalid party set {list(parties)!r} "
                f"for a {n_parties}-party state"
            )
        super().__init__(msg)
        self.parties = list(parties)
        self.n_parties = n_parties


class InvalidPermutationError(StateValidationError):
    def __init__(
        self, perm: Sequence[int], *, msg: str | None = None
    ) -> None:
        if msg is None:
            msg = f"{list(perm)!r} is not a permutation of the party positions"
        super().__init__(msg)
        self.perm = list(perm)


class InvalidChannelError(StateValidationError):
    """Kraus operators are malformed or violate completeness.

    deviation is the max-norm of sum(K†K) - I, or None if the operators
    could not be compared at all.
    """

    def __init__(
        self, deviation: float | None = None, *, msg: str | None = None
    ) -> None:
        if msg is None:
            msg = "Kraus operators are not trace preserving"
            if deviation is not None:
                msg += f" (deviation {deviation:.3e})"
        super().__init__(msg)
        self.deviation = deviation


class OutOfRangeError(StateValidationError):
    def __init__(
        self,
        name: str,
        value: int,
        lower: int,
        upper: int | None = None,
        *,
        msg: str | None = None,
    ) -> None:
        if msg is None:
            if upper is None:
                msg = f"{name} must be at least {lower}, got {value}"
            else:
                msg = f"{name} must be in [{lower}, {upper}], got {value}"
        super().__init__(msg)
        self.name = name
        self.value = value
        self.lower = lower
        self.upper = upper


class WrongArityError(StateValidationError):
    def __init__(
        self, expected: int, actual: int, *, msg: str | None = None
    ) -> None:
        if msg is None:
            msg = f"expected a {expected}-party state, got {actual} parties"
        super().__init__(msg)
        self.expected = expected
        self.actual = actual


class StateFileError(DtcError):
    """A state file could not be read.

    Arguments and fields:
    path -- the file that failed to parse
    line, column -- location of the problem if known (1-based)
    """

    def __init__(
        self,
        path: PathLike[str] | str,
        reason: str,
        *,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        location = str(path)
        if line is not None:
            location += f":{line}"
            if column is not None:
                location += f":{column}"
        super().__init__(f"{location}: {reason}")
        self.path = path
        self.reason = reason
        self.line = line
        self.column = column


class OutputFileError(DtcError):
    """An output file could not be written."""

    def __init__(self, path: PathLike[str] | str, reason: str) -> None:
        super().__init__(f"cannot write {path}: {reason}")
        self.path = path
        self.reason = reason


class DimensionCapExceededError(DtcError):
    def __init__(self, dim: int, cap: int, *, msg: str | None = None) -> None:
        if msg is None:
            msg = f"operator dimension {dim} exceeds the cap of {cap}"
        super().__init__(msg)
        self.dim = dim
        self.cap = cap


class EigenFailureError(DtcError):
    pass


class UndefinedDifferenceError(DtcError, ArithmeticError):
    def __init__(self, *, msg: str | None = None) -> None:
        super().__init__(msg or "inf - inf is undefined")


class UnknownDemoError(DtcError):
    def __init__(
        self, name: str, choices: Sequence[str], *, msg: str | None = None
    ) -> None:
        if msg is None:
            msg = f"unknown demo '{name}', choose one of {', '.join(choices)}"
        super().__init__(msg)
        self.name = name
        self.choices = list(choices)


class ConfigError(DtcError):
    pass


class UnknownRunError(DtcError):
    """A sweep run was queried that is not in the report store.

    By default, a message is generated from the supplied attributes, but
    a custom message can be provided.

    Arguments and fields:
    item_type -- the kind of row that failed to query, often the table name
    field -- the field the query failed on, often a column name
    value -- the value queried
    """

    def __init__(
        self,
        item_type: str,
        field: str | None = None,
        value: Any = None,
        *,
        msg: str | None = None,
    ) -> None:
        if msg is None:
            msg = f"unknown '{item_type}' item"
            if field:
                msg += f", no {field} with value '{value!r}'"
        super().__init__(msg)
        self.item_type = item_type
        self.field = field
        self.value = value
