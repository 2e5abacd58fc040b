"""pytest utilities for states, extended reals and the report store."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from types import TracebackType
from typing import Any, TypeVar

import numpy as np
import numpy.typing as npt
import pytest
from sqlalchemy import text
from sqlalchemy.engine import Row

from .extended import ExtendedReal
from .state import MultipartiteState
from .store import ReportStore

_S = TypeVar("_S", bound="StoreFixture")

_MEMORY_DB_URL = "sqlite:///:memory:"


def assert_matrix_close(
    actual: npt.ArrayLike, expected: npt.ArrayLike, *, atol: float = 1e-9
) -> None:
    """Assert that two matrices agree entrywise up to atol."""
    __tracebackhide__ = True
    a = np.asarray(actual)
    e = np.asarray(expected)
    assert a.shape == e.shape, f"shape {a.shape} != {e.shape}"
    deviation = float(np.max(np.abs(a - e))) if a.size else 0.0
    assert deviation <= atol, f"matrices differ by {deviation:.3e}"


def assert_states_close(
    actual: MultipartiteState,
    expected: MultipartiteState,
    *,
    atol: float = 1e-9,
    check_labels: bool = False,
) -> None:
    """Assert that two states have the same dims and matrix up to atol.

    Labels are only compared if check_labels is true.
    """
    __tracebackhide__ = True
    assert actual.dims == expected.dims, f"{actual.dims} != {expected.dims}"
    if check_labels:
        assert (
            actual.labels == expected.labels
        ), f"{actual.labels} != {expected.labels}"
    assert_matrix_close(actual.matrix, expected.matrix, atol=atol)


def assert_extended_close(
    actual: ExtendedReal | None,
    expected: ExtendedReal | float,
    *,
    atol: float = 1e-9,
) -> None:
    """Assert that an extended real matches a number or +inf.

    Infinite values only match infinite values.
    """
    __tracebackhide__ = True
    assert actual is not None, "value is missing"
    if not isinstance(expected, ExtendedReal):
        expected = ExtendedReal(float(expected))
    if expected.is_infinite or actual.is_infinite:
        assert actual.is_infinite and expected.is_infinite, (
            f"{actual} != {expected}"
        )
    else:
        assert abs(actual.value - expected.value) <= atol, (
            f"{actual} != {expected} (atol={atol})"
        )


def assert_valid_state(s: MultipartiteState, *, atol: float = 1e-9) -> None:
    """Assert that a state is a Hermitian, unit-trace, PSD matrix."""
    __tracebackhide__ = True
    m = s.matrix
    assert m.shape == (s.dim, s.dim), f"matrix shape {m.shape}"
    assert_matrix_close(m, m.conj().T, atol=atol)
    trace = complex(np.trace(m))
    assert abs(trace - 1) <= atol, f"trace {trace}"
    lowest = float(np.linalg.eigvalsh(m)[0])
    assert lowest >= -atol, f"negative eigenvalue {lowest}"


def assert_row_equals(
    row: Row[Any], expected_values: Mapping[str, Any]
) -> None:
    """Assert that a row contains expected values.

    Columns of the row that are not listed in expected_values are
    ignored.
    """
    __tracebackhide__ = True
    for column_name, expected in expected_values.items():
        column_value = row._mapping[column_name]
        assert (
            column_value == expected
        ), f"column '{column_name}': {expected!r} != {column_value!r}"


class StoreFixture:
    """Report store test fixture backed by an in-memory SQLite database.

        >>> @pytest.fixture
        ... def store() -> Generator[StoreFixture, None, None]:
        ...     with StoreFixture() as fixture:
        ...         yield fixture
    """

    def __init__(self, url: str = _MEMORY_DB_URL) -> None:
        self.url = url
        self._store: ReportStore | None = None

    def __enter__(self: _S) -> _S:
        self._store = ReportStore(self.url).__enter__()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: TracebackType | None,
    ) -> None:
        assert self._store is not None
        self._store.__exit__(exc_type, exc_val, exc_tb)
        self._store = None

    @property
    def store(self) -> ReportStore:
        if self._store is None:
            raise RuntimeError("call __enter__() before accessing store")
        return self._store

    def select_sql(
        self, query: str, args: Mapping[str, Any] | None = None
    ) -> Sequence[Row[Any]]:
        """Execute a SQL SELECT in the store's session and return all rows."""
        res = self.store.session.execute(text(query), args)
        try:
            return res.fetchall()
        finally:
            res.close()

    def select_sql_one_row(
        self, query: str, args: Mapping[str, Any] | None = None
    ) -> Row[Any]:
        """Execute a SQL SELECT and return one row.

        Raise an AssertionError if the result has zero or more than one row.
        """
        rows = self.select_sql(query, args)
        assert len(rows) == 1, f"got {len(rows)} rows, expected 1"
        return rows[0]

    def assert_row_count(self, table_name: str, expected_rows: int) -> None:
        """Assert that a table has a certain amount of rows."""
        __tracebackhide__ = True
        rows = self.select_sql(f"SELECT * FROM {table_name}")
        assert len(rows) == expected_rows, (
            f"table {table_name} contains {len(rows)} rows, "
            f"expected {expected_rows}"
        )

    def assert_table_is_empty(self, table_name: str) -> None:
        self.assert_row_count(table_name, 0)


def approx_bits(value: float, atol: float = 1e-9) -> Any:
    """pytest.approx with an absolute tolerance suited to entropies."""
    return pytest.approx(value, abs=atol)
