"""Multipartite density-matrix algebra.

Party positions are 1-based throughout the public API, matching the
usual k = 1..n notation. Positional order, not labels, drives all matrix
arithmetic; labels exist for reporting.
"""

from __future__ import annotations

import math
from collections.abc import Collection, Iterable, Sequence
from dataclasses import dataclass
from functools import reduce

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .config import Settings, resolve
from .exc import (
    DimensionCapExceededError,
    DimensionMismatchError,
    InvalidChannelError,
    InvalidPartySetError,
    InvalidPermutationError,
    NonFiniteMatrixError,
    NotHermitianError,
    NotPSDError,
    NotUnitTraceError,
    OutOfRangeError,
    StateValidationError,
)
from .types import ComplexMatrix, Party

COPY_TAG = "'"


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    """A validated density matrix on an ordered list of parties.

    Do not instantiate directly, use make_state() or one of the
    constructors in dtc_utils.constructors. The matrix is read-only.
    """

    matrix: ComplexMatrix
    dims: tuple[int, ...]
    labels: tuple[str, ...]

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def positions(self) -> list[Party]:
        return list(range(1, self.n_parties + 1))

    def with_labels(self, labels: Sequence[str]) -> MultipartiteState:
        return _new_state(self.matrix, self.dims, _check_labels(labels, self))

    def __repr__(self) -> str:
        return (
            f"MultipartiteState(dims={list(self.dims)!r}, "
            f"labels={list(self.labels)!r})"
        )


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A local CPTP map given by square Kraus operators.

    Use make_channel() to get a validated instance.
    """

    party_dim: int
    kraus: tuple[ComplexMatrix, ...]

    def completeness_deviation(self) -> float:
        """Max-norm of sum(K†K) - I."""
        total = sum(
            (k.conj().T @ k for k in self.kraus),
            np.zeros((self.party_dim, self.party_dim), dtype=np.complex128),
        )
        return _max_norm(total - np.eye(self.party_dim))


def make_state(
    matrix: npt.ArrayLike,
    dims: Sequence[int],
    labels: Sequence[str] | None = None,
    *,
    settings: Settings | None = None,
) -> MultipartiteState:
    """Validate a matrix as a density matrix on parties with given dims.

    The matrix is checked for Hermiticity first and then replaced by its
    Hermitian part (M + M†)/2, on which the trace and positivity checks
    are made. Raise DimensionMismatchError, NonFiniteMatrixError,
    NotHermitianError, NotUnitTraceError, or NotPSDError.
    """
    tol = resolve(settings).tolerances
    m = np.array(matrix, dtype=np.complex128)
    dims = _check_dims(dims)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(
            "square matrix",
            m.shape,
            msg=f"matrix of shape {m.shape} is not square",
        )
    if math.prod(dims) != m.shape[0]:
        raise DimensionMismatchError(m.shape[0], math.prod(dims))
    if not np.all(np.isfinite(m)):
        raise NonFiniteMatrixError()

    scale = _max_norm(m)
    if scale > 0:
        deviation = _max_norm(m - m.conj().T) / scale
        if deviation > tol.herm:
            raise NotHermitianError(deviation)
    m = (m + m.conj().T) / 2

    trace = complex(np.trace(m))
    if abs(trace - 1) > tol.trace:
        raise NotUnitTraceError(trace)
    lowest = float(scipy.linalg.eigvalsh(m, subset_by_index=[0, 0])[0])
    if lowest < -tol.psd:
        raise NotPSDError(lowest)

    if labels is None:
        labels = [str(i) for i in range(1, len(dims) + 1)]
    return _new_state(m, dims, _check_labels(labels, dims))


def make_channel(
    kraus: Iterable[npt.ArrayLike], *, settings: Settings | None = None
) -> KrausChannel:
    """Validate a list of Kraus operators as a CPTP map on one party."""
    ops = tuple(np.array(k, dtype=np.complex128) for k in kraus)
    if not ops:
        raise InvalidChannelError(msg="a channel needs at least one operator")
    d = ops[0].shape[0] if ops[0].ndim == 2 else 0
    if d == 0 or any(k.shape != (d, d) for k in ops):
        raise InvalidChannelError(
            msg="Kraus operators must be square and of equal size"
        )
    if not all(np.all(np.isfinite(k)) for k in ops):
        raise InvalidChannelError(msg="Kraus operators must be finite")
    for k in ops:
        k.setflags(write=False)
    channel = KrausChannel(d, ops)
    _check_complete(channel, resolve(settings))
    return channel


def tensor(
    a: MultipartiteState,
    b: MultipartiteState,
    *,
    settings: Settings | None = None,
) -> MultipartiteState:
    """Return a ⊗ b with a's parties first.

    Labels of b that collide with earlier labels get copy tags appended,
    so tensor(ghz, ghz) is labelled 1, 2, 3, 1', 2', 3'.
    """
    _check_cap(a.dim * b.dim, resolve(settings))
    labels = _tagged_labels(a.labels, b.labels)
    return _new_state(
        np.kron(a.matrix, b.matrix), a.dims + b.dims, tuple(labels)
    )


def tensor_all(
    states: Iterable[MultipartiteState], *, settings: Settings | None = None
) -> MultipartiteState:
    """Positional tensor product of a non-empty sequence of states."""
    states = list(states)
    if not states:
        raise DimensionMismatchError(
            "at least one state", 0, msg="cannot tensor an empty list"
        )
    _check_cap(math.prod(s.dim for s in states), resolve(settings))
    return reduce(lambda x, y: tensor(x, y, settings=settings), states)


def partial_trace(
    s: MultipartiteState, drop: Collection[Party]
) -> MultipartiteState:
    """Trace out the parties in drop.

    The remaining parties keep their original relative order. At least
    one party must remain.
    """
    drop_set = set(drop)
    if not drop_set <= set(s.positions) or len(drop_set) == s.n_parties:
        raise InvalidPartySetError(sorted(drop_set), s.n_parties)
    if not drop_set:
        return s
    return _reduce(s, [p for p in s.positions if p not in drop_set])


def permute(s: MultipartiteState, perm: Sequence[Party]) -> MultipartiteState:
    """Reorder the parties of a state.

    perm lists the old positions in their new order: position i of the
    result holds party perm[i - 1] of s. The matrix is conjugated by the
    corresponding subsystem-permutation unitary.
    """
    perm = list(perm)
    if sorted(perm) != s.positions:
        raise InvalidPermutationError(perm)
    if perm == s.positions:
        return s
    return _reduce(s, perm)


def marginal(s: MultipartiteState, keep: Sequence[Party]) -> MultipartiteState:
    """Return the reduced state on keep, with parties in exactly that order.

    Equivalent to permuting keep to the front and tracing out the rest.
    """
    keep = list(keep)
    if (
        not keep
        or len(set(keep)) != len(keep)
        or not set(keep) <= set(s.positions)
    ):
        raise InvalidPartySetError(keep, s.n_parties)
    if keep == s.positions:
        return s
    return _reduce(s, keep)


def cyclic_complement(k: Party, n: int) -> list[Party]:
    """Return the parties (k+1, ..., n, 1, ..., k-1).

    >>> cyclic_complement(2, 3)
    [3, 1]
    """
    if n < 2:
        raise OutOfRangeError("n", n, 2)
    if not 1 <= k <= n:
        raise OutOfRangeError("k", k, 1, n)
    return list(range(k + 1, n + 1)) + list(range(1, k))


def replicate(
    s: MultipartiteState, m: int, *, settings: Settings | None = None
) -> MultipartiteState:
    """Return the m-fold positional tensor power of s."""
    if m < 1:
        raise OutOfRangeError("m", m, 1)
    _check_cap(s.dim**m, resolve(settings))
    return tensor_all([s] * m, settings=settings)


def apply_local_channel(
    s: MultipartiteState,
    party: Party,
    ch: KrausChannel,
    *,
    settings: Settings | None = None,
) -> MultipartiteState:
    """Apply a channel to one party: sum_j (I⊗K_j⊗I) ρ (I⊗K_j⊗I)†."""
    settings = resolve(settings)
    if not 1 <= party <= s.n_parties:
        raise InvalidPartySetError([party], s.n_parties)
    if ch.party_dim != s.dims[party - 1]:
        raise DimensionMismatchError(s.dims[party - 1], ch.party_dim)
    _check_complete(ch, settings)

    left = np.eye(math.prod(s.dims[: party - 1]))
    right = np.eye(math.prod(s.dims[party:]))
    out = np.zeros_like(s.matrix)
    for k in ch.kraus:
        embedded = np.kron(np.kron(left, k), right)
        out += embedded @ s.matrix @ embedded.conj().T
    return make_state(out, s.dims, s.labels, settings=settings)


def basis_label(index: int, dims: Sequence[int]) -> str:
    """Ket label of a computational basis vector, e.g. "|0112>".

    Digits are separated by commas if any local dimension exceeds 10.
    """
    digits = np.unravel_index(index, tuple(dims))
    sep = "," if max(dims) > 10 else ""
    return "|" + sep.join(str(int(d)) for d in digits) + ">"


def _reduce(s: MultipartiteState, keep: Sequence[Party]) -> MultipartiteState:
    """Reduced state on keep (ordered, 1-based), tracing out the rest."""
    n = s.n_parties
    keep0 = [p - 1 for p in keep]
    drop0 = [i for i in range(n) if i not in keep0]
    order = keep0 + drop0
    t = s.matrix.reshape(s.dims + s.dims)
    t = t.transpose(order + [n + i for i in order])
    dk = math.prod(s.dims[i] for i in keep0)
    dd = math.prod(s.dims[i] for i in drop0)
    reduced = np.einsum("aibi->ab", t.reshape(dk, dd, dk, dd))
    return _new_state(
        reduced,
        tuple(s.dims[i] for i in keep0),
        tuple(s.labels[i] for i in keep0),
    )


def _new_state(
    matrix: ComplexMatrix, dims: tuple[int, ...], labels: tuple[str, ...]
) -> MultipartiteState:
    matrix = np.ascontiguousarray(matrix, dtype=np.complex128)
    matrix.setflags(write=False)
    return MultipartiteState(matrix, dims, labels)


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    checked = tuple(int(d) for d in dims)
    if not checked or any(d < 1 for d in checked):
        raise DimensionMismatchError(
            "nonempty list of positive integers",
            list(dims),
            msg=f"invalid dims {list(dims)!r}",
        )
    return checked


def _check_labels(
    labels: Sequence[str], dims: Sequence[int] | MultipartiteState
) -> tuple[str, ...]:
    n = dims.n_parties if isinstance(dims, MultipartiteState) else len(dims)
    checked = tuple(str(label) for label in labels)
    if len(checked) != n:
        raise DimensionMismatchError(
            n, len(checked), msg=f"expected {n} labels, got {len(checked)}"
        )
    if len(set(checked)) != len(checked):
        raise StateValidationError(
            f"labels must be pairwise distinct, got {list(checked)!r}"
        )
    return checked


def _tagged_labels(
    existing: Sequence[str], new: Sequence[str]
) -> list[str]:
    taken = set(existing)
    labels = list(existing)
    for label in new:
        while label in taken:
            label += COPY_TAG
        taken.add(label)
        labels.append(label)
    return labels


def _check_cap(dim: int, settings: Settings) -> None:
    if dim > settings.dim_cap:
        raise DimensionCapExceededError(dim, settings.dim_cap)


def _check_complete(ch: KrausChannel, settings: Settings) -> None:
    deviation = ch.completeness_deviation()
    if deviation > settings.tolerances.cptp:
        raise InvalidChannelError(deviation)


def _max_norm(m: npt.NDArray[np.generic]) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0
