"""Named states, seeded random ensembles, and local channels.

Every stochastic constructor takes an explicit seed and is deterministic
given its arguments. A seed may be an int or a numpy SeedSequence, so
sweeps can hand out spawned child sequences.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
import numpy.typing as npt

from .config import Settings
from .exc import OutOfRangeError
from .state import (
    KrausChannel,
    MultipartiteState,
    make_channel,
    make_state,
    tensor_all,
)
from .types import ComplexMatrix, SeedLike


def pure_state(
    ket: npt.ArrayLike,
    dims: Sequence[int],
    labels: Sequence[str] | None = None,
    *,
    settings: Settings | None = None,
) -> MultipartiteState:
    """Return |ψ⟩⟨ψ| for a (not necessarily normalized) ket."""
    psi = np.asarray(ket, dtype=np.complex128).ravel()
    psi = psi / np.linalg.norm(psi)
    return make_state(
        np.outer(psi, psi.conj()), dims, labels, settings=settings
    )


def basis_state(
    digits: Sequence[int], dims: Sequence[int]
) -> MultipartiteState:
    """Return the computational basis state |digits⟩, e.g. |01⟩."""
    ket = np.zeros(math.prod(dims), dtype=np.complex128)
    ket[np.ravel_multi_index(tuple(digits), tuple(dims))] = 1
    return pure_state(ket, dims)


def ghz(n: int, d: int = 2) -> MultipartiteState:
    """(|0…0⟩ + |1…1⟩ + … + |d-1…d-1⟩)/√d on n parties of dimension d."""
    if n < 2:
        raise OutOfRangeError("n", n, 2)
    if d < 2:
        raise OutOfRangeError("d", d, 2)
    dims = (d,) * n
    ket = np.zeros(d**n, dtype=np.complex128)
    for j in range(d):
        ket[np.ravel_multi_index((j,) * n, dims)] = 1
    return pure_state(ket, dims)


def w_state(n: int) -> MultipartiteState:
    """(|10…0⟩ + |01…0⟩ + … + |0…01⟩)/√n on n qubits."""
    if n < 2:
        raise OutOfRangeError("n", n, 2)
    ket = np.zeros(2**n, dtype=np.complex128)
    for k in range(n):
        ket[2 ** (n - 1 - k)] = 1
    return pure_state(ket, (2,) * n)


def product_state(
    states: Sequence[MultipartiteState], *, settings: Settings | None = None
) -> MultipartiteState:
    """Tensor product of states, relabelled 1..n in positional order."""
    s = tensor_all(states, settings=settings)
    return s.with_labels([str(i) for i in s.positions])


def maximally_mixed(dims: Sequence[int]) -> MultipartiteState:
    dim = math.prod(dims)
    return make_state(np.eye(dim) / dim, dims)


def random_pure(dims: Sequence[int], seed: SeedLike) -> MultipartiteState:
    """Haar-random pure state on parties with the given dims."""
    rng = np.random.default_rng(seed)
    return pure_state(_ginibre(rng, math.prod(dims), 1), dims)


def random_mixed(
    dims: Sequence[int], rank: int | None = None, *, seed: SeedLike
) -> MultipartiteState:
    """Random density matrix of a given rank (full rank by default).

    Draw a Haar-random pure state on system ⊗ ancilla, with an ancilla of
    dimension rank, and trace out the ancilla. For rank equal to the
    system dimension this is the Hilbert-Schmidt ensemble, whose members
    have full support almost surely.
    """
    dim = math.prod(dims)
    if rank is None:
        rank = dim
    if not 1 <= rank <= dim:
        raise OutOfRangeError("rank", rank, 1, dim)
    rng = np.random.default_rng(seed)
    psi = _ginibre(rng, dim, rank)
    psi /= np.linalg.norm(psi)
    return make_state(psi @ psi.conj().T, dims)


def random_unitary(d: int, seed: SeedLike) -> ComplexMatrix:
    """Haar-random unitary of order d."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def identity_channel(d: int) -> KrausChannel:
    return make_channel([np.eye(d)])


def dephasing_channel(d: int, p: float = 1.0) -> KrausChannel:
    """Dephase in the computational basis with probability p.

    p = 1 gives the completely dephasing channel {|j⟩⟨j|}.
    """
    _check_probability("p", p)
    kraus = [math.sqrt(p) * _unit(d, j, j) for j in range(d)]
    if p < 1:
        kraus.append(math.sqrt(1 - p) * np.eye(d))
    return make_channel(kraus)


def depolarizing_channel(d: int, p: float = 1.0) -> KrausChannel:
    """ρ ↦ (1 - p) ρ + p tr(ρ) I/d; p = 1 is fully depolarizing."""
    _check_probability("p", p)
    kraus = [
        math.sqrt(p / d) * _unit(d, i, j) for i in range(d) for j in range(d)
    ]
    if p < 1:
        kraus.append(math.sqrt(1 - p) * np.eye(d))
    return make_channel(kraus)


def amplitude_damping_channel(gamma: float) -> KrausChannel:
    _check_probability("gamma", gamma)
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]])
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]])
    return make_channel([k0, k1])


def random_channel(d: int, n_kraus: int, seed: SeedLike) -> KrausChannel:
    """Random channel with n_kraus Kraus operators.

    The operators are the blocks of a random isometry C^d → C^(d·n_kraus)
    obtained from the QR decomposition of a Ginibre matrix.
    """
    if n_kraus < 1:
        raise OutOfRangeError("n_kraus", n_kraus, 1)
    rng = np.random.default_rng(seed)
    isometry, _ = np.linalg.qr(_ginibre(rng, d * n_kraus, d))
    return make_channel(
        isometry[j * d : (j + 1) * d, :] for j in range(n_kraus)
    )


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> ComplexMatrix:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal(
        (rows, cols)
    )


def _unit(d: int, i: int, j: int) -> ComplexMatrix:
    m = np.zeros((d, d), dtype=np.complex128)
    m[i, j] = 1
    return m


def _check_probability(name: str, value: float) -> None:
    if not 0 <= value <= 1:
        raise ValueError(f"{name} must be in [0, 1], got {value}")
