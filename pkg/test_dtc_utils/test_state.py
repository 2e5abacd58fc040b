from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

from dtc_utils.config import DEFAULT_SETTINGS
from dtc_utils.constructors import (
    basis_state,
    dephasing_channel,
    depolarizing_channel,
    ghz,
    maximally_mixed,
    random_channel,
    random_mixed,
)
from dtc_utils.entropy import spectrum
from dtc_utils.exc import (
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
from dtc_utils.state import (
    apply_local_channel,
    basis_label,
    cyclic_complement,
    make_channel,
    make_state,
    marginal,
    partial_trace,
    permute,
    replicate,
    tensor,
    tensor_all,
)
from dtc_utils.test import (
    assert_matrix_close,
    assert_states_close,
    assert_valid_state,
)


class TestMakeState:
    def test_valid(self) -> None:
        s = make_state(np.eye(4) / 4, [2, 2])
        assert s.dims == (2, 2)
        assert s.labels == ("1", "2")
        assert s.n_parties == 2
        assert s.dim == 4
        assert s.positions == [1, 2]

    def test_matrix_is_read_only(self) -> None:
        s = make_state(np.eye(2) / 2, [2])
        with pytest.raises(ValueError):
            s.matrix[0, 0] = 1

    def test_custom_labels(self) -> None:
        s = make_state(np.eye(4) / 4, [2, 2], ["A", "B"])
        assert s.labels == ("A", "B")

    def test_duplicate_labels(self) -> None:
        with pytest.raises(StateValidationError):
            make_state(np.eye(4) / 4, [2, 2], ["A", "A"])

    def test_wrong_label_count(self) -> None:
        with pytest.raises(DimensionMismatchError):
            make_state(np.eye(4) / 4, [2, 2], ["A"])

    def test_dims_do_not_match_matrix(self) -> None:
        with pytest.raises(DimensionMismatchError):
            make_state(np.eye(4) / 4, [2, 3])

    def test_not_square(self) -> None:
        with pytest.raises(DimensionMismatchError):
            make_state(np.ones((2, 3)) / 2, [2])

    def test_invalid_dims(self) -> None:
        with pytest.raises(DimensionMismatchError):
            make_state(np.eye(1), [0])

    def test_non_finite(self) -> None:
        m = np.eye(2) / 2
        m[0, 1] = np.nan
        with pytest.raises(NonFiniteMatrixError):
            make_state(m, [2])

    def test_not_hermitian(self) -> None:
        m = np.array([[0.5, 0.1], [0.0, 0.5]])
        with pytest.raises(NotHermitianError) as exc_info:
            make_state(m, [2])
        assert exc_info.value.deviation == pytest.approx(0.2)

    def test_hermitian_within_tolerance_is_symmetrized(self) -> None:
        m = np.array([[0.5, 1e-13], [0.0, 0.5]], dtype=complex)
        s = make_state(m, [2])
        assert_matrix_close(s.matrix, s.matrix.conj().T, atol=0)

    def test_not_unit_trace(self) -> None:
        with pytest.raises(NotUnitTraceError) as exc_info:
            make_state(np.eye(2) / 4, [2])
        assert exc_info.value.trace == pytest.approx(0.5)

    def test_not_psd(self) -> None:
        m = np.diag([1.25, -0.25])
        with pytest.raises(NotPSDError) as exc_info:
            make_state(m, [2])
        assert exc_info.value.eigenvalue == pytest.approx(-0.25)

    def test_tiny_negative_eigenvalue_is_accepted(self) -> None:
        make_state(np.diag([1 + 1e-12, -1e-12]), [2])

    def test_validation_errors_share_a_base(self) -> None:
        with pytest.raises(StateValidationError):
            make_state(np.eye(2) / 4, [2])


class TestPartialTrace:
    def test_product_state(self) -> None:
        a = random_mixed([2], seed=1)
        b = random_mixed([3], seed=2)
        ab = tensor(a, b)
        assert_states_close(partial_trace(ab, [2]), a)
        assert_states_close(partial_trace(ab, [1]), b)

    def test_ghz_marginals(self) -> None:
        s = ghz(3)
        rho_12 = partial_trace(s, [3])
        assert rho_12.dims == (2, 2)
        assert rho_12.labels == ("1", "2")
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[3, 3] = 0.5
        assert_matrix_close(rho_12.matrix, expected)

    def test_empty_drop_returns_state(self) -> None:
        s = ghz(2)
        assert partial_trace(s, []) is s

    def test_cannot_trace_out_everything(self) -> None:
        with pytest.raises(InvalidPartySetError):
            partial_trace(ghz(2), [1, 2])

    def test_unknown_party(self) -> None:
        with pytest.raises(InvalidPartySetError):
            partial_trace(ghz(2), [3])

    def test_unequal_dims(self) -> None:
        s = random_mixed([2, 3, 2], seed=3)
        rho = partial_trace(s, [2])
        assert rho.dims == (2, 2)
        assert_valid_state(rho)
        assert_states_close(partial_trace(rho, [2]), marginal(s, [1]))


class TestPermute:
    def test_swap_basis_state(self) -> None:
        s = basis_state([0, 1], [2, 2])
        swapped = permute(s, [2, 1])
        assert_states_close(swapped, basis_state([1, 0], [2, 2]))
        assert swapped.labels == ("2", "1")

    def test_identity_permutation(self) -> None:
        s = random_mixed([2, 2], seed=4)
        assert permute(s, [1, 2]) is s

    def test_unequal_dims(self) -> None:
        s = basis_state([1, 2], [2, 3])
        p = permute(s, [2, 1])
        assert p.dims == (3, 2)
        assert_states_close(p, basis_state([2, 1], [3, 2]))

    def test_cycle(self) -> None:
        s = basis_state([0, 1, 1], [2, 2, 2])
        assert_states_close(
            permute(s, [3, 1, 2]), basis_state([1, 0, 1], [2, 2, 2])
        )

    def test_round_trip(self) -> None:
        s = random_mixed([2, 3, 2], seed=5)
        p = permute(s, [2, 3, 1])
        assert_states_close(permute(p, [3, 1, 2]), s, check_labels=True)

    @pytest.mark.parametrize("perm", [[1, 1, 2], [1, 2], [0, 1, 2]])
    def test_invalid(self, perm: list[int]) -> None:
        with pytest.raises(InvalidPermutationError):
            permute(ghz(3), perm)


class TestMarginal:
    def test_order_is_respected(self) -> None:
        s = random_mixed([2, 3, 2], seed=6)
        rho_31 = marginal(s, [3, 1])
        assert rho_31.dims == (2, 2)
        assert rho_31.labels == ("3", "1")
        assert_states_close(rho_31, permute(marginal(s, [1, 3]), [2, 1]))

    def test_all_parties(self) -> None:
        s = ghz(3)
        assert marginal(s, [1, 2, 3]) is s

    @pytest.mark.parametrize("keep", [[], [1, 1], [4]])
    def test_invalid(self, keep: list[int]) -> None:
        with pytest.raises(InvalidPartySetError):
            marginal(ghz(3), keep)


class TestTensor:
    def test_kronecker(self) -> None:
        a = random_mixed([2], seed=7)
        b = random_mixed([2], seed=8)
        ab = tensor(a, b)
        assert ab.dims == (2, 2)
        assert_matrix_close(ab.matrix, np.kron(a.matrix, b.matrix))

    def test_copy_tags(self) -> None:
        s = tensor(ghz(3), ghz(3))
        assert s.labels == ("1", "2", "3", "1'", "2'", "3'")

    def test_repeated_copy_tags(self) -> None:
        s = replicate(ghz(2), 3)
        assert s.labels == ("1", "2", "1'", "2'", "1''", "2''")

    def test_tensor_all(self) -> None:
        states = [maximally_mixed([2]), maximally_mixed([3])]
        s = tensor_all(states)
        assert s.dims == (2, 3)
        assert_matrix_close(s.matrix, np.eye(6) / 6)

    def test_tensor_all_empty(self) -> None:
        with pytest.raises(DimensionMismatchError):
            tensor_all([])

    def test_cap(self) -> None:
        settings = DEFAULT_SETTINGS.with_overrides(dim_cap=32)
        with pytest.raises(DimensionCapExceededError) as exc_info:
            tensor(ghz(3), ghz(3), settings=settings)
        assert exc_info.value.dim == 64
        assert exc_info.value.cap == 32


class TestReplicate:
    def test_two_copies(self) -> None:
        s = random_mixed([2], seed=9)
        assert_matrix_close(
            replicate(s, 2).matrix, np.kron(s.matrix, s.matrix)
        )

    def test_one_copy(self) -> None:
        s = ghz(2)
        assert_states_close(replicate(s, 1), s)

    @pytest.mark.parametrize(
        "dims, copies", [([2], 2), ([2], 3), ([3], 2), ([2, 2], 2)]
    )
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_spectrum_is_product(
        self, dims: list[int], copies: int, seed: int
    ) -> None:
        s = random_mixed(dims, seed=seed)
        single = spectrum(s.matrix).eigenvalues
        expected = reduce(np.multiply.outer, [single] * copies).ravel()
        actual = spectrum(replicate(s, copies).matrix).eigenvalues
        assert_matrix_close(actual, np.sort(expected)[::-1], atol=1e-10)

    def test_invalid_count(self) -> None:
        with pytest.raises(OutOfRangeError):
            replicate(ghz(2), 0)

    def test_cap(self) -> None:
        with pytest.raises(DimensionCapExceededError):
            replicate(ghz(3), 5)


class TestCyclicComplement:
    @pytest.mark.parametrize(
        "k,n,expected",
        [
            (1, 3, [2, 3]),
            (2, 3, [3, 1]),
            (3, 3, [1, 2]),
            (1, 2, [2]),
            (2, 4, [3, 4, 1]),
        ],
    )
    def test_complement(self, k: int, n: int, expected: list[int]) -> None:
        assert cyclic_complement(k, n) == expected

    @pytest.mark.parametrize("k,n", [(0, 3), (4, 3), (1, 1)])
    def test_invalid(self, k: int, n: int) -> None:
        with pytest.raises(OutOfRangeError):
            cyclic_complement(k, n)


class TestChannels:
    def test_make_channel_rejects_incomplete(self) -> None:
        with pytest.raises(InvalidChannelError):
            make_channel([np.eye(2) / 2])

    def test_make_channel_rejects_mixed_sizes(self) -> None:
        with pytest.raises(InvalidChannelError):
            make_channel([np.eye(2), np.eye(3)])

    def test_make_channel_rejects_empty(self) -> None:
        with pytest.raises(InvalidChannelError):
            make_channel([])

    def test_dephasing(self) -> None:
        s = ghz(2)
        out = apply_local_channel(s, 1, dephasing_channel(2))
        expected = np.zeros((4, 4))
        expected[0, 0] = expected[3, 3] = 0.5
        assert_matrix_close(out.matrix, expected)
        assert out.labels == s.labels

    def test_depolarizing_second_party(self) -> None:
        s = random_mixed([2, 3], seed=10)
        out = apply_local_channel(s, 2, depolarizing_channel(3))
        expected = np.kron(marginal(s, [1]).matrix, np.eye(3) / 3)
        assert_matrix_close(out.matrix, expected)

    def test_random_channel_keeps_state_valid(self) -> None:
        s = random_mixed([2, 2, 2], seed=11)
        out = apply_local_channel(s, 3, random_channel(2, 3, seed=12))
        assert_valid_state(out)

    def test_dimension_mismatch(self) -> None:
        with pytest.raises(DimensionMismatchError):
            apply_local_channel(ghz(2), 1, dephasing_channel(3))

    def test_invalid_party(self) -> None:
        with pytest.raises(InvalidPartySetError):
            apply_local_channel(ghz(2), 3, dephasing_channel(2))


class TestBasisLabel:
    def test_qubits(self) -> None:
        assert basis_label(7, [2, 2, 2, 2, 2, 2]) == "|000111>"
        assert basis_label(56, [2, 2, 2, 2, 2, 2]) == "|111000>"

    def test_mixed_dims(self) -> None:
        assert basis_label(5, [2, 3]) == "|12>"

    def test_large_dims(self) -> None:
        assert basis_label(11, [12]) == "|11>"
        assert basis_label(13, [2, 12]) == "|1,1>"
