from __future__ import annotations

import json
from collections.abc import Callable

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dtc_utils.config import DEFAULT_SETTINGS
from dtc_utils.constructors import (
    ghz,
    maximally_mixed,
    product_state,
    random_channel,
    random_mixed,
    random_pure,
    w_state,
)
from dtc_utils.correlations import (
    UNDEFINED,
    GapReport,
    cross_term,
    dtc_relent_regrouped,
    dtc_relent_sum,
    dtc_relent_tensor,
    dual_total_correlation,
    gap_report,
    j_n,
    jtilde3_decomposition,
    jtilde_n,
    total_correlation,
)
from dtc_utils.entropy import (
    mutual_information,
    relative_entropy,
    von_neumann_entropy,
)
from dtc_utils.exc import (
    DimensionCapExceededError,
    InvalidPartySetError,
    OutOfRangeError,
    WrongArityError,
)
from dtc_utils.extended import INFINITY, ExtendedReal
from dtc_utils.state import (
    MultipartiteState,
    apply_local_channel,
    marginal,
    tensor,
)
from dtc_utils.test import approx_bits, assert_extended_close

seeds = st.integers(min_value=0, max_value=2**32 - 1)

# h(1/3), the entropy of each two-party marginal of the W state
H_THIRD = 0.9182958340544896


@pytest.fixture
def product3() -> MultipartiteState:
    qubit = random_mixed([2], seed=11)
    return product_state([qubit, qubit, qubit])


def _mixed_product3() -> MultipartiteState:
    return product_state(
        [random_mixed([2], seed=s) for s in (21, 22, 23)]
    )


class TestDualTotalCorrelation:
    def test_ghz(self) -> None:
        dtc = dual_total_correlation(ghz(3))
        assert dtc.value == approx_bits(3)
        assert dtc.global_entropy == approx_bits(0)
        assert [keep for keep, _ in dtc.marginal_entropies] == [
            (2, 3),
            (3, 1),
            (1, 2),
        ]
        assert dtc.n_parties == 3

    def test_bell(self) -> None:
        assert dual_total_correlation(ghz(2)).value == approx_bits(2)

    def test_bell_is_mutual_information(self) -> None:
        s = random_mixed([2, 3], seed=1)
        assert dual_total_correlation(s).value == approx_bits(
            mutual_information(s, [1], [2])
        )

    def test_product(self) -> None:
        assert dual_total_correlation(_mixed_product3()).value == approx_bits(
            0
        )

    def test_w_state(self) -> None:
        assert dual_total_correlation(w_state(3)).value == approx_bits(
            3 * H_THIRD
        )

    def test_breakdown_adds_up(self) -> None:
        dtc = dual_total_correlation(random_mixed([2, 2, 3], seed=2))
        total = sum(e for _, e in dtc.marginal_entropies)
        assert dtc.value == pytest.approx(
            total - 2 * dtc.global_entropy, abs=1e-10
        )

    def test_single_party(self) -> None:
        with pytest.raises(OutOfRangeError):
            dual_total_correlation(maximally_mixed([2]))

    @given(seeds)
    @settings(max_examples=15, deadline=None)
    def test_non_negative(self, seed: int) -> None:
        s = random_mixed([2, 2, 2], 2, seed=seed)
        assert dual_total_correlation(s).value >= -1e-8

    @given(seeds, st.integers(min_value=1, max_value=3))
    @settings(max_examples=15, deadline=None)
    def test_local_channels_do_not_increase(
        self, seed: int, party: int
    ) -> None:
        seq = np.random.SeedSequence(seed).spawn(2)
        s = random_mixed([2, 2, 2], seed=seq[0])
        after = apply_local_channel(s, party, random_channel(2, 2, seq[1]))
        before_value = dual_total_correlation(s).value
        assert dual_total_correlation(after).value <= before_value + 1e-7


class TestTotalCorrelation:
    def test_ghz(self) -> None:
        assert_extended_close(total_correlation(ghz(3)), 3)

    def test_product(self) -> None:
        assert_extended_close(total_correlation(_mixed_product3()), 0)

    def test_maximally_mixed(self) -> None:
        assert_extended_close(total_correlation(maximally_mixed([2, 3])), 0)

    def test_entropy_sum(self) -> None:
        s = random_mixed([2, 3, 2], seed=3)
        expected = sum(
            von_neumann_entropy(marginal(s, [k])) for k in (1, 2, 3)
        ) - von_neumann_entropy(s)
        assert_extended_close(total_correlation(s), expected, atol=1e-9)


class TestValidRelativeEntropyForms:
    def test_ghz(self) -> None:
        assert_extended_close(dtc_relent_sum(ghz(3)), 3, atol=1e-8)
        assert_extended_close(dtc_relent_tensor(ghz(3)), 3, atol=1e-8)

    def test_product(self) -> None:
        s = _mixed_product3()
        assert_extended_close(dtc_relent_sum(s), 0, atol=1e-8)
        assert_extended_close(dtc_relent_tensor(s), 0, atol=1e-8)

    @pytest.mark.parametrize("seed", [42, 7, 2024])
    def test_random_full_rank(self, seed: int) -> None:
        s = random_mixed([2, 2, 2], seed=seed)
        dtc = dual_total_correlation(s).value
        assert_extended_close(dtc_relent_sum(s), dtc, atol=1e-8)
        assert_extended_close(dtc_relent_tensor(s), dtc, atol=1e-7)

    def test_random_pure(self) -> None:
        s = random_pure([2, 2, 2], 5)
        dtc = dual_total_correlation(s).value
        assert_extended_close(dtc_relent_sum(s), dtc, atol=1e-7)

    def test_unequal_dims(self) -> None:
        s = random_mixed([2, 3], seed=6)
        dtc = dual_total_correlation(s).value
        assert_extended_close(dtc_relent_sum(s), dtc, atol=1e-8)
        assert_extended_close(dtc_relent_tensor(s), dtc, atol=1e-8)

    def test_tensor_form_cap(self) -> None:
        overrides = DEFAULT_SETTINGS.with_overrides(dim_cap=256)
        with pytest.raises(DimensionCapExceededError):
            dtc_relent_tensor(ghz(3), settings=overrides)


class TestJ:
    def test_ghz_violates_support(self) -> None:
        assert j_n(ghz(3)) == INFINITY

    def test_maximally_mixed(self) -> None:
        assert_extended_close(j_n(maximally_mixed([2, 2, 2])), 0)

    def test_identical_product(self, product3: MultipartiteState) -> None:
        assert_extended_close(j_n(product3), 0, atol=1e-9)

    def test_random_full_rank_differs(self) -> None:
        s = random_mixed([2, 2, 2], seed=42)
        value = j_n(s)
        assert value.is_finite
        assert abs(value.value - dual_total_correlation(s).value) > 1e-3

    def test_regrouped_equals_j(self) -> None:
        s = random_mixed([2, 2, 2], seed=8)
        assert_extended_close(dtc_relent_regrouped(s), j_n(s), atol=1e-7)
        assert dtc_relent_regrouped(ghz(3)) == INFINITY

    def test_cap(self) -> None:
        overrides = DEFAULT_SETTINGS.with_overrides(dim_cap=32)
        with pytest.raises(DimensionCapExceededError):
            j_n(ghz(3), settings=overrides)


class TestJtilde:
    def test_ghz_violates_support(self) -> None:
        assert jtilde_n(ghz(3)) == INFINITY

    def test_product(self) -> None:
        assert_extended_close(jtilde_n(_mixed_product3()), 0, atol=1e-9)

    def test_maximally_mixed(self) -> None:
        assert_extended_close(jtilde_n(maximally_mixed([2, 2, 2])), 0)

    def test_bell(self) -> None:
        assert_extended_close(jtilde_n(ghz(2)), 2, atol=1e-9)

    @given(seeds)
    @settings(max_examples=20, deadline=None)
    def test_two_parties_match(self, seed: int) -> None:
        s = random_mixed([2, 3], seed=seed)
        assert_extended_close(
            jtilde_n(s), dual_total_correlation(s).value, atol=1e-8
        )

    @pytest.mark.parametrize("seed", [42, 7, 1])
    def test_gap_closed_form(self, seed: int) -> None:
        s = random_mixed([2, 2, 2], seed=seed)
        rho_3, rho_1, rho_31 = (
            marginal(s, [3]),
            marginal(s, [1]),
            marginal(s, [3, 1]),
        )
        expected = relative_entropy(tensor(rho_3, rho_1), rho_31) + (
            mutual_information(s, [3], [1])
        )
        gap = jtilde_n(s) - dual_total_correlation(s).value
        assert_extended_close(gap, expected, atol=1e-7)
        assert gap > 1e-3


class TestCrossTerm:
    def test_product(self) -> None:
        s = _mixed_product3()
        expected = von_neumann_entropy(marginal(s, [3])) + (
            von_neumann_entropy(marginal(s, [1]))
        )
        assert_extended_close(cross_term(s, (3, 1)), expected, atol=1e-9)

    def test_ghz(self) -> None:
        assert cross_term(ghz(3), (3, 1)) == INFINITY

    def test_klein(self) -> None:
        s = random_mixed([2, 2, 2], seed=9)
        s_31 = von_neumann_entropy(marginal(s, [3, 1]))
        assert cross_term(s, (3, 1)) >= s_31 - 1e-9

    @pytest.mark.parametrize("pair", [(1, 1), (0, 1), (1, 4)])
    def test_invalid_pair(self, pair: tuple[int, int]) -> None:
        with pytest.raises(InvalidPartySetError):
            cross_term(ghz(3), pair)


@pytest.mark.parametrize(
    "make",
    [
        lambda: ghz(3),
        lambda: w_state(3),
        _mixed_product3,
        lambda: maximally_mixed([2, 2, 2]),
    ],
)
def test_named_states_agree(make: Callable[[], MultipartiteState]) -> None:
    s = make()
    dtc = dual_total_correlation(s).value
    assert dtc >= -1e-8
    assert_extended_close(dtc_relent_sum(s), dtc, atol=1e-7)
    assert_extended_close(dtc_relent_tensor(s), dtc, atol=1e-7)
    assert_extended_close(
        jtilde3_decomposition(s).total, jtilde_n(s), atol=1e-7
    )


@pytest.mark.parametrize("seed", range(100))
def test_random_states_agree(seed: int) -> None:
    s = random_mixed([2, 2, 2], seed=seed)
    dtc = dual_total_correlation(s).value
    assert dtc >= -1e-8
    assert_extended_close(dtc_relent_sum(s), dtc, atol=1e-7)
    assert_extended_close(dtc_relent_tensor(s), dtc, atol=1e-7)
    assert_extended_close(
        jtilde3_decomposition(s).total, jtilde_n(s), atol=1e-7
    )


@pytest.mark.parametrize("seed", range(50))
def test_two_qubit_jtilde_is_dtc(seed: int) -> None:
    s = random_mixed([2, 2], seed=seed)
    assert_extended_close(
        jtilde_n(s), dual_total_correlation(s).value, atol=1e-8
    )


class TestJtilde3Decomposition:
    def test_product(self) -> None:
        s = _mixed_product3()
        terms = jtilde3_decomposition(s)
        s1, s2, s3 = (
            von_neumann_entropy(marginal(s, [k])) for k in (1, 2, 3)
        )
        assert terms.s12 == approx_bits(s1 + s2)
        assert_extended_close(terms.cross_31, s3 + s1, atol=1e-9)
        assert terms.s23 == approx_bits(s2 + s3)
        assert terms.minus_2s == approx_bits(-2 * (s1 + s2 + s3))
        assert_extended_close(terms.total, 0, atol=1e-9)

    def test_ghz(self) -> None:
        assert jtilde3_decomposition(ghz(3)).total == INFINITY

    @pytest.mark.parametrize("seed", [42, 3, 4])
    def test_matches_jtilde(self, seed: int) -> None:
        s = random_mixed([2, 2, 2], seed=seed)
        assert_extended_close(
            jtilde3_decomposition(s).total, jtilde_n(s), atol=1e-7
        )

    def test_wrong_arity(self) -> None:
        with pytest.raises(WrongArityError):
            jtilde3_decomposition(ghz(2))


class TestGapReport:
    def test_ghz(self) -> None:
        report = gap_report(ghz(3))
        assert report.n_parties == 3
        assert report.dims == (2, 2, 2)
        assert_extended_close(report.value("I_n"), 3)
        assert_extended_close(report.value("T_n"), 3)
        assert_extended_close(report.value("relent_sum"), 3, atol=1e-8)
        assert_extended_close(report.value("relent_tensor"), 3, atol=1e-8)
        assert report.value("J_n") == INFINITY
        assert report.value("Jtilde_n") == INFINITY
        assert report.value("regrouped") == INFINITY
        assert report.support_violations == {"J_n": True, "Jtilde_n": True}
        assert set(report.leak_kets["J_n"]) == {"|000111>", "|111000>"}
        assert report.errors == {}

    def test_ghz_gaps(self) -> None:
        gaps = gap_report(ghz(3)).gaps()
        assert gaps["J_n"] == INFINITY
        assert_extended_close(gaps["relent_sum"], 0, atol=1e-8)  # type: ignore

    def test_maximally_mixed(self) -> None:
        report = gap_report(maximally_mixed([2, 2, 2]))
        for value in report.values.values():
            assert_extended_close(value, 0, atol=1e-8)

    def test_random_full_rank(self) -> None:
        report = gap_report(random_mixed([2, 2, 2], seed=42))
        assert all(
            v is not None and v.is_finite for v in report.values.values()
        )
        i_n = report.value("I_n")
        assert i_n is not None
        assert_extended_close(report.value("relent_sum"), i_n, atol=1e-7)
        assert_extended_close(report.value("relent_tensor"), i_n, atol=1e-7)
        gap = report.gaps()["Jtilde_n"]
        assert isinstance(gap, ExtendedReal)
        assert abs(gap.value) > 1e-3
        assert report.support_violations == {
            "J_n": False,
            "Jtilde_n": False,
        }

    def test_timings(self) -> None:
        report = gap_report(ghz(2), ["I_n", "J_n"])
        assert set(report.timings) == {"I_n", "J_n"}
        assert all(t >= 0 for t in report.timings.values())

    def test_errors_are_recorded(self) -> None:
        overrides = DEFAULT_SETTINGS.with_overrides(dim_cap=64)
        report = gap_report(ghz(3), settings=overrides)
        assert report.value("relent_tensor") is None
        error = report.errors["relent_tensor"]
        assert error.startswith("DimensionCapExceededError")
        assert "regrouped" in report.errors
        assert_extended_close(report.value("I_n"), 3)
        assert "relent_tensor" not in report.gaps()

    def test_four_parties(self) -> None:
        s = random_mixed([2, 2, 2, 2], seed=10)
        report = gap_report(s, ["I_n", "relent_sum", "relent_tensor"])
        i_n = report.value("I_n")
        assert i_n is not None
        assert_extended_close(report.value("relent_sum"), i_n, atol=1e-7)
        assert "relent_tensor" in report.errors

    def test_unknown_quantity(self) -> None:
        with pytest.raises(ValueError):
            gap_report(ghz(2), ["nope"])

    def test_undefined_gap(self) -> None:
        report = GapReport(
            3, (2, 2, 2), 2.0, values={"I_n": INFINITY, "J_n": INFINITY}
        )
        assert report.gaps() == {"J_n": UNDEFINED}

    def test_json(self) -> None:
        doc = gap_report(ghz(3)).to_json()
        json.dumps(doc, allow_nan=False)
        assert doc["values"]["J_n"] == {"value": "inf", "infinite": True}
        assert doc["gaps"]["J_n"] == "inf"
        assert doc["base"] == 2.0
        assert doc["leak_kets"]["J_n"]

    def test_nats(self) -> None:
        overrides = DEFAULT_SETTINGS.with_overrides(base=np.e)
        report = gap_report(ghz(2), ["I_n"], settings=overrides)
        assert_extended_close(report.value("I_n"), 2 * np.log(2))
        assert report.to_json()["base"] == "e"
