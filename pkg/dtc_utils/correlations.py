"""Multipartite correlation quantities.

I_n is the dual total correlation Σ_k S(ρ_k̄) - (n-1) S(ρ), where k̄ is
the cyclic complement (k+1, ..., n, 1, ..., k-1) of party k. It has two
valid relative-entropy forms, computed by dtc_relent_sum() and
dtc_relent_tensor(), in which both arguments of every relative entropy
list the same parties in the same positions.

j_n() and jtilde_n() are the literal relative entropies between n-1
copies of ρ and a product of the ρ_k̄, with the product running over
ascending and descending k respectively. They are not equal to I_n for
n ≥ 3; gap_report() puts all of these side by side.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

from .config import Settings, resolve
from .entropy import (
    Divergence,
    cross_log_trace,
    divergence,
    relative_entropy,
    von_neumann_entropy,
)
from .exc import (
    DimensionCapExceededError,
    DtcError,
    InvalidPartySetError,
    OutOfRangeError,
    UndefinedDifferenceError,
    WrongArityError,
)
from .extended import ExtendedReal
from .state import (
    MultipartiteState,
    cyclic_complement,
    marginal,
    permute,
    replicate,
    tensor,
    tensor_all,
)
from .types import Party

logger = logging.getLogger(__name__)

QUANTITIES = (
    "I_n",
    "T_n",
    "relent_sum",
    "relent_tensor",
    "regrouped",
    "J_n",
    "Jtilde_n",
)
GAP_QUANTITIES = QUANTITIES[2:]
UNDEFINED = "undefined"


@dataclass(frozen=True)
class DtcBreakdown:
    """I_n together with the entropies it is made of."""

    marginal_entropies: tuple[tuple[tuple[Party, ...], float], ...]
    global_entropy: float
    value: float

    @property
    def n_parties(self) -> int:
        return len(self.marginal_entropies)


@dataclass(frozen=True)
class Jtilde3Terms:
    """Term-by-term expansion of J̃_3.

    J̃_3 = S(ρ_12) - tr(ρ_3 ⊗ ρ_1 log ρ_31) + S(ρ_23) - 2 S(ρ). The middle
    term is where J̃_3 departs from I_3: it would be S(ρ_31) only if
    ρ_3 ⊗ ρ_1 were ρ_31.
    """

    s12: float
    cross_31: ExtendedReal
    s23: float
    minus_2s: float

    @property
    def total(self) -> ExtendedReal:
        return self.s12 + self.cross_31 + self.s23 + self.minus_2s


@dataclass(frozen=True)
class GapReport:
    """All correlation quantities of one state, with diagnostics.

    values maps quantity names to their values, or None if computing the
    quantity failed; errors then holds "ExceptionName: message".
    """

    n_parties: int
    dims: tuple[int, ...]
    base: float
    values: dict[str, ExtendedReal | None] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    support_violations: dict[str, bool] = field(default_factory=dict)
    borderline: dict[str, bool] = field(default_factory=dict)
    leak_kets: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def value(self, name: str) -> ExtendedReal | None:
        return self.values.get(name)

    def gaps(self) -> dict[str, ExtendedReal | str]:
        """Differences to I_n for every quantity that was computed.

        inf - inf is reported as "undefined", never as a number.
        """
        reference = self.values.get("I_n")
        if reference is None:
            return {}
        gaps: dict[str, ExtendedReal | str] = {}
        for name in GAP_QUANTITIES:
            v = self.values.get(name)
            if v is None:
                continue
            try:
                gaps[name] = v - reference
            except UndefinedDifferenceError:
                gaps[name] = UNDEFINED
        return gaps

    def to_json(self) -> dict[str, Any]:
        return {
            "n_parties": self.n_parties,
            "dims": list(self.dims),
            "base": "e" if self.base == math.e else self.base,
            "values": {
                name: _encode_value(v) for name, v in self.values.items()
            },
            "errors": dict(self.errors),
            "gaps": {
                name: g if isinstance(g, str) else g.to_json()
                for name, g in self.gaps().items()
            },
            "support_violations": dict(self.support_violations),
            "borderline": dict(self.borderline),
            "leak_kets": {k: list(v) for k, v in self.leak_kets.items()},
            "timings": dict(self.timings),
        }


def dual_total_correlation(
    s: MultipartiteState, *, settings: Settings | None = None
) -> DtcBreakdown:
    """I_n(ρ) = Σ_k S(ρ_k̄) - (n-1) S(ρ)."""
    n = _check_parties(s)
    marginals = tuple(
        (
            tuple(keep),
            von_neumann_entropy(marginal(s, keep), settings=settings),
        )
        for keep in (cyclic_complement(k, n) for k in s.positions)
    )
    global_entropy = von_neumann_entropy(s, settings=settings)
    value = sum(e for _, e in marginals) - (n - 1) * global_entropy
    if value < -1e-8:
        logger.warning("negative dual total correlation %.3e", value)
    return DtcBreakdown(marginals, global_entropy, value)


def total_correlation(
    s: MultipartiteState, *, settings: Settings | None = None
) -> ExtendedReal:
    """T_n(ρ) = S(ρ‖ρ_1 ⊗ … ⊗ ρ_n) = Σ_k S(ρ_k) - S(ρ)."""
    _check_parties(s)
    product = _single_marginals(s, settings)
    return relative_entropy(s, product, settings=settings)


def dtc_relent_sum(
    s: MultipartiteState, *, settings: Settings | None = None
) -> ExtendedReal:
    """Σ_k S(ρ_{k k̄}‖ρ_k ⊗ ρ_k̄) - T_n(ρ).

    Each term puts party k first in ρ so that both arguments list the
    parties in the same order.
    """
    n = _check_parties(s)
    terms = [
        relative_entropy(
            permute(s, [k, *cyclic_complement(k, n)]),
            _split_marginals(s, k, settings),
            settings=settings,
        )
        for k in s.positions
    ]
    return sum(terms, ExtendedReal(0.0)) - total_correlation(
        s, settings=settings
    )


def dtc_relent_tensor(
    s: MultipartiteState, *, settings: Settings | None = None
) -> ExtendedReal:
    """S(ρ_{12…n} ⊗ ρ_{23…n1} ⊗ … ‖ ⊗_k (ρ_k ⊗ ρ_k̄)) - T_n(ρ).

    Materializes operators of dimension D^n.
    """
    n = _check_parties(s)
    _check_cap(s.dim**n, settings)
    first = tensor_all(
        (permute(s, [k, *cyclic_complement(k, n)]) for k in s.positions),
        settings=settings,
    )
    second = tensor_all(
        (_split_marginals(s, k, settings) for k in s.positions),
        settings=settings,
    )
    return relative_entropy(first, second, settings=settings) - (
        total_correlation(s, settings=settings)
    )


def dtc_relent_regrouped(
    s: MultipartiteState, *, settings: Settings | None = None
) -> ExtendedReal:
    """S(ρ^{⊗n}‖(⊗_k ρ_k) ⊗ (⊗_k ρ_k̄)) - T_n(ρ), taken literally.

    This regrouping of dtc_relent_tensor() pulls all single-party
    marginals to the front, so the parties of the two arguments no
    longer line up. By additivity it equals j_n(), not I_n.
    """
    n = _check_parties(s)
    _check_cap(s.dim**n, settings)
    first = replicate(s, n, settings=settings)
    second = tensor(
        _single_marginals(s, settings),
        _complement_marginals(s, s.positions, settings),
        settings=settings,
    )
    return relative_entropy(first, second, settings=settings) - (
        total_correlation(s, settings=settings)
    )


def j_n(
    s: MultipartiteState, *, settings: Settings | None = None
) -> ExtendedReal:
    """S(ρ^{⊗(n-1)}‖ρ_1̄ ⊗ ρ_2̄ ⊗ … ⊗ ρ_n̄), positionally.

    For n = 3 this is S(ρ_123 ⊗ ρ_123‖ρ_23 ⊗ ρ_31 ⊗ ρ_12), whose
    arguments do not list the same parties in the same positions.
    """
    tau, sigma = _j_arguments(s, False, settings)
    return relative_entropy(tau, sigma, settings=settings)


def jtilde_n(
    s: MultipartiteState, *, settings: Settings | None = None
) -> ExtendedReal:
    """S(ρ^{⊗(n-1)}‖ρ_n̄ ⊗ … ⊗ ρ_1̄), with the product running from n to 1.

    The descending order makes the parties line up positionally, e.g.
    ρ_12 ⊗ ρ_31 ⊗ ρ_23 against ρ_123 ⊗ ρ_123, but J̃_n still differs from
    I_n for n ≥ 3.
    """
    tau, sigma = _j_arguments(s, True, settings)
    return relative_entropy(tau, sigma, settings=settings)


def cross_term(
    s: MultipartiteState,
    pair: tuple[Party, Party],
    *,
    settings: Settings | None = None,
) -> ExtendedReal:
    """-tr(ρ_i ⊗ ρ_j log ρ_ij) for pair = (i, j)."""
    i, j = pair
    if i == j or not {i, j} <= set(s.positions):
        raise InvalidPartySetError([i, j], s.n_parties)
    product = tensor(marginal(s, [i]), marginal(s, [j]), settings=settings)
    return cross_log_trace(product, marginal(s, [i, j]), settings=settings)


def jtilde3_decomposition(
    s: MultipartiteState, *, settings: Settings | None = None
) -> Jtilde3Terms:
    """Expand J̃_3 into S(ρ_12), the (3, 1) cross term, S(ρ_23) and -2 S(ρ).

    Only marginals are needed, so no large operators are materialized.
    """
    if s.n_parties != 3:
        raise WrongArityError(3, s.n_parties)
    return Jtilde3Terms(
        s12=von_neumann_entropy(marginal(s, [1, 2]), settings=settings),
        cross_31=cross_term(s, (3, 1), settings=settings),
        s23=von_neumann_entropy(marginal(s, [2, 3]), settings=settings),
        minus_2s=-2 * von_neumann_entropy(s, settings=settings),
    )


def gap_report(
    s: MultipartiteState,
    quantities: Iterable[str] = QUANTITIES,
    *,
    settings: Settings | None = None,
) -> GapReport:
    """Compute the requested quantities of s and their gaps to I_n.

    A quantity that fails, for example because its operators exceed the
    dimension cap, is recorded in errors and the others are still
    computed.
    """
    settings = resolve(settings)
    _check_parties(s)
    report = GapReport(s.n_parties, s.dims, settings.base)
    calculators: dict[str, Callable[[], ExtendedReal]] = {
        "I_n": lambda: ExtendedReal.finite(
            dual_total_correlation(s, settings=settings).value
        ),
        "T_n": lambda: total_correlation(s, settings=settings),
        "relent_sum": lambda: dtc_relent_sum(s, settings=settings),
        "relent_tensor": lambda: dtc_relent_tensor(s, settings=settings),
        "regrouped": lambda: dtc_relent_regrouped(s, settings=settings),
        "J_n": lambda: _record_divergence(report, "J_n", s, False, settings),
        "Jtilde_n": lambda: _record_divergence(
            report, "Jtilde_n", s, True, settings
        ),
    }
    for name in quantities:
        if name not in calculators:
            raise ValueError(f"unknown quantity '{name}'")
        started = time.perf_counter()
        try:
            report.values[name] = calculators[name]()
        except DtcError as exc:
            logger.debug("%s failed: %s", name, exc)
            report.values[name] = None
            report.errors[name] = f"{type(exc).__name__}: {exc}"
        report.timings[name] = time.perf_counter() - started
    return report


def _record_divergence(
    report: GapReport,
    name: str,
    s: MultipartiteState,
    descending: bool,
    settings: Settings,
) -> ExtendedReal:
    div: Divergence = divergence(
        *_j_arguments(s, descending, settings), settings=settings
    )
    report.support_violations[name] = div.support_violated
    report.borderline[name] = div.borderline
    if div.support_violated:
        report.leak_kets[name] = div.leak_kets
    return div.value


def _j_arguments(
    s: MultipartiteState, descending: bool, settings: Settings | None
) -> tuple[MultipartiteState, MultipartiteState]:
    n = _check_parties(s)
    _check_cap(s.dim ** (n - 1), settings)
    order = list(reversed(s.positions)) if descending else s.positions
    return (
        replicate(s, n - 1, settings=settings),
        _complement_marginals(s, order, settings),
    )


def _single_marginals(
    s: MultipartiteState, settings: Settings | None
) -> MultipartiteState:
    """ρ_1 ⊗ ρ_2 ⊗ … ⊗ ρ_n."""
    return tensor_all(
        (marginal(s, [k]) for k in s.positions), settings=settings
    )


def _complement_marginals(
    s: MultipartiteState, order: Sequence[Party], settings: Settings | None
) -> MultipartiteState:
    """ρ_k̄ for each k in order, tensored positionally."""
    return tensor_all(
        (marginal(s, cyclic_complement(k, s.n_parties)) for k in order),
        settings=settings,
    )


def _split_marginals(
    s: MultipartiteState, k: Party, settings: Settings | None
) -> MultipartiteState:
    """ρ_k ⊗ ρ_k̄."""
    return tensor(
        marginal(s, [k]),
        marginal(s, cyclic_complement(k, s.n_parties)),
        settings=settings,
    )


def _check_parties(s: MultipartiteState) -> int:
    if s.n_parties < 2:
        raise OutOfRangeError("number of parties", s.n_parties, 2)
    return s.n_parties


def _check_cap(dim: int, settings: Settings | None) -> None:
    cap = resolve(settings).dim_cap
    if dim > cap:
        raise DimensionCapExceededError(dim, cap)


def _encode_value(v: ExtendedReal | None) -> dict[str, Any]:
    if v is None:
        return {"value": None, "infinite": False}
    return {"value": v.to_json(), "infinite": v.is_infinite}
