"""Demonstrations and Monte Carlo surveys of the correlation gaps.

Samples are independent. Sample i of a sweep is drawn from the numpy
SeedSequence with entropy cfg.seed and spawn key (i,), so serial and
parallel runs produce identical records.
"""

from __future__ import annotations

import json
import logging
import math
import multiprocessing
import re
import statistics
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from os import PathLike
from typing import Any, Union

import numpy as np

from .config import DEFAULT_SETTINGS, Settings
from .constructors import (
    ghz,
    maximally_mixed,
    product_state,
    random_channel,
    random_mixed,
    random_pure,
    w_state,
)
from .correlations import (
    QUANTITIES,
    GapReport,
    cross_term,
    dual_total_correlation,
    dtc_relent_regrouped,
    dtc_relent_sum,
    dtc_relent_tensor,
    gap_report,
    j_n,
    jtilde_n,
    total_correlation,
)
from .exc import ConfigError, UnknownDemoError
from .extended import ExtendedReal
from .state import MultipartiteState, apply_local_channel, make_state

logger = logging.getLogger(__name__)

DEMOS = ("ghz", "product", "bell", "mixed", "w", "maximally-mixed")
COMPUTE_QUANTITIES = (
    "I",
    "T",
    "relent_sum",
    "relent_tensor",
    "regrouped",
    "J",
    "Jtilde",
    "cross:i,j",
    "report",
)
EQUIVALENCE_TOL = 1e-7
MONOTONICITY_SLACK = 1e-7
MIXED_DEMO_SEED = 42

_RANK_ENSEMBLE_RE = re.compile(r"^rank-([1-9][0-9]*)$")
_CROSS_RE = re.compile(r"^cross:([1-9][0-9]*),([1-9][0-9]*)$")


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of a Monte Carlo survey over a random ensemble.

    ensemble is "pure", "full-rank", or "rank-<r>". Tolerances, the
    dimension cap and the logarithm base are taken from settings.
    """

    n_parties: int = 3
    local_dims: tuple[int, ...] = (2, 2, 2)
    ensemble: str = "full-rank"
    samples: int = 100
    seed: int = 0
    settings: Settings = DEFAULT_SETTINGS
    quantities: tuple[str, ...] = QUANTITIES

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ConfigError(
                f"samples must be at least 1, not {self.samples}"
            )
        if self.n_parties < 2:
            raise ConfigError("a sweep needs at least two parties")
        if len(self.local_dims) != self.n_parties:
            raise ConfigError(
                f"{len(self.local_dims)} local dims given "
                f"for {self.n_parties} parties"
            )
        if any(d < 1 for d in self.local_dims):
            raise ConfigError(f"invalid local dims {list(self.local_dims)}")
        if self.dim > self.settings.dim_cap:
            raise ConfigError(
                f"state dimension {self.dim} exceeds the cap of "
                f"{self.settings.dim_cap}"
            )
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        unknown = set(self.quantities) - set(QUANTITIES)
        if unknown:
            raise ConfigError(f"unknown quantities {sorted(unknown)}")
        self.rank  # validates the ensemble name

    @property
    def dim(self) -> int:
        return math.prod(self.local_dims)

    @property
    def rank(self) -> int | None:
        """Rank of the sampled states; None means full rank."""
        if self.ensemble == "pure":
            return 1
        elif self.ensemble == "full-rank":
            return None
        m = _RANK_ENSEMBLE_RE.match(self.ensemble)
        if not m or int(m.group(1)) > self.dim:
            raise ConfigError(f"invalid ensemble '{self.ensemble}'")
        return int(m.group(1))

    def to_json(self) -> dict[str, Any]:
        tol = self.settings.tolerances
        return {
            "n_parties": self.n_parties,
            "local_dims": list(self.local_dims),
            "ensemble": self.ensemble,
            "samples": self.samples,
            "seed": self.seed,
            "base": _encode_base(self.settings.base),
            "dim_cap": self.settings.dim_cap,
            "thresholds": {
                "support": tol.support,
                "containment": tol.containment,
                "gap": tol.gap,
            },
            "quantities": list(self.quantities),
        }


@dataclass(frozen=True)
class ReportRecord:
    """One evaluated state: its gap report plus provenance."""

    name: str
    report: GapReport
    sample: int | None = None
    seed: int | None = None

    def to_json(self) -> dict[str, Any]:
        doc = {"name": self.name, "sample": self.sample, "seed": self.seed}
        doc.update(self.report.to_json())
        doc["borderline_support"] = any(self.report.borderline.values())
        return doc


@dataclass(frozen=True)
class SweepSummary:
    samples: int
    gap_threshold: float
    jtilde_flagged: int
    jtilde_inconclusive: int
    jtilde_gap_min: float | None
    jtilde_gap_max: float | None
    jtilde_gap_mean: float | None
    jtilde_gap_signs: dict[str, int]
    j_support_violations: int
    jtilde_support_violations: int
    borderline_records: int
    triple_disagreements: int
    records_with_errors: int

    @property
    def jtilde_flagged_fraction(self) -> float:
        return self.jtilde_flagged / self.samples

    def to_json(self) -> dict[str, Any]:
        doc = asdict(self)
        doc["jtilde_flagged_fraction"] = self.jtilde_flagged_fraction
        return doc


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    records: list[ReportRecord]
    summary: SweepSummary


@dataclass(frozen=True)
class MonotonicityRecord:
    sample: int
    party: int
    before: float
    after: float

    @property
    def increase(self) -> float:
        return self.after - self.before

    @property
    def violated(self) -> bool:
        return self.increase > MONOTONICITY_SLACK


@dataclass(frozen=True)
class MonotonicityResult:
    config: SweepConfig
    records: list[MonotonicityRecord] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(r.violated for r in self.records)

    @property
    def max_increase(self) -> float:
        return max(r.increase for r in self.records)


def demo_state(name: str) -> MultipartiteState:
    """The state behind a named demonstration."""
    if name == "ghz":
        return ghz(3)
    elif name == "w":
        return w_state(3)
    elif name == "product":
        qubit = make_state([[0.7, 0.2], [0.2, 0.3]], [2])
        return product_state([qubit, qubit, qubit])
    elif name == "bell":
        return ghz(2)
    elif name == "mixed":
        return random_mixed([2, 2, 2], seed=MIXED_DEMO_SEED)
    elif name == "maximally-mixed":
        return maximally_mixed([2, 2, 2])
    raise UnknownDemoError(name, DEMOS)


def demo(name: str, *, settings: Settings | None = None) -> ReportRecord:
    """Evaluate all quantities on a named witness state."""
    s = demo_state(name)
    return ReportRecord(name, gap_report(s, settings=settings))


def sample_state(cfg: SweepConfig, index: int) -> MultipartiteState:
    seq = np.random.SeedSequence(cfg.seed, spawn_key=(index,))
    if cfg.rank == 1:
        return random_pure(cfg.local_dims, seq)
    return random_mixed(cfg.local_dims, cfg.rank, seed=seq)


def evaluate_sample(cfg: SweepConfig, index: int) -> ReportRecord:
    s = sample_state(cfg, index)
    report = gap_report(s, cfg.quantities, settings=cfg.settings)
    logger.debug("sample %d: %s", index, report.values)
    return ReportRecord(cfg.ensemble, report, sample=index, seed=cfg.seed)


def sweep(cfg: SweepConfig, *, workers: int = 1) -> SweepResult:
    """Evaluate cfg.samples random states; records come in sample order."""
    logger.info(
        "sweeping %d %s states on dims %s (seed %d)",
        cfg.samples,
        cfg.ensemble,
        list(cfg.local_dims),
        cfg.seed,
    )
    evaluate = partial(evaluate_sample, cfg)
    if workers > 1:
        context = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(workers, mp_context=context) as pool:
            records = list(pool.map(evaluate, range(cfg.samples)))
    else:
        records = [evaluate(i) for i in range(cfg.samples)]
    return SweepResult(cfg, records, summarize(records, cfg))


def summarize(
    records: Sequence[ReportRecord], cfg: SweepConfig | None = None
) -> SweepSummary:
    """Aggregate J̃_n gaps, support violations and consistency checks."""
    settings = cfg.settings if cfg is not None else DEFAULT_SETTINGS
    threshold = settings.tolerances.gap
    flagged = inconclusive = 0
    finite_gaps: list[float] = []
    signs = {"positive": 0, "negative": 0, "zero": 0}
    for record in records:
        gap = record.report.gaps().get("Jtilde_n")
        if not isinstance(gap, ExtendedReal):
            continue
        if gap.is_infinite or abs(gap.value) > threshold:
            flagged += 1
        else:
            inconclusive += 1
        if gap.is_finite:
            finite_gaps.append(gap.value)
        if gap > threshold:
            signs["positive"] += 1
        elif gap < -threshold:
            signs["negative"] += 1
        else:
            signs["zero"] += 1

    def violations(name: str) -> int:
        return sum(
            r.report.support_violations.get(name, False) for r in records
        )

    return SweepSummary(
        samples=len(records),
        gap_threshold=threshold,
        jtilde_flagged=flagged,
        jtilde_inconclusive=inconclusive,
        jtilde_gap_min=min(finite_gaps) if finite_gaps else None,
        jtilde_gap_max=max(finite_gaps) if finite_gaps else None,
        jtilde_gap_mean=(
            statistics.fmean(finite_gaps) if finite_gaps else None
        ),
        jtilde_gap_signs=signs,
        j_support_violations=violations("J_n"),
        jtilde_support_violations=violations("Jtilde_n"),
        borderline_records=sum(
            any(r.report.borderline.values()) for r in records
        ),
        triple_disagreements=sum(
            not _triple_agrees(r.report) for r in records
        ),
        records_with_errors=sum(bool(r.report.errors) for r in records),
    )


def monotonicity_survey(
    cfg: SweepConfig, *, n_kraus: int = 2
) -> MonotonicityResult:
    """Apply a random channel to a random party of each sample.

    Records I_n before and after; a record is a violation if I_n grew by
    more than MONOTONICITY_SLACK.
    """
    settings = cfg.settings
    result = MonotonicityResult(cfg)
    for index in range(cfg.samples):
        s = sample_state(cfg, index)
        seq = np.random.SeedSequence(cfg.seed, spawn_key=(index, 1))
        party_seq, channel_seq = seq.spawn(2)
        rng = np.random.default_rng(party_seq)
        party = int(rng.integers(1, s.n_parties + 1))
        channel = random_channel(s.dims[party - 1], n_kraus, channel_seq)
        after = apply_local_channel(s, party, channel, settings=settings)
        record = MonotonicityRecord(
            index,
            party,
            dual_total_correlation(s, settings=settings).value,
            dual_total_correlation(after, settings=settings).value,
        )
        if record.violated:
            logger.warning(
                "I_n increased by %.3e on sample %d", record.increase, index
            )
        result.records.append(record)
    return result


def compute_quantity(
    s: MultipartiteState, quantity: str, *, settings: Settings | None = None
) -> ExtendedReal | GapReport:
    """Evaluate one quantity by its command-line name.

    "cross:i,j" selects the cross term of parties i and j; "report"
    returns the full gap report.
    """
    if quantity == "I":
        return ExtendedReal.finite(
            dual_total_correlation(s, settings=settings).value
        )
    elif quantity == "T":
        return total_correlation(s, settings=settings)
    elif quantity == "relent_sum":
        return dtc_relent_sum(s, settings=settings)
    elif quantity == "relent_tensor":
        return dtc_relent_tensor(s, settings=settings)
    elif quantity == "regrouped":
        return dtc_relent_regrouped(s, settings=settings)
    elif quantity == "J":
        return j_n(s, settings=settings)
    elif quantity == "Jtilde":
        return jtilde_n(s, settings=settings)
    elif quantity == "report":
        return gap_report(s, settings=settings)
    m = _CROSS_RE.match(quantity)
    if m:
        pair = (int(m.group(1)), int(m.group(2)))
        return cross_term(s, pair, settings=settings)
    raise ValueError(
        f"unknown quantity '{quantity}', "
        f"choose one of {', '.join(COMPUTE_QUANTITIES)}"
    )


def format_value(value: ExtendedReal | None, unit: str) -> str:
    if value is None:
        return "error"
    elif value.is_infinite:
        return "inf (support violation)"
    return f"{value.value:.9f} {unit}"


def format_report(record: ReportRecord, settings: Settings) -> str:
    """Human-readable rendering of a record, one quantity per line."""
    report = record.report
    lines = [
        f"{record.name}: {report.n_parties} parties, dims {list(report.dims)}"
    ]
    for name, value in report.values.items():
        line = f"  {name:<14} {format_value(value, settings.unit)}"
        if name in report.errors:
            line += f"  [{report.errors[name]}]"
        elif report.borderline.get(name):
            line += "  [borderline support]"
        lines.append(line)
        kets = report.leak_kets.get(name)
        if kets:
            lines.append(f"  {'':<14} leaking kets: {', '.join(kets)}")
    gaps = report.gaps()
    if gaps:
        lines.append("  gaps to I_n:")
        for name, gap in gaps.items():
            text = gap if isinstance(gap, str) else str(gap)
            lines.append(f"    {name:<14} {text}")
    return "\n".join(lines)


def strip_timings(doc: dict[str, Any]) -> dict[str, Any]:
    """Copy of a record document without wall-clock fields."""
    return {k: v for k, v in doc.items() if k != "timings"}


def record_lines(
    records: Iterable[ReportRecord],
    summary: SweepSummary | None = None,
    *,
    include_timings: bool = True,
) -> list[str]:
    """JSON-lines encoding: one record per line, then the summary."""
    lines = []
    for record in records:
        doc = record.to_json()
        if not include_timings:
            doc = strip_timings(doc)
        lines.append(json.dumps(doc, sort_keys=True))
    if summary is not None:
        lines.append(
            json.dumps({"summary": summary.to_json()}, sort_keys=True)
        )
    return lines


def write_jsonl(
    records: Iterable[ReportRecord],
    summary: SweepSummary | None,
    path: PathLike[str] | str,
    *,
    include_timings: bool = True,
) -> None:
    with open(path, "w") as f:
        for line in record_lines(
            records, summary, include_timings=include_timings
        ):
            f.write(line + "\n")


def _triple_agrees(report: GapReport) -> bool:
    reference = report.values.get("I_n")
    if reference is None:
        return True
    for name in ("relent_sum", "relent_tensor"):
        v = report.values.get(name)
        if v is None:
            continue
        if v.is_infinite or abs(v.value - reference.value) > EQUIVALENCE_TOL:
            return False
    return True


def _encode_base(base: float) -> Union[float, str]:
    return "e" if base == math.e else base
