"""Persistent storage of sweep runs.

>>> with ReportStore("sqlite:///runs.sqlite") as store:
...     run_id = store.save_sweep(cfg, records, summary)
...     runs = store.list_runs()
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from datetime import datetime, timezone
from types import TracebackType
from typing import Any, Optional, TypeVar

from sqlalchemy import (
    DateTime,
    Float,
    ForeignKey,
    Integer,
    String,
    Text,
    create_engine,
    delete,
    func,
    select,
)
from sqlalchemy.orm import (
    DeclarativeBase,
    Mapped,
    Session,
    mapped_column,
    relationship,
    sessionmaker,
)
from sqlalchemy.sql import Select

from .correlations import GapReport
from .exc import UnknownRunError
from .extended import ExtendedReal
from .lab import ReportRecord, SweepConfig, SweepSummary

logger = logging.getLogger(__name__)

_DB = TypeVar("_DB", bound="DBObjectBase")

DEFAULT_URL = "sqlite:///dtc-runs.sqlite"


class Base(DeclarativeBase):
    pass


class DBObjectBase(Base):
    """Base class for mapped classes with a numeric "id" primary key."""

    __abstract__ = True

    id: Mapped[int] = mapped_column(Integer, primary_key=True)

    @classmethod
    def item_type(cls) -> str:
        """Name of the kind of items this represents, used in exceptions."""
        return str(cls.__tablename__)

    @classmethod
    def query(
        cls: type[_DB], *conditions: Any, order_by: Any | None = None
    ) -> Select[tuple[_DB]]:
        stmt = select(cls).where(*conditions)
        if order_by is not None:
            stmt = stmt.order_by(order_by)
        return stmt

    @classmethod
    def count(cls, session: Session, *conditions: Any) -> int:
        """Return number of entries matching the conditions, or all."""
        stmt = select(func.count()).select_from(cls).where(*conditions)
        return int(session.scalar(stmt) or 0)

    @classmethod
    def fetch_all(
        cls: type[_DB],
        session: Session,
        *conditions: Any,
        order_by: Any | None = None,
    ) -> list[_DB]:
        stmt = cls.query(*conditions, order_by=order_by)
        return list(session.scalars(stmt))

    @classmethod
    def fetch_one(
        cls: type[_DB],
        session: Session,
        *conditions: Any,
        order_by: Any | None = None,
        field: str | None = None,
        value: Any = None,
    ) -> _DB:
        """Return a single entry from the database.

        If there are no matching entries, raise an UnknownRunError. If
        there are several, return the first according to order_by.
        """
        stmt = cls.query(*conditions, order_by=order_by)
        o = session.scalars(stmt).first()
        if o is None:
            raise UnknownRunError(cls.item_type(), field, value)
        return o

    @classmethod
    def fetch_by_id(cls: type[_DB], session: Session, id: int) -> _DB:
        return cls.fetch_one(session, cls.id == id, field="id", value=id)

    @classmethod
    def delete_all(cls, session: Session, *conditions: Any) -> None:
        """Delete all entries that match the conditions, or all entries."""
        session.execute(delete(cls).where(*conditions))

    @classmethod
    def delete_by_id(
        cls, session: Session, id: int, *, check_existence: bool = True
    ) -> None:
        """Delete the entry with the given id.

        Raise UnknownRunError if no entry with this id exists.
        """
        if check_existence:
            cls.fetch_by_id(session, id)
        session.execute(delete(cls).where(cls.id == id))


class DBSweepRun(DBObjectBase):
    __tablename__ = "sweep_runs"

    created: Mapped[datetime] = mapped_column(DateTime, nullable=False)
    n_parties: Mapped[int] = mapped_column(Integer, nullable=False)
    dims: Mapped[str] = mapped_column(String(200), nullable=False)
    ensemble: Mapped[str] = mapped_column(String(50), nullable=False)
    samples: Mapped[int] = mapped_column(Integer, nullable=False)
    seed: Mapped[int] = mapped_column(Integer, nullable=False)
    base: Mapped[float] = mapped_column(Float, nullable=False)
    config_json: Mapped[str] = mapped_column(Text, nullable=False)
    summary_json: Mapped[str] = mapped_column(Text, nullable=False)

    records: Mapped[list[DBSampleRecord]] = relationship(
        back_populates="run",
        cascade="all, delete-orphan",
        passive_deletes=True,
        order_by="DBSampleRecord.sample_index",
    )

    @classmethod
    def item_type(cls) -> str:
        return "sweep run"


class DBSampleRecord(DBObjectBase):
    __tablename__ = "sample_records"

    run_id: Mapped[int] = mapped_column(
        ForeignKey("sweep_runs.id", ondelete="CASCADE"), nullable=False
    )
    sample_index: Mapped[int] = mapped_column(Integer, nullable=False)
    dtc: Mapped[Optional[float]] = mapped_column(Float)
    # NULL unless J̃_n - I_n is a finite number
    jtilde_gap: Mapped[Optional[float]] = mapped_column(Float)
    j_infinite: Mapped[bool] = mapped_column(nullable=False, default=False)
    record_json: Mapped[str] = mapped_column(Text, nullable=False)

    run: Mapped[DBSweepRun] = relationship(back_populates="records")

    @classmethod
    def from_record(cls, record: ReportRecord) -> DBSampleRecord:
        report = record.report
        dtc = report.value("I_n")
        gap = report.gaps().get("Jtilde_n")
        j = report.value("J_n")
        return cls(
            sample_index=record.sample if record.sample is not None else 0,
            dtc=dtc.value if dtc is not None else None,
            jtilde_gap=(
                gap.value
                if isinstance(gap, ExtendedReal) and gap.is_finite
                else None
            ),
            j_infinite=j is not None and j.is_infinite,
            record_json=json.dumps(record.to_json(), sort_keys=True),
        )


@dataclass(frozen=True)
class StoredRun:
    id: int
    created: datetime
    n_parties: int
    dims: tuple[int, ...]
    ensemble: str
    samples: int
    seed: int
    base: float

    @classmethod
    def from_db(cls, run: DBSweepRun) -> StoredRun:
        return cls(
            run.id,
            run.created,
            run.n_parties,
            tuple(int(d) for d in run.dims.split(",")),
            run.ensemble,
            run.samples,
            run.seed,
            run.base,
        )


@dataclass(frozen=True)
class StoredSweep:
    run: StoredRun
    config: dict[str, Any]
    summary: dict[str, Any]
    records: list[dict[str, Any]]


class ReportStore:
    """Database of sweep runs.

    Must be used as context manager. Changes are committed when the
    context is left normally and rolled back on an exception. Leaving
    the context also releases all database connections, which discards
    in-memory SQLite databases.
    """

    def __init__(self, url: str = DEFAULT_URL) -> None:
        self.url = url
        self.engine = create_engine(url)
        Base.metadata.create_all(self.engine)
        self._session_maker = sessionmaker(bind=self.engine)
        self._session: Session | None = None

    def __enter__(self) -> ReportStore:
        if self._session is not None:
            raise RuntimeError("store already entered")
        self._session = self._session_maker()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: TracebackType | None,
    ) -> None:
        if self._session is None:
            raise RuntimeError("not in a store context")
        if self._session.is_active:
            if exc_type:
                self._session.rollback()
            else:
                self._session.commit()
        self._session.close()
        self._session = None
        self.engine.dispose()

    @property
    def session(self) -> Session:
        if self._session is None:
            raise RuntimeError("not in a store context")
        return self._session

    def save_sweep(
        self,
        cfg: SweepConfig,
        records: Sequence[ReportRecord],
        summary: SweepSummary,
    ) -> int:
        """Add a sweep run with all its records and return its id."""
        run = DBSweepRun(
            created=datetime.now(timezone.utc),
            n_parties=cfg.n_parties,
            dims=",".join(str(d) for d in cfg.local_dims),
            ensemble=cfg.ensemble,
            samples=cfg.samples,
            seed=cfg.seed,
            base=cfg.settings.base,
            config_json=json.dumps(cfg.to_json(), sort_keys=True),
            summary_json=json.dumps(summary.to_json(), sort_keys=True),
            records=[DBSampleRecord.from_record(r) for r in records],
        )
        self.session.add(run)
        self.session.flush()
        logger.info("saved sweep run %d (%d records)", run.id, len(records))
        return run.id

    def load_sweep(self, run_id: int) -> StoredSweep:
        run = DBSweepRun.fetch_by_id(self.session, run_id)
        return StoredSweep(
            StoredRun.from_db(run),
            json.loads(run.config_json),
            json.loads(run.summary_json),
            [json.loads(r.record_json) for r in run.records],
        )

    def list_runs(self) -> list[StoredRun]:
        runs = DBSweepRun.fetch_all(self.session, order_by=DBSweepRun.id)
        return [StoredRun.from_db(r) for r in runs]

    def delete_run(self, run_id: int) -> None:
        DBSweepRun.fetch_by_id(self.session, run_id)
        DBSampleRecord.delete_all(
            self.session, DBSampleRecord.run_id == run_id
        )
        DBSweepRun.delete_by_id(self.session, run_id, check_existence=False)


def report_from_json(doc: dict[str, Any]) -> GapReport:
    """Rebuild the values of a stored record as a GapReport."""
    values = {
        name: (
            None if v["value"] is None else ExtendedReal.from_json(v["value"])
        )
        for name, v in doc["values"].items()
    }
    return GapReport(
        doc["n_parties"],
        tuple(doc["dims"]),
        _decode_base(doc["base"]),
        values,
        dict(doc["errors"]),
        dict(doc.get("timings", {})),
        dict(doc["support_violations"]),
        dict(doc["borderline"]),
        {k: tuple(v) for k, v in doc["leak_kets"].items()},
    )


def _decode_base(base: float | str) -> float:
    return math.e if base == "e" else float(base)
