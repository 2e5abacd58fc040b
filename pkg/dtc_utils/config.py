from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any


@dataclass(frozen=True)
class Tolerances:
    """Numerical slack for validation, support and gap decisions.

    herm is relative to the max-norm of the matrix; trace, psd and cptp
    are absolute. support is relative to the largest eigenvalue.
    """

    herm: float = 1e-10
    trace: float = 1e-10
    psd: float = 1e-10
    cptp: float = 1e-10
    support: float = 1e-9
    containment: float = 1e-7
    gap: float = 1e-3
    borderline_factor: float = 10.0


@dataclass(frozen=True)
class Settings:
    tolerances: Tolerances = field(default_factory=Tolerances)
    dim_cap: int = 4096
    base: float = 2.0

    @property
    def unit(self) -> str:
        if self.base == 2.0:
            return "bits"
        elif self.base == math.e:
            return "nats"
        else:
            return f"log{self.base:g} units"

    @property
    def log_base(self) -> float:
        """Natural logarithm of the base, the divisor for all entropies."""
        return math.log(self.base)

    def with_overrides(self, **overrides: Any) -> Settings:
        """Return a copy with some fields replaced.

        Tolerance fields may be given directly by name, e.g.
        with_overrides(support=1e-8, dim_cap=512).
        """
        tolerance_names = Tolerances.__dataclass_fields__.keys()
        tol = {k: v for k, v in overrides.items() if k in tolerance_names}
        rest = {k: v for k, v in overrides.items() if k not in tol}
        return replace(
            self, tolerances=replace(self.tolerances, **tol), **rest
        )


DEFAULT_SETTINGS = Settings()


def resolve(settings: Settings | None) -> Settings:
    return DEFAULT_SETTINGS if settings is None else settings
