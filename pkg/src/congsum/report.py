"""Bound reports and the p^{o(1)} surrogate shared by every bound formula."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class O1Convention:
    """Stand-in for an asymptotic p^{o(1)} factor: constant * (log p)^exponent."""

    constant: float = 1.0
    exponent: float = 1.0

    def factor(self, p: float) -> float:
        return self.constant * math.log(p) ** self.exponent

    def label(self) -> str:
        return f"{self.constant:g}*(log p)^{self.exponent:g}"


DEFAULT_O1 = O1Convention()


@dataclass
class BoundReport:
    bound: float
    regime: str
    exact: float | None = None
    ell: int | None = None
    eps: float | None = None
    o1: O1Convention = DEFAULT_O1
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def ratio(self) -> float | None:
        if self.exact is None or self.bound <= 0:
            return None
        return self.exact / self.bound

    def with_exact(self, exact: float) -> "BoundReport":
        self.exact = exact
        return self

    def as_row(self, prefix: str = "") -> dict[str, Any]:
        row = {
            f"{prefix}bound": self.bound,
            f"{prefix}regime": self.regime,
            f"{prefix}ratio": self.ratio,
        }
        for name, val in self.flags.items():
            row[f"{prefix}{name}"] = val
        return row
