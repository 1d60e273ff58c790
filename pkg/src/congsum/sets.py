"""Finite subsets of F_p^* and seeded generators for experiment inputs."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable

import numpy as np

from .errors import BadInterval, TooLarge
from .field import FieldCtx


@dataclass(frozen=True)
class MSet:
    """Sorted set of distinct residues in [1, p-1]."""

    p: int
    elements: tuple[int, ...]

    def __post_init__(self):
        els = self.elements
        if any(b <= a for a, b in zip(els, els[1:])):
            raise ValueError("MSet elements must be strictly increasing")
        if els and (els[0] < 1 or els[-1] > self.p - 1):
            raise ValueError(f"MSet elements must lie in [1, {self.p - 1}]")

    @classmethod
    def of(cls, p: int, elements: Iterable[int]) -> "MSet":
        els = sorted({int(e) for e in elements})
        return cls(p, tuple(els))

    @property
    def M(self) -> int:
        return len(self.elements)

    @property
    def Mplus(self) -> int:
        return self.elements[-1] if self.elements else 0

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.elements, dtype=np.int64)

    def scaled(self, c: int) -> "MSet":
        return MSet.of(self.p, (c * m % self.p for m in self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


FAMILIES = ("interval", "random", "quadratic_residues", "geometric")


def make_set(ctx: FieldCtx, family: str, seed: int | None = None, **params) -> MSet:
    """Build an MSet from one of the named families.

    interval: ``start`` (default 1), ``length``; random: ``size``;
    quadratic_residues: no parameters; geometric: ``step`` d and optional ``size``
    (default: the whole orbit of g^d).
    """
    p = ctx.p
    if family == "interval":
        start = int(params.get("start", 1))
        length = int(params.get("length", params.get("size", 0)))
        if length > p - 1:
            raise TooLarge(f"interval of length {length} exceeds p-1={p - 1}")
        if length < 1 or start < 1 or start + length - 1 > p - 1:
            raise BadInterval(f"interval [{start}, {start + length - 1}] not inside [1, {p - 1}]")
        return MSet(p, tuple(range(start, start + length)))
    if family == "random":
        size = int(params["size"])
        if size > p - 1:
            raise TooLarge(f"cannot draw {size} distinct units mod {p}")
        rng = np.random.default_rng(seed)
        picks = rng.choice(p - 1, size=size, replace=False) + 1
        return MSet.of(p, picks.tolist())
    if family == "quadratic_residues":
        return MSet.of(p, (x * x % p for x in range(1, p)))
    if family == "geometric":
        d = int(params.get("step", 1))
        orbit = (p - 1) // gcd(d, p - 1)
        size = int(params.get("size", orbit))
        if size > orbit:
            raise TooLarge(f"geometric orbit of g^{d} has only {orbit} elements")
        return MSet.of(p, (int(ctx.pow_g[(j * d) % (p - 1)]) for j in range(size)))
    raise ValueError(f"unknown set family {family!r}")
