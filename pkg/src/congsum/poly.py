"""Dense polynomials over F_p: Euclidean gcd and the square-free test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEG_ZERO = -math.inf


def _trim(coeffs: Sequence[int], p: int) -> tuple[int, ...]:
    cs = [c % p for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class PolyFp:
    """a_0 + a_1 X + ... + a_d X^d, coefficients low to high, leading one nonzero."""

    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs, self.p))

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else DEG_ZERO

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, a: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * a + c) % self.p
        return acc

    def eval_all(self) -> np.ndarray:
        """Values at a = 0, ..., p-1."""
        a = np.arange(self.p, dtype=np.int64)
        acc = np.zeros(self.p, dtype=np.int64)
        for c in reversed(self.coeffs):
            acc = (acc * a + c) % self.p
        return acc

    def derivative(self) -> "PolyFp":
        return PolyFp(self.p, tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def monic(self) -> "PolyFp":
        if self.is_zero():
            return self
        lead_inv = pow(self.coeffs[-1], -1, self.p)
        return PolyFp(self.p, tuple(c * lead_inv for c in self.coeffs))

    def __mul__(self, other: "PolyFp") -> "PolyFp":
        if self.is_zero() or other.is_zero():
            return PolyFp(self.p, ())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolyFp(self.p, out)

    def __divmod__(self, other: "PolyFp"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        r = list(self.coeffs)
        d = len(other.coeffs) - 1
        lead_inv = pow(other.coeffs[-1], -1, p)
        q = [0] * max(len(r) - d, 0)
        for i in range(len(r) - 1 - d, -1, -1):
            c = r[i + d] * lead_inv % p
            q[i] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    r[i + j] = (r[i + j] - c * b) % p
        return PolyFp(p, q), PolyFp(p, r[:d] if d > 0 else [])

    def __mod__(self, other: "PolyFp") -> "PolyFp":
        return divmod(self, other)[1]


def poly_gcd(f: PolyFp, g: PolyFp) -> PolyFp:
    """Monic gcd (zero if both inputs are zero)."""
    while not g.is_zero():
        f, g = g, f % g
    return f.monic()


def is_square_free(f: PolyFp) -> bool:
    # deg < p everywhere we use this, so f' = 0 only for constants
    if f.is_zero():
        return False
    return poly_gcd(f, f.derivative()).degree == 0


def are_coprime(f: PolyFp, g: PolyFp) -> bool:
    return poly_gcd(f, g).degree == 0
