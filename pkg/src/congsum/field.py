"""Prime field context: primitive root, discrete-log and inverse tables."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NotPrime, TooSmall, ZeroInverse


def is_prime(n: int) -> bool:
    """Deterministic trial division; fine for the p <= ~1e5 regime."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(p: int) -> int:
    qs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise NotPrime(f"{p} has no primitive root")


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """Immutable evaluation context for F_p.

    ``ind[x]`` is the discrete log of x base ``g`` (``ind[0]`` is a -1 sentinel),
    ``pow_g[j] = g^j mod p`` for j in [0, p-2], ``inv[x]`` is the inverse of x
    (``inv[0] = 0``). ``roots[j] = exp(2 pi i j / (p-1))`` serves character
    evaluation and ``eroots[t] = exp(2 pi i t / p)`` the additive character.
    """

    p: int
    g: int
    ind: np.ndarray = field(repr=False)
    pow_g: np.ndarray = field(repr=False)
    inv: np.ndarray = field(repr=False)
    roots: np.ndarray = field(repr=False)
    eroots: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.p - 1


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@lru_cache(maxsize=64)
def make_field_ctx(p: int) -> FieldCtx:
    if p < 3:
        raise TooSmall(f"p must be >= 3, got {p}")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    g = smallest_primitive_root(p)
    pow_g = np.empty(p - 1, dtype=np.int64)
    x = 1
    for j in range(p - 1):
        pow_g[j] = x
        x = x * g % p
    ind = np.full(p, -1, dtype=np.int64)
    ind[pow_g] = np.arange(p - 1, dtype=np.int64)
    # x^{-1} = g^{-ind x}
    inv = np.zeros(p, dtype=np.int64)
    inv[pow_g] = pow_g[(-np.arange(p - 1)) % (p - 1)]
    roots = np.exp(2j * np.pi * np.arange(p - 1) / (p - 1))
    eroots = np.exp(2j * np.pi * np.arange(p) / p)
    return FieldCtx(
        p=p,
        g=g,
        ind=_readonly(ind),
        pow_g=_readonly(pow_g),
        inv=_readonly(inv),
        roots=_readonly(roots),
        eroots=_readonly(eroots),
    )


def additive_char(ctx: FieldCtx, t: int) -> complex:
    """e_p(t) = exp(2 pi i t / p), with t reduced mod p first."""
    return cmath.exp(2j * math.pi * (t % ctx.p) / ctx.p)


def mod_inverse(ctx: FieldCtx, x: int) -> int:
    x %= ctx.p
    if x == 0:
        raise ZeroInverse("0 has no inverse mod p")
    return int(ctx.inv[x])
