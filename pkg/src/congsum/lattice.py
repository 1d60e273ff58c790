"""The congruence lattice {(x, y) : xm = yn mod p} and its reduced bases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .congruence import JQuery, j_count_fast
from .errors import BadInterval
from .field import FieldCtx, mod_inverse
from .sets import MSet

Vec = tuple[int, int]


def _dot(u: Vec, v: Vec) -> int:
    return u[0] * v[0] + u[1] * v[1]


def _norm2(u: Vec) -> int:
    return u[0] * u[0] + u[1] * u[1]


def _canon(u: Vec) -> Vec:
    """Flip sign so the first nonzero coordinate is positive."""
    if u[0] < 0 or (u[0] == 0 and u[1] < 0):
        return (-u[0], -u[1])
    return u


def _round_div(a: int, b: int) -> int:
    """Nearest integer to a/b (b > 0), halves rounded toward zero."""
    q, r = divmod(a, b)
    if 2 * r > b or (2 * r == b and q < 0):
        q += 1
    return q


def gauss_reduce(u: Vec, v: Vec) -> tuple[Vec, Vec]:
    """Lagrange-Gauss reduction in exact integer arithmetic."""
    if _norm2(u) > _norm2(v):
        u, v = v, u
    while True:
        mu = _round_div(_dot(u, v), _norm2(u))
        v = (v[0] - mu * u[0], v[1] - mu * u[1])
        if _norm2(v) >= _norm2(u):
            return u, v
        u, v = v, u


@dataclass(frozen=True)
class LatticeBasis:
    p: int
    m: int
    n: int
    e: Vec
    f: Vec

    @property
    def ratio(self) -> int:
        """n/m mod p; the lattice is {(x, y) : x = ratio*y mod p}."""
        return self.n * pow(self.m, -1, self.p) % self.p

    def contains(self, u: Vec) -> bool:
        return (u[0] * self.m - u[1] * self.n) % self.p == 0

    @property
    def det(self) -> int:
        return self.e[0] * self.f[1] - self.e[1] * self.f[0]

    @property
    def e_norm2(self) -> int:
        return _norm2(self.e)

    @property
    def f_norm2(self) -> int:
        return _norm2(self.f)

    def is_gauss_reduced(self) -> bool:
        return self.e_norm2 <= self.f_norm2 and 2 * abs(_dot(self.e, self.f)) <= self.e_norm2

    def coords(self, u: Vec) -> tuple[int, int]:
        """Integer (a, b) with u = a*e + b*f."""
        d = self.det
        a, ra = divmod(u[0] * self.f[1] - u[1] * self.f[0], d)
        b, rb = divmod(self.e[0] * u[1] - self.e[1] * u[0], d)
        if ra or rb:
            raise ValueError(f"{u} is not in the lattice")
        return a, b


def lattice_basis(ctx: FieldCtx, m: int, n: int) -> LatticeBasis:
    """Gauss-reduced basis (e, f), e shortest, with a reproducible choice among ties."""
    p = ctx.p
    m %= p
    n %= p
    r = n * mod_inverse(ctx, m) % p
    e, f = gauss_reduce((r, 1), (p, 0))
    # shortest vectors of a reduced basis lie among +-e, +-f, +-(e+f), +-(e-f)
    short = _norm2(e)
    cands = [e, f, (e[0] + f[0], e[1] + f[1]), (e[0] - f[0], e[1] - f[1])]
    e = min(_canon(c) for c in cands if _norm2(c) == short)
    # completing vector: any g with |det(e, g)| = p, size-reduced against e
    a, b = e
    for g in (f, (f[0] + e[0], f[1] + e[1]), (f[0] - e[0], f[1] - e[1])):
        if abs(a * g[1] - b * g[0]) == p:
            break
    else:
        g = next(c for c in cands if abs(a * c[1] - b * c[0]) == p)
    mu = _round_div(_dot(e, g), short)
    g = (g[0] - mu * e[0], g[1] - mu * e[1])
    # among +-g, g -+ e of equal length prefer the lexicographically smallest
    alts = [g]
    for s in (1, -1):
        h = (g[0] + s * e[0], g[1] + s * e[1])
        if _norm2(h) == _norm2(g):
            alts.append(h)
    f = min(_canon(c) for c in alts)
    return LatticeBasis(p, m, n, e, f)


def short_vectors(ctx: FieldCtx, m: int, n: int, bound: int) -> Iterator[Vec]:
    """Every nonzero lattice vector with |x|, |y| <= bound, by direct scan over y."""
    p = ctx.p
    r = n * mod_inverse(ctx, m) % p
    for y in range(-bound, bound + 1):
        x0 = (r * y) % p
        # all x = x0 mod p in [-bound, bound]
        x = x0 - ((x0 + bound) // p) * p
        while x <= bound:
            if x >= -bound and (x, y) != (0, 0):
                yield (x, y)
            x += p


def shortest_norm2_exhaustive(ctx: FieldCtx, m: int, n: int) -> int:
    """Minimum squared length over the box |x|, |y| <= p (contains (p, 0))."""
    p = ctx.p
    r = n * mod_inverse(ctx, m) % p
    ys = np.arange(-p, p + 1, dtype=np.int64)
    x0 = (r * ys) % p
    # per y the two candidates nearest 0 are x0 and x0 - p
    best = np.minimum(x0 * x0, (x0 - p) ** 2) + ys * ys
    best[p] = p * p  # y = 0: nonzero vectors are (+-p, 0) and beyond
    return int(best.min())


def coefficient_constant(basis: LatticeBasis, u: Vec) -> float:
    """max(|a| |e|, |b| |f|) / |u| for u = a e + b f."""
    a, b = basis.coords(u)
    num = max(a * a * basis.e_norm2, b * b * basis.f_norm2)
    return float(np.sqrt(num / _norm2(u)))


def count_box(ctx: FieldCtx, m: int, n: int, H: int, A: int = 0) -> int:
    """#{(x, y) in [A+1, A+H]^2 : xm = yn mod p}, O(H)."""
    p = ctx.p
    if not 1 <= H < p:
        raise BadInterval(f"H={H} not in [1, {p})")
    ratio = m * mod_inverse(ctx, n) % p
    xs = np.arange(A + 1, A + H + 1, dtype=np.int64)
    ys = (xs % p) * ratio % p
    # y is determined mod p; count its representatives in the window
    lo, hi = A + 1, A + H
    first = ys + ((lo - ys + p - 1) // p) * p
    return int(np.where(first <= hi, (hi - first) // p + 1, 0).sum())


def htok_constant(ctx: FieldCtx, H: int, K: int, mset: MSet) -> tuple[tuple[int, int], float]:
    """Exact (J(H), J(K)) and |K J(H) - H J(K)| / ((H+K)(HK/p + 1) M^2)."""
    jh = j_count_fast(ctx, JQuery(H, mset))
    jk = j_count_fast(ctx, JQuery(K, mset))
    M = mset.M
    denom = (H + K) * (H * K / ctx.p + 1) * M * M
    return (jh, jk), abs(K * jh - H * jk) / denom
