"""Normalized multidimensional Kloosterman sums and bilinear sums over them.

K_r(n) = p^{-(r-1)/2} * sum over x_1 ... x_r = n of e_p(x_1 + ... + x_r).
Writing n = g^k turns the product constraint into j_1 + ... + j_r = k mod
p-1, so the unnormalized sums for all n are the r-fold cyclic convolution
of a_j = e_p(g^j).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    BadEll,
    BudgetExceeded,
    CacheMismatch,
    DeligneViolation,
    DimensionMismatch,
    OddEll,
    CongsumError,
)
from .field import FieldCtx
from .report import DEFAULT_O1, BoundReport, O1Convention
from .sets import MSet

BRUTE_BUDGET = 10**6
DELIGNE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class KloostermanTable:
    """K_r(n) for n = 1..p-1; ``values[n]`` is K_r(n) and ``values[0]`` is unused (nan)."""

    p: int
    r: int
    g: int
    values: np.ndarray = field(repr=False)

    def __getitem__(self, n: int) -> complex:
        n %= self.p
        if n == 0:
            raise IndexError("K_r is tabulated on F_p^* only")
        return complex(self.values[n])

    @property
    def units(self) -> np.ndarray:
        return self.values[1:]

    def max_abs(self) -> float:
        return float(np.abs(self.units).max())


def _check_deligne(values: np.ndarray, r: int) -> None:
    worst = float(np.abs(values[1:]).max())
    if worst > r + DELIGNE_TOL:
        raise DeligneViolation(f"max |K_{r}(n)| = {worst!r} exceeds {r}")


def _from_log_order(ctx: FieldCtx, r: int, by_log: np.ndarray) -> KloostermanTable:
    values = np.full(ctx.p, np.nan, dtype=complex)
    values[ctx.pow_g] = by_log / ctx.p ** ((r - 1) / 2)
    _check_deligne(values, r)
    values.setflags(write=False)
    return KloostermanTable(ctx.p, r, ctx.g, values)


# -- brute force ------------------------------------------------------------


@lru_cache(maxsize=8)
def _free_grid(ctx: FieldCtx, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Sums and inverse-products of (x_1, ..., x_{r-1}) over all unit tuples."""
    p = ctx.p
    xs = np.arange(1, p, dtype=np.int64)
    s = np.zeros(1, dtype=np.int64)
    t = np.ones(1, dtype=np.int64)
    for _ in range(r - 1):
        s = ((s[:, None] + xs[None, :]) % p).ravel()
        t = ((t[:, None] * xs[None, :]) % p).ravel()
    return s, ctx.inv[t]


def kloosterman_bruteforce(ctx: FieldCtx, r: int, n: int) -> complex:
    """Direct sum with x_r = n (x_1 ... x_{r-1})^{-1}; needs (p-1)^(r-1) <= 1e6."""
    if r < 1:
        raise DimensionMismatch("r must be >= 1")
    if (ctx.p - 1) ** (r - 1) > BRUTE_BUDGET:
        raise BudgetExceeded(f"(p-1)^(r-1) = {(ctx.p - 1) ** (r - 1)} > {BRUTE_BUDGET}")
    n %= ctx.p
    s, inv_t = _free_grid(ctx, r)
    total = ctx.eroots[(s + n * inv_t) % ctx.p].sum()
    return complex(total / ctx.p ** ((r - 1) / 2))


def bruteforce_table(ctx: FieldCtx, r: int) -> KloostermanTable:
    values = np.full(ctx.p, np.nan, dtype=complex)
    for n in range(1, ctx.p):
        values[n] = kloosterman_bruteforce(ctx, r, n)
    _check_deligne(values, r)
    values.setflags(write=False)
    return KloostermanTable(ctx.p, r, ctx.g, values)


# -- convolution ------------------------------------------------------------


def cyclic_convolve_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """c[k] = sum_j a[j] b[(k - j) mod n], one length-n dot product per output."""
    n = len(a)
    bb = np.concatenate([b, b])
    ar = a[::-1].copy()
    # b[(k-j) mod n] over j = 0..n-1, read backwards, is bb[k+1 : k+1+n]
    return np.array([np.dot(ar, bb[k + 1:k + 1 + n]) for k in range(n)])


def cyclic_convolve_fft(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.fft.ifft(np.fft.fft(a) * np.fft.fft(b))


_CONVOLVERS = {"direct": cyclic_convolve_direct, "fft": cyclic_convolve_fft}


def exp_sequence(ctx: FieldCtx) -> np.ndarray:
    """a_j = e_p(g^j), j = 0..p-2."""
    return ctx.eroots[ctx.pow_g].copy()


def kloosterman_tables(ctx: FieldCtx, rmax: int, method: str = "direct") -> list[KloostermanTable]:
    """Tables for r = 1..rmax, each obtained from the previous by one convolution fold."""
    if rmax < 1:
        raise DimensionMismatch("r must be >= 1")
    conv = _CONVOLVERS[method]
    a = exp_sequence(ctx)
    s = a.copy()
    out = [_from_log_order(ctx, 1, s)]
    for r in range(2, rmax + 1):
        s = conv(s, a)
        out.append(_from_log_order(ctx, r, s))
    return out


def kloosterman_table(ctx: FieldCtx, r: int, method: str = "direct") -> KloostermanTable:
    return kloosterman_tables(ctx, r, method)[-1]


def fold_residual(ctx: FieldCtx, lower: KloostermanTable, upper: KloostermanTable) -> float:
    """Relative max error of K_r(n) p^{(r-1)/2} = sum_x e_p(x) K_{r-1}(n/x) p^{(r-2)/2}.

    The right side is summed over residues with the inverse table, not via
    the log-coordinate convolution that produced ``upper``.
    """
    if upper.r != lower.r + 1 or upper.p != ctx.p or lower.p != ctx.p:
        raise DimensionMismatch("need consecutive dimensions over the same p")
    p = ctx.p
    xs = np.arange(1, p, dtype=np.int64)
    ex = ctx.eroots[xs]
    inv_x = ctx.inv[xs]
    low = lower.values * p ** ((lower.r - 1) / 2)
    lhs = upper.values[1:] * p ** ((upper.r - 1) / 2)
    rhs = np.empty(p - 1, dtype=complex)
    for n in range(1, p):
        rhs[n - 1] = np.dot(ex, low[(n * inv_x) % p])
    return float(np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max()))


# -- on-disk cache ------------------------------------------------------------

_MAGIC = b"KLST"
_VERSION = 1
_HEADER = struct.Struct("<4sIQIQ")  # magic, version, p, r, g


def cache_path(cache_dir: str | Path, p: int, r: int) -> Path:
    return Path(cache_dir) / f"kloosterman_p{p}_r{r}.bin"


def save_table(path: str | Path, table: KloostermanTable) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = np.ascontiguousarray(table.units, dtype="<c16").tobytes()
    path.write_bytes(_HEADER.pack(_MAGIC, _VERSION, table.p, table.r, table.g) + body)


def load_table(path: str | Path, ctx: FieldCtx | None = None, r: int | None = None) -> KloostermanTable:
    raw = Path(path).read_bytes()
    magic, version, p, rr, g = _HEADER.unpack_from(raw)
    if magic != _MAGIC or version != _VERSION:
        raise CacheMismatch(f"{path}: not a version-{_VERSION} table file")
    if ctx is not None and (p, g) != (ctx.p, ctx.g):
        raise CacheMismatch(f"{path}: header (p={p}, g={g}) does not match context")
    if r is not None and rr != r:
        raise CacheMismatch(f"{path}: header r={rr}, wanted {r}")
    body = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
    if len(body) != p - 1:
        raise CacheMismatch(f"{path}: expected {p - 1} values, found {len(body)}")
    values = np.empty(p, dtype=complex)
    values[0] = np.nan
    values[1:] = body
    values.setflags(write=False)
    return KloostermanTable(p, rr, g, values)


def cached_table(ctx: FieldCtx, r: int, cache_dir: str | Path | None, method: str = "direct") -> KloostermanTable:
    if cache_dir is None:
        return kloosterman_table(ctx, r, method)
    path = cache_path(cache_dir, ctx.p, r)
    if path.exists():
        return load_table(path, ctx, r)
    table = kloosterman_table(ctx, r, method)
    save_table(path, table)
    return table


# -- bilinear sums ------------------------------------------------------------


def unit_weights(n: int) -> tuple[complex, ...]:
    return (1 + 0j,) * n


def random_unimodular(n: int, seed: int) -> tuple[complex, ...]:
    phases = np.random.default_rng(seed).random(n)
    return tuple(complex(z) for z in np.exp(2j * np.pi * phases))


@dataclass(frozen=True)
class BilinearQuery:
    """Set M with weights alpha, interval N = {s+1, ..., s+N}, optional beta, dimension r."""

    mset: MSet
    alpha: tuple[complex, ...]
    N: int
    r: int
    s: int = 0
    beta: tuple[complex, ...] | None = None

    def __post_init__(self):
        p = self.mset.p
        if len(self.alpha) != self.mset.M:
            raise DimensionMismatch("one alpha weight per element of M")
        if not 1 <= self.N < p:
            raise DimensionMismatch(f"need 1 <= N < p, got N={self.N}")
        if self.beta is not None and len(self.beta) != self.N:
            raise DimensionMismatch("one beta weight per element of N")
        for w in self.alpha + (self.beta or ()):
            if abs(w) > 1 + 1e-12:
                raise CongsumError(f"weight {w} exceeds 1 in modulus")

    @property
    def ns(self) -> range:
        return range(self.s + 1, self.s + self.N + 1)

    @property
    def wraps(self) -> bool:
        """True if the interval meets a multiple of p (those terms are dropped)."""
        p = self.mset.p
        return (self.s + self.N) // p > self.s // p


def bilinear_sum(ctx: FieldCtx, q: BilinearQuery, table: KloostermanTable) -> complex:
    """sum_m sum_n alpha_m (beta_n) K_r(mn), m outer, n inner, in input order."""
    if table.r != q.r or table.p != ctx.p:
        raise DimensionMismatch(f"table (p={table.p}, r={table.r}) vs query (p={ctx.p}, r={q.r})")
    p = ctx.p
    K = table.values
    acc = 0j
    for m, a in zip(q.mset.elements, q.alpha):
        for i, n in enumerate(q.ns):
            u = m * n % p
            if u == 0:
                continue
            w = a if q.beta is None else a * q.beta[i]
            acc += w * complex(K[u])
    return acc


def trivial_envelope(q: BilinearQuery) -> float:
    """r * sum|alpha| * sum|beta| (beta = 1 when absent)."""
    sb = q.N if q.beta is None else sum(abs(b) for b in q.beta)
    return q.r * sum(abs(a) for a in q.alpha) * sb


# -- bounds -------------------------------------------------------------------


def bound_bilinear(p, M, N, ell: int, o1: O1Convention = DEFAULT_O1, r: int | None = None) -> BoundReport:
    if ell < 2 or ell % 2:
        raise OddEll(f"ell must be even and >= 2, got {ell}")
    L = ell
    inner = (
        N ** (-1 / (2 * L))
        + M ** (-1 / (8 * L)) * N ** (-1 / L) * p ** (3 / (8 * L) + 1 / (2 * L * L))
        + M ** (-1 / (2 * L)) * N ** (-1 / L) * p ** (1 / (2 * L) + 1 / (2 * L * L))
        + N ** (-3 / (2 * L)) * p ** (1 / (2 * L) + 1 / (L * L))
    )
    bound = M * N * inner * o1.factor(p)
    flags = {}
    if r is not None:
        flags["uninformative"] = bound >= r * M * N
    return BoundReport(bound=bound, regime="bilinear", ell=ell, o1=o1, flags=flags)


def _pow_le(a, alpha: int, b, beta: int) -> bool:
    """a^alpha <= b^beta, exactly when a and b are integers."""
    if isinstance(a, int) and isinstance(b, int):
        return a ** alpha <= b ** beta
    return alpha * math.log(a) <= beta * math.log(b)


def kms_conditions(p, N, Mplus, ell: int) -> tuple[bool, bool]:
    """(cond1, cond2) for the KMS comparison bound, compared without rounding for integer inputs."""
    low = _pow_le(p, 1, N, ell)                                  # p^{1/l} <= N
    cond1 = low and _pow_le(2 * N, 2 * ell, p, ell + 1)          # N <= p^{1/2+1/2l} / 2
    cond2 = low and _pow_le(2 * N * Mplus, 2 * ell, p, 2 * ell + 1)  # N M+ <= p^{1+1/2l} / 2
    return cond1, cond2


def bound_kms(p, M, N, Mplus, ell: int, o1: O1Convention = DEFAULT_O1) -> BoundReport:
    if ell < 1:
        raise BadEll(f"ell must be >= 1, got {ell}")
    L = ell
    bound = M * N * M ** (-1 / (2 * L)) * N ** (-1 / L) * p ** (1 / (2 * L) + 1 / (2 * L * L)) * o1.factor(p)
    cond1, cond2 = kms_conditions(p, N, Mplus, ell)
    applicable = cond1 or cond2
    return BoundReport(
        bound=bound,
        regime="kms" if applicable else "kms-inapplicable",
        ell=ell,
        o1=o1,
        flags={"cond1": cond1, "cond2": cond2, "applicable": applicable},
    )


def kms_applicable_ells(p, N, Mplus, ells: Sequence[int]) -> list[int]:
    return [L for L in ells if any(kms_conditions(p, N, Mplus, L))]
