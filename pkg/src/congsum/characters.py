"""Multiplicative characters of F_p^* and their sums.

A character is identified by its index k in [0, p-2]:
chi_k(g^j) = exp(2 pi i k j / (p-1)) and chi_k(0) = 0. The conjugate of chi_k
is chi_{-k mod (p-1)}.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .errors import (
    BadInterval,
    IndexOutOfRange,
    NotCoprime,
    NotSquareFree,
    PrincipalCharacter,
    RoundingDrift,
)
from .field import FieldCtx
from .poly import PolyFp, are_coprime, is_square_free


def _check_index(ctx: FieldCtx, k: int) -> int:
    if not 0 <= k <= ctx.p - 2:
        raise IndexOutOfRange(f"character index {k} outside [0, {ctx.p - 2}]")
    return int(k)


def conj_index(ctx: FieldCtx, k: int) -> int:
    return (-k) % (ctx.p - 1)


def quadratic_index(ctx: FieldCtx) -> int:
    return (ctx.p - 1) // 2


def eval_char(ctx: FieldCtx, k: int, x: int) -> complex:
    k = _check_index(ctx, k)
    x %= ctx.p
    if x == 0:
        return 0j
    return complex(ctx.roots[(k * int(ctx.ind[x])) % (ctx.p - 1)])


def char_values(ctx: FieldCtx, k: int) -> np.ndarray:
    """chi_k on every residue 0..p-1 as a length-p complex array."""
    k = _check_index(ctx, k)
    vals = ctx.roots[(k * ctx.ind) % (ctx.p - 1)]
    vals[0] = 0
    return vals


def char_sum_interval(ctx: FieldCtx, k: int, A: int, H: int) -> complex:
    """Sum of chi_k(x mod p) for x in [A+1, A+H]."""
    if not 1 <= H < ctx.p:
        raise BadInterval(f"H={H} not in [1, {ctx.p})")
    xs = np.arange(A + 1, A + H + 1, dtype=np.int64) % ctx.p
    return complex(char_values(ctx, k)[xs].sum())


def char_sum_set(ctx: FieldCtx, k: int, mset: Iterable[int]) -> complex:
    els = np.fromiter((int(m) for m in mset), dtype=np.int64) % ctx.p
    return complex(char_values(ctx, k)[els].sum())


def all_char_sums(ctx: FieldCtx, residues: np.ndarray) -> np.ndarray:
    """Array S with S[k] = sum over the residues of chi_k, for every k at once.

    Transports to logarithms and takes one length-(p-1) DFT; residues
    divisible by p contribute nothing.
    """
    n = ctx.p - 1
    r = np.asarray(residues, dtype=np.int64) % ctx.p
    r = r[r != 0]
    counts = np.bincount(ctx.ind[r], minlength=n).astype(float)
    return np.fft.ifft(counts) * n


def check_rounding(value: float, p: int) -> int:
    """Round to the nearest integer, refusing if the float drifted past 1e-6*p."""
    rounded = int(round(value))
    if abs(value - rounded) > 1e-6 * p:
        raise RoundingDrift(f"{value!r} is not within {1e-6 * p:g} of an integer")
    return rounded


def orthogonality_sum(ctx: FieldCtx, z: int) -> int:
    """Sum of chi(z) over all p-1 characters, by direct summation."""
    z %= ctx.p
    if z == 0:
        raise IndexOutOfRange("z must be a unit")
    j = int(ctx.ind[z])
    total = complex(ctx.roots[(np.arange(ctx.p - 1) * j) % (ctx.p - 1)].sum())
    if abs(total.imag) > 1e-6 * ctx.p:
        raise RoundingDrift(f"imaginary drift {total.imag!r}")
    return check_rounding(total.real, ctx.p)


def weil_sum(ctx: FieldCtx, k: int, f: PolyFp, g: PolyFp) -> tuple[complex, float]:
    """Sum over a in F_p of chi_k(f(a)) * conj(chi_k)(g(a)), and (deg f + deg g) sqrt p."""
    k = _check_index(ctx, k)
    if k == 0:
        raise PrincipalCharacter("the Weil bound needs a nonprincipal character")
    if not is_square_free(f) or not is_square_free(g):
        raise NotSquareFree("f and g must be square-free")
    if not are_coprime(f, g):
        raise NotCoprime("f and g must be coprime")
    vals = char_values(ctx, k)
    value = complex((vals[f.eval_all()] * np.conj(vals[g.eval_all()])).sum())
    bound = (f.degree + g.degree) * math.sqrt(ctx.p)
    return value, bound
