"""Trilinear character sums W_chi, the theta multiplicity table and S_chi."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .characters import char_values
from .errors import BadEll, BadInterval, DomainError, PrincipalCharacter, WeightedInput
from .field import FieldCtx
from .report import DEFAULT_O1, BoundReport, O1Convention
from .sets import MSet


@dataclass(frozen=True, eq=False)
class TrilinearQuery:
    """W = sum_h sum_k sum_m alpha_h zeta_k eta_m chi(h + k m), h in [1, H]."""

    H: int
    kset: MSet
    mset: MSet
    chi: int
    alpha: np.ndarray | None = None
    zeta: np.ndarray | None = None
    eta: np.ndarray | None = None

    def __post_init__(self):
        p = self.kset.p
        if not 1 <= self.H < p:
            raise BadInterval(f"H={self.H} not in [1, {p})")
        if self.chi % (p - 1) == 0:
            raise PrincipalCharacter("W needs a nonprincipal character")
        for name, size in (("alpha", self.H), ("zeta", self.kset.M), ("eta", self.mset.M)):
            w = getattr(self, name)
            if w is None:
                continue
            w = np.asarray(w, dtype=complex)
            if w.shape != (size,):
                raise ValueError(f"{name} must have length {size}")
            if np.abs(w).max(initial=0) > 1 + 1e-12:
                raise ValueError(f"{name} weights exceed 1 in modulus")
            object.__setattr__(self, name, w)

    def weights(self, name: str) -> np.ndarray:
        w = getattr(self, name)
        size = {"alpha": self.H, "zeta": self.kset.M, "eta": self.mset.M}[name]
        return np.ones(size, dtype=complex) if w is None else w

    @property
    def trivial(self) -> int:
        return self.H * self.kset.M * self.mset.M


@dataclass(frozen=True, eq=False)
class ThetaTable:
    """theta[l] = #{(h, m) in [1, H] x M : h m^{-1} = l mod p}, length p (theta[0] = 0)."""

    p: int
    H: int
    M: int
    theta: np.ndarray

    def total(self) -> int:
        return int(self.theta.sum())

    def energy(self) -> int:
        return int(np.dot(self.theta, self.theta))


def _ratios(ctx: FieldCtx, H: int, mset: MSet) -> np.ndarray:
    hs = np.arange(1, H + 1, dtype=np.int64)
    return np.outer(hs, ctx.inv[mset.array]) % ctx.p


def theta_table(ctx: FieldCtx, H: int, mset: MSet) -> ThetaTable:
    if not 1 <= H < ctx.p:
        raise BadInterval(f"H={H} not in [1, {ctx.p})")
    theta = np.bincount(_ratios(ctx, H, mset).ravel(), minlength=ctx.p)
    return ThetaTable(ctx.p, H, mset.M, theta)


def trilinear_direct(ctx: FieldCtx, q: TrilinearQuery) -> complex:
    p = ctx.p
    chi = char_values(ctx, q.chi % (p - 1))
    hs = np.arange(1, q.H + 1, dtype=np.int64)
    km = np.outer(q.kset.array, q.mset.array) % p  # (K, M)
    zeta_eta = np.outer(q.weights("zeta"), q.weights("eta"))
    total = 0j
    for h, a in zip(hs, q.weights("alpha")):
        total += a * complex((zeta_eta * chi[(h + km) % p]).sum())
    return total


def trilinear_via_theta(ctx: FieldCtx, H: int, kset: MSet, mset: MSet, chi: int,
                        zeta=None, alpha=None, eta=None) -> complex:
    """W for unit alpha and eta through h + km = m (h/m + k).

    theta'(l) = sum of chi(m) over pairs with h/m = l carries the outer factor,
    so W = sum_l theta'(l) sum_k zeta_k chi(l + k).
    """
    for name, w in (("alpha", alpha), ("eta", eta)):
        if w is not None and not np.all(np.asarray(w) == 1):
            raise WeightedInput(f"the theta route needs unit {name} weights")
    p = ctx.p
    chi_vals = char_values(ctx, chi % (p - 1))
    lam = _ratios(ctx, H, mset)  # (H, M)
    theta_c = np.zeros(p, dtype=complex)
    np.add.at(theta_c, lam.ravel(), np.broadcast_to(chi_vals[mset.array], lam.shape).ravel())
    zeta = np.ones(kset.M, dtype=complex) if zeta is None else np.asarray(zeta, dtype=complex)
    support = np.nonzero(theta_c)[0]
    inner = (chi_vals[(support[:, None] + kset.array[None, :]) % p] * zeta).sum(axis=1)
    return complex(np.dot(theta_c[support], inner))


def s_chi_double(ctx: FieldCtx, chi: int, H: int, mset: MSet) -> float:
    """sum over m of |sum_{h=1}^H chi(h + m)|."""
    if chi % (ctx.p - 1) == 0:
        raise PrincipalCharacter("S_chi needs a nonprincipal character")
    vals = char_values(ctx, chi % (ctx.p - 1))
    hs = np.arange(1, H + 1, dtype=np.int64)
    inner = vals[(hs[None, :] + mset.array[:, None]) % ctx.p].sum(axis=1)
    return float(np.abs(inner).sum())


def bound_trilinear(p, H, K, M, ell: int, o1: O1Convention = DEFAULT_O1) -> BoundReport:
    if ell < 1:
        raise BadEll(f"ell must be >= 1, got {ell}")
    L = ell
    first = p ** (-1 / (2 * L)) + H ** (-1 / (2 * L)) * M ** (-1 / (2 * L)) + H ** (-1 / L)
    second = p ** (1 / (4 * L)) + K ** -0.5 * p ** (1 / (2 * L))
    bound = H * K * M * first * second * o1.factor(p)
    return BoundReport(
        bound=bound,
        regime="trilinear",
        ell=ell,
        o1=o1,
        flags={"M_hypothesis": M <= p ** (1 / 3) * o1.factor(p)},
    )


def trilinear_nontrivial_conditions(p, H, K, M, eps: float = 0.05, o1: O1Convention = DEFAULT_O1) -> dict[str, bool]:
    flags = {
        "K_large": K >= p ** eps,
        "M_small": M <= p ** (1 / 3) * o1.factor(p),
        "HM_large": H * M >= p ** (0.5 + eps),
        "H_large": H >= p ** (0.25 + eps),
    }
    flags["all"] = all(flags.values())
    # M_small held only thanks to the o(1) slack
    flags["M_boundary"] = flags["M_small"] and M ** 3 > p
    return flags


def measured_exponent(exact: float, trivial: float, p: int) -> float:
    """log(trivial / exact) / log p: the observed power saving."""
    if exact <= 0 or trivial <= 0 or p < 3:
        raise DomainError("need exact > 0, trivial > 0 and p >= 3")
    if exact > trivial * (1 + 1e-12):
        raise DomainError(f"exact {exact} exceeds trivial {trivial}")
    return math.log(trivial / exact) / math.log(p)
