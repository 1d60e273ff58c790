"""Exact counts of xm = yn (mod p) and the J-bounds they are measured against.

J(H, M) counts quadruples (x, y, m, n) with x, y in [A+1, A+H], m, n in the
set M and xm = yn mod p. Three routes compute it: direct enumeration of
pairs (the oracle), a multiplicity table, and the character-sum identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .characters import all_char_sums, check_rounding
from .errors import BadEll, BadInterval, BudgetExceeded, CongsumError
from .field import FieldCtx, make_field_ctx
from .parallel import ordered_map
from .report import DEFAULT_O1, BoundReport, O1Convention
from .sets import MSet, make_set

ORACLE_BUDGET = 5000


@dataclass(frozen=True)
class JQuery:
    H: int
    mset: MSet
    A: int = 0

    def __post_init__(self):
        p = self.mset.p
        if not 1 <= self.H < p:
            raise BadInterval(f"H={self.H} not in [1, {p})")
        if not 0 <= self.A < p:
            raise BadInterval(f"A={self.A} not in [0, {p})")

    @property
    def xs(self) -> np.ndarray:
        return np.arange(self.A + 1, self.A + self.H + 1, dtype=np.int64)


def _products(ctx: FieldCtx, q: JQuery) -> np.ndarray:
    return (np.outer(q.xs % ctx.p, q.mset.array) % ctx.p).ravel()


def j_count_oracle(ctx: FieldCtx, q: JQuery, chunk: int = 512) -> int:
    """Ground truth: test every pair ((x, m), (y, n)) for xm = yn mod p."""
    if q.H * q.mset.M > ORACLE_BUDGET:
        raise BudgetExceeded(f"H*M = {q.H * q.mset.M} exceeds oracle budget {ORACLE_BUDGET}")
    prods = _products(ctx, q)
    total = 0
    for start in range(0, len(prods), chunk):
        block = prods[start:start + chunk]
        total += int((block[:, None] == prods[None, :]).sum())
    return total


def multiplicity_table(ctx: FieldCtx, q: JQuery) -> np.ndarray:
    """r[u] = #{(x, m) : xm = u mod p}, length p."""
    return np.bincount(_products(ctx, q), minlength=ctx.p)


def j_count_fast(ctx: FieldCtx, q: JQuery) -> int:
    # u = 0 only occurs when a shifted interval contains a multiple of p;
    # those x = y = 0 solutions are real and the oracle counts them too.
    r = multiplicity_table(ctx, q)
    return int(np.dot(r, r))


def j_count_charformula(ctx: FieldCtx, q: JQuery) -> tuple[float, int]:
    """(1/(p-1)) sum over chi of |sum_x chi(x)|^2 |sum_m chi(m)|^2."""
    if q.A != 0:
        j = j_count_fast(ctx, q)
        return float(j), j
    s_h = all_char_sums(ctx, q.xs)
    s_m = all_char_sums(ctx, q.mset.array)
    value = float(np.sum(np.abs(s_h) ** 2 * np.abs(s_m) ** 2) / (ctx.p - 1))
    return value, check_rounding(value, ctx.p)


# -- bound expressions (unit implied constants) ---------------------------


def main_term(p: int, H: int, M: int) -> float:
    return H * H * M * M / p


def bound_basic(p: int, H: int, M: int, log=math.log) -> float:
    return main_term(p, H, M) + H * M ** 1.5 * log(p)


def basic_constant(J: int, p: int, H: int, M: int) -> float:
    """Measured C in |J - H^2 M^2 / p| <= C H M^{3/2} log p."""
    return abs(J - main_term(p, H, M)) / (H * M ** 1.5 * math.log(p))


def bound_moderate(p: int, H: int, M: int, o1: O1Convention = DEFAULT_O1) -> float:
    """GRH-conditional reference curve; never asserted."""
    return main_term(p, H, M) + H * M * o1.factor(p)


def bound_garaev(p: int, H: int, M: int, ell: int, o1: O1Convention = DEFAULT_O1) -> float:
    # the H^{o(1)} here is asymptotic in H; the same log p surrogate is used
    if ell < 1:
        raise BadEll(f"ell must be >= 1, got {ell}")
    return (H * p ** (-1 / ell) + 1) * H * o1.factor(p) * M ** (1 + 1 / ell)


def energy_regime(p: int, H: int, M: int) -> str:
    # integer comparisons: H >= p^{2/3} iff H^3 >= p^2, M >= p^{1/3} iff M^3 >= p
    if H ** 3 >= p ** 2:
        return "long-interval"
    if M ** 3 >= p:
        return "large-set"
    return "short"


def bound_energy(p: int, H: int, M: int, o1: O1Convention = DEFAULT_O1) -> BoundReport:
    if not (1 <= H < p and 1 <= M < p):
        raise BadInterval("need 1 <= H, M < p")
    f = o1.factor(p)
    regime = energy_regime(p, H, M)
    if regime == "long-interval":
        bound = main_term(p, H, M) + H * M * f
    elif regime == "large-set":
        bound = main_term(p, H, M) + H * M ** 1.75 * p ** -0.25 * f + M * M
    else:
        bound = H * M * f + M * M
    return BoundReport(bound=bound, regime=regime, o1=o1)


def largeH_hypothesis(p: int, M: int, o1: O1Convention = DEFAULT_O1) -> bool:
    """M <= p^{1/3 + o(1)} under the surrogate convention."""
    return M <= p ** (1 / 3) * o1.factor(p)


def bound_largeH(p: int, H: int, M: int, o1: O1Convention = DEFAULT_O1) -> float:
    return main_term(p, H, M) + H * M * o1.factor(p) + M * M


# -- sweep -----------------------------------------------------------------


@dataclass(frozen=True)
class JCell:
    p: int
    H: int
    family: str
    size: int
    ell: int = 2


def cell_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _family_params(family: str, size: int) -> dict:
    if family == "interval":
        return {"start": 1, "length": size}
    if family == "geometric":
        return {"step": size}
    return {"size": size}


def _j_row(args) -> dict:
    cell, o1, seed = args
    row = {"p": cell.p, "H": cell.H, "family": cell.family, "size": cell.size,
           "ell": cell.ell, "cell_seed": seed, "o1": o1.label()}
    try:
        ctx = make_field_ctx(cell.p)
        mset = make_set(ctx, cell.family, seed=seed, **_family_params(cell.family, cell.size))
        q = JQuery(cell.H, mset)
        J = j_count_fast(ctx, q)
        p, H, M = cell.p, cell.H, mset.M
        rep = bound_energy(p, H, M, o1).with_exact(J)
        row.update({
            "M": M,
            "Mplus": mset.Mplus,
            "J": J,
            "main_term": main_term(p, H, M),
            "bound_basic": bound_basic(p, H, M),
            "basic_constant": basic_constant(J, p, H, M),
            "bound_moderate": bound_moderate(p, H, M, o1),
            "bound_garaev": bound_garaev(p, H, M, cell.ell, o1),
            "bound_energy": rep.bound,
            "energy_regime": rep.regime,
            "ratio_energy": rep.ratio,
            "bound_largeH": bound_largeH(p, H, M, o1),
            "largeH_hypothesis": largeH_hypothesis(p, M, o1),
            "status": "ok",
        })
    except (CongsumError, KeyError) as exc:
        row["status"] = f"error: {type(exc).__name__}: {exc}"
    return row


def sweep_j(grid: Sequence[JCell], o1: O1Convention = DEFAULT_O1, seed: int = 0,
            jobs: int | None = 1) -> list[dict]:
    """Exact J plus every J-bound per grid cell; failing cells become flagged rows."""
    grid = list(grid)
    if not grid:
        raise ValueError("empty grid")
    args = [(cell, o1, cell_seed(seed, i)) for i, cell in enumerate(grid)]
    return ordered_map(_j_row, args, jobs)
