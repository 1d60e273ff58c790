"""Experiment drivers behind each CLI subcommand; each returns CSV rows in grid order."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from . import congruence as cg
from .characters import quadratic_index, weil_sum
from .config import ExperimentConfig
from .field import make_field_ctx
from .kloosterman import (
    BilinearQuery,
    bilinear_sum,
    bound_kms,
    bound_bilinear,
    bruteforce_table,
    cached_table,
    fold_residual,
    random_unimodular,
    unit_weights,
    BRUTE_BUDGET,
)
from .lattice import (
    coefficient_constant,
    htok_constant,
    lattice_basis,
    short_vectors,
)
from .parallel import ordered_map
from .poly import PolyFp, are_coprime, is_square_free
from .sets import MSet, make_set
from .trilinear import (
    TrilinearQuery,
    bound_trilinear,
    trilinear_nontrivial_conditions,
    measured_exponent,
    s_chi_double,
    trilinear_direct,
    trilinear_via_theta,
)
from .errors import CongsumError


def _seed(cfg: ExperimentConfig, *key: int) -> int:
    return int(np.random.SeedSequence([cfg.seed, *key]).generate_state(1)[0])


def _common(cfg: ExperimentConfig) -> dict:
    return {"seed": cfg.seed, "o1": cfg.o1.label()}


# -- jcount / jsweep ---------------------------------------------------------------


def run_jcount(cfg: ExperimentConfig) -> tuple[list[dict], bool]:
    c = cfg.jcount
    ctx = make_field_ctx(c.p)
    q = cg.JQuery(c.H, MSet.of(c.p, c.mset), A=c.A)
    fast = cg.j_count_fast(ctx, q)
    try:
        oracle = cg.j_count_oracle(ctx, q)
    except CongsumError:
        oracle = None
    value, rounded = cg.j_count_charformula(ctx, q)
    ok = rounded == fast and oracle in (None, fast)
    row = {"p": c.p, "H": c.H, "A": c.A, "M": q.mset.M, "oracle": oracle, "fast": fast,
           "charformula": value, "charformula_rounded": rounded, "agree": ok}
    return [row], ok


def run_jsweep(cfg: ExperimentConfig, jobs=None) -> list[dict]:
    c = cfg.jsweep
    grid = [cg.JCell(p, H, fam, size, c.ell)
            for p, H, fam, size in itertools.product(c.primes, c.H, c.families, c.sizes)]
    return [dict(_common(cfg), **r) for r in cg.sweep_j(grid, cfg.o1, cfg.seed, jobs)]


# -- lattice -----------------------------------------------------------------------


def _lattice_row(args):
    p, m, n = args
    ctx = make_field_ctx(p)
    b = lattice_basis(ctx, m, n)
    row = {"kind": "basis", "p": p, "m": m, "n": n, "e_x": b.e[0], "e_y": b.e[1],
           "f_x": b.f[0], "f_y": b.f[1], "det": b.det,
           "shape_ratio": float(np.sqrt(b.e_norm2 * b.f_norm2)) / p,
           "gauss_reduced": b.is_gauss_reduced(),
           "member": b.contains(b.e) and b.contains(b.f)}
    if p <= 101:
        consts = [coefficient_constant(b, u) for u in short_vectors(ctx, m, n, p)
                  if u[0] ** 2 + u[1] ** 2 <= p * p]
        row["coeff_constant"] = max(consts)
    return row


def _htok_row(args):
    p, H, K, M, seed = args
    ctx = make_field_ctx(p)
    mset = make_set(ctx, "random", seed=seed, size=M)
    (jh, jk), c = htok_constant(ctx, H, K, mset)
    return {"kind": "htok", "p": p, "H": H, "K": K, "M": M, "set_seed": seed,
            "J_H": jh, "J_K": jk, "htok_constant": c}


def run_lattice(cfg: ExperimentConfig, jobs=None) -> list[dict]:
    c = cfg.lattice
    triples = []
    for i, p in enumerate(c.primes):
        rng = np.random.default_rng(_seed(cfg, 40, i))
        for _ in range(c.triples):
            m, n = (int(v) for v in rng.integers(1, p, size=2))
            triples.append((p, m, n))
    rows = ordered_map(_lattice_row, triples, jobs)
    cells = [(p, H, K, M, _seed(cfg, 41, j))
             for j, (p, H, K, M) in enumerate(itertools.product(c.htok_primes, c.htok_H, c.htok_K, c.htok_M))
             if H < p and K < p and M < p]
    rows += ordered_map(_htok_row, cells, jobs)
    return [dict(_common(cfg), **r) for r in rows]


# -- weil --------------------------------------------------------------------------


def random_weil_pair(p: int, max_degree: int, rng: np.random.Generator) -> tuple[PolyFp, PolyFp]:
    """Square-free coprime (f, g) with 1 <= deg f + deg g <= max_degree."""
    while True:
        total = int(rng.integers(1, max_degree + 1))
        df = int(rng.integers(0, total + 1))
        polys = []
        for d in (df, total - df):
            coeffs = [int(v) for v in rng.integers(0, p, size=d + 1)]
            coeffs[-1] = int(rng.integers(1, p))
            polys.append(PolyFp(p, coeffs))
        f, g = polys
        if is_square_free(f) and is_square_free(g) and are_coprime(f, g):
            return f, g


def _weil_row(args):
    p, max_degree, seed = args
    ctx = make_field_ctx(p)
    rng = np.random.default_rng(seed)
    f, g = random_weil_pair(p, max_degree, rng)
    k = int(rng.integers(1, p - 1))
    value, bound = weil_sum(ctx, k, f, g)
    return {"p": p, "k": k, "f": " ".join(map(str, f.coeffs)), "g": " ".join(map(str, g.coeffs)),
            "deg_f": f.degree, "deg_g": g.degree, "value": value, "abs_value": abs(value),
            "bound": bound, "constant": abs(value) / bound}


def run_weil(cfg: ExperimentConfig, jobs=None) -> list[dict]:
    c = cfg.weil
    args = [(p, c.max_degree, _seed(cfg, 50, i, j))
            for i, p in enumerate(c.primes) for j in range(c.count)]
    return [dict(_common(cfg), **r) for r in ordered_map(_weil_row, args, jobs)]


# -- kloosterman / bilinear ----------------------------------------------------------


@lru_cache(maxsize=32)
def _table(p: int, r: int, cache_dir: str | None, method: str = "direct"):
    return cached_table(make_field_ctx(p), r, cache_dir, method)


def _kloosterman_row(args):
    p, r, method, oracle_max_p, cache_dir = args
    ctx = make_field_ctx(p)
    t = _table(p, r, cache_dir, method)
    row = {"p": p, "r": r, "g": ctx.g, "method": method, "max_abs": t.max_abs(),
           "deligne_ok": t.max_abs() <= r + 1e-8, "max_imag": float(np.abs(t.units.imag).max())}
    if r >= 2:
        row["fold_residual"] = fold_residual(ctx, _table(p, r - 1, cache_dir, method), t)
    if p <= oracle_max_p and (p - 1) ** (r - 1) <= BRUTE_BUDGET:
        row["oracle_max_diff"] = float(np.abs(bruteforce_table(ctx, r).units - t.units).max())
    return row


def run_kloosterman(cfg: ExperimentConfig, jobs=None, cache_dir=None) -> list[dict]:
    c = cfg.kloosterman
    args = [(p, r, c.method, c.oracle_max_p, cache_dir) for p in c.primes for r in c.r]
    return [dict(_common(cfg), **r) for r in ordered_map(_kloosterman_row, args, jobs)]


def _bilinear_row(args):
    p, r, M, N, shift, ells, weights, seed, o1, cache_dir = args
    ctx = make_field_ctx(p)
    row = {"p": p, "r": r, "M": M, "N": N, "shift": shift, "weights": weights, "cell_seed": seed}
    try:
        rng = np.random.default_rng(seed)
        mset = make_set(ctx, "random", seed=int(rng.integers(2**32)), size=M)
        alpha = unit_weights(M) if weights == "unit" else random_unimodular(M, int(rng.integers(2**32)))
        q = BilinearQuery(mset, alpha, N, r, s=shift)
    except CongsumError as exc:
        row["status"] = f"error: {type(exc).__name__}: {exc}"
        return [row]
    value = bilinear_sum(ctx, q, _table(p, r, cache_dir))
    row.update({"Mplus": mset.Mplus, "wraps": q.wraps, "S": value, "abs_S": abs(value),
                "trivial": r * M * N})
    out = []
    for ell in ells:
        t4 = bound_bilinear(p, M, N, ell, o1, r=r).with_exact(abs(value))
        kms = bound_kms(p, M, N, mset.Mplus, ell, o1).with_exact(abs(value))
        out.append(dict(row, ell=ell, **t4.as_row("bilinear_"), **kms.as_row("kms_"), status="ok"))
    return out


def run_bilinear(cfg: ExperimentConfig, jobs=None, cache_dir=None) -> list[dict]:
    c = cfg.bilinear
    args = [(p, r, M, N, c.shift, c.ell, c.weights, _seed(cfg, 60, i), cfg.o1, cache_dir)
            for i, (p, r, M, N) in enumerate(itertools.product(c.primes, c.r, c.M, c.N))]
    rows = [r for chunk in ordered_map(_bilinear_row, args, jobs) for r in chunk]
    return [dict(_common(cfg), **r) for r in rows]


# -- trilinear -----------------------------------------------------------------------


def _trilinear_row(args):
    p, H, K, M, ells, chi_spec, eps, weights, seed, o1 = args
    ctx = make_field_ctx(p)
    chi = quadratic_index(ctx) if chi_spec == "quadratic" else int(chi_spec)
    row = {"p": p, "H": H, "K": K, "M": M, "chi": chi, "weights": weights, "cell_seed": seed}
    try:
        rng = np.random.default_rng(seed)
        kset = make_set(ctx, "random", seed=int(rng.integers(2**32)), size=K)
        mset = make_set(ctx, "random", seed=int(rng.integers(2**32)), size=M)
        zeta = None
        if weights != "unit":
            zeta = np.asarray(random_unimodular(K, int(rng.integers(2**32))))
        q = TrilinearQuery(H, kset, mset, chi, zeta=zeta)
    except CongsumError as exc:
        row["status"] = f"error: {type(exc).__name__}: {exc}"
        return [row]
    W = trilinear_direct(ctx, q)
    W_theta = trilinear_via_theta(ctx, H, kset, mset, chi, zeta=zeta)
    row.update({"W": W, "abs_W": abs(W), "theta_route_diff": abs(W - W_theta), "trivial": q.trivial,
                "kappa_hat": measured_exponent(abs(W), q.trivial, p) if abs(W) > 0 else None,
                "S_chi": s_chi_double(ctx, chi, H, mset)})
    row.update({f"nontrivial_{k}": v for k, v in trilinear_nontrivial_conditions(p, H, K, M, eps, o1).items()})
    out = []
    for ell in ells:
        rep = bound_trilinear(p, H, K, M, ell, o1).with_exact(abs(W))
        out.append(dict(row, ell=ell, **rep.as_row("trilinear_"), status="ok"))
    return out


def run_trilinear(cfg: ExperimentConfig, jobs=None) -> list[dict]:
    c = cfg.trilinear
    args = [(p, H, K, M, c.ell, c.chi, c.eps, c.weights, _seed(cfg, 70, i), cfg.o1)
            for i, (p, H, K, M) in enumerate(itertools.product(c.primes, c.H, c.K, c.M))]
    rows = [r for chunk in ordered_map(_trilinear_row, args, jobs) for r in chunk]
    return [dict(_common(cfg), **r) for r in rows]
