"""The acceptance checks, shared by ``congsum verify`` and the test suite.

Every check returns rows ``{criterion, check, value, threshold, passed}``.
Rows carry no timings so that ``verify`` output is byte-reproducible.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import congruence as cg
from .config import VerifyConfig
from .csvio import rows_to_text
from .field import make_field_ctx
from .kloosterman import (
    BilinearQuery,
    bilinear_sum,
    bruteforce_table,
    fold_residual,
    kloosterman_tables,
    kms_applicable_ells,
    bound_kms,
    random_unimodular,
    trivial_envelope,
)
from .lattice import htok_constant, lattice_basis, shortest_norm2_exhaustive
from .parallel import ordered_map
from .report import O1Convention
from .sets import MSet, make_set
from .trilinear import TrilinearQuery, theta_table, trilinear_direct, trilinear_via_theta

QUICK = VerifyConfig(
    j_primes=(5, 7, 11, 101),
    j_cells=6,
    lattice_primes=(101, 1009),
    lattice_triples=40,
    htok_primes=(101,),
    htok_cells=10,
    kl_oracle_primes=(5, 7, 11),
    kl_deligne_primes=(5, 7, 101),
    kl_rmax=3,
    route_queries=5,
    route_primes=(101,),
    basic_primes=(101,),
    determinism=False,
)


def row(criterion: int, check: str, value, threshold, passed: bool) -> dict:
    return {"criterion": criterion, "check": check, "value": value,
            "threshold": threshold, "passed": bool(passed)}


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


# -- 1, 2, 3: congruence counts ---------------------------------------------


def _j_cell(args):
    p, seed, idx = args
    ctx = make_field_ctx(p)
    rng = _rng(seed, 1, p, idx)
    H = int(rng.integers(1, min(p - 1, cg.ORACLE_BUDGET) + 1))
    M = int(rng.integers(1, min(p - 1, cg.ORACLE_BUDGET // H) + 1))
    mset = make_set(ctx, "random", seed=int(rng.integers(2**32)), size=M)
    q = cg.JQuery(H, mset)
    oracle = cg.j_count_oracle(ctx, q)
    fast = cg.j_count_fast(ctx, q)
    _, rounded = cg.j_count_charformula(ctx, q)
    th = theta_table(ctx, H, mset)
    j_one = cg.j_count_fast(ctx, cg.JQuery(1, mset))
    return {
        "agree": oracle == fast == rounded,
        "theta_sum": th.total() == H * M,
        "theta_energy": th.energy() == fast,
        "j_one": j_one == M,
    }


def check_triple_agreement(cfg: VerifyConfig, seed: int, jobs=1) -> list[dict]:
    out2 = {"theta_sum": 0, "theta_energy": 0, "j_one": 0}
    rows = []
    for p in cfg.j_primes:
        cells = ordered_map(_j_cell, [(p, seed, i) for i in range(cfg.j_cells)], jobs)
        bad = sum(not c["agree"] for c in cells)
        rows.append(row(1, f"oracle=fast=charformula p={p} cells={len(cells)}", bad, 0, bad == 0))
        for key in out2:
            out2[key] += sum(not c[key] for c in cells)
    for p in cfg.j_primes:
        ctx = make_field_ctx(p)
        full = cg.j_count_fast(ctx, cg.JQuery(p - 1, MSet(p, tuple(range(1, p)))))
        rows.append(row(2, f"J(p-1,F_p^*)=(p-1)^3 p={p}", full - (p - 1) ** 3, 0, full == (p - 1) ** 3))
    rows.append(row(2, "J(1,M)=M mismatches", out2["j_one"], 0, out2["j_one"] == 0))
    rows.append(row(2, "sum theta=HM mismatches", out2["theta_sum"], 0, out2["theta_sum"] == 0))
    rows.append(row(2, "sum theta^2=J mismatches", out2["theta_energy"], 0, out2["theta_energy"] == 0))
    return rows


def check_worked_example() -> list[dict]:
    ctx = make_field_ctx(5)
    q = cg.JQuery(2, MSet(5, (1, 2)))
    r = cg.multiplicity_table(ctx, q)
    vals = (cg.j_count_oracle(ctx, q), cg.j_count_fast(ctx, q), cg.j_count_charformula(ctx, q)[1])
    return [
        row(3, "p=5 H=2 M={1,2}: oracle, fast, charformula", "/".join(map(str, vals)), 6, vals == (6, 6, 6)),
        row(3, "p=5 H=2 M={1,2}: nonzero r(u)", "/".join(str(v) for v in r if v), "1/2/1",
            [v for v in r if v] == [1, 2, 1]),
    ]


# -- 4, 5: lattice -----------------------------------------------------------


def _lattice_cell(args):
    p, seed, idx = args
    ctx = make_field_ctx(p)
    rng = _rng(seed, 4, p, idx)
    m, n = (int(v) for v in rng.integers(1, p, size=2))
    b = lattice_basis(ctx, m, n)
    e2, f2 = b.e_norm2, b.f_norm2
    res = {
        "member": b.contains(b.e) and b.contains(b.f),
        "det": abs(b.det) == p,
        "reduced": b.is_gauss_reduced(),
        "shape": p * p <= e2 * f2 <= 4 * p * p,
        "sign": b.e[0] > 0 or (b.e[0] == 0 and b.e[1] > 0),
        "shape_ratio": float(np.sqrt(e2 * f2)) / p,
        "minimal": None,
    }
    if p <= 101:
        res["minimal"] = shortest_norm2_exhaustive(ctx, m, n) == e2
    return res


def check_lattice(cfg: VerifyConfig, seed: int, jobs=1) -> list[dict]:
    args = []
    n_primes = len(cfg.lattice_primes)
    for i in range(cfg.lattice_triples):
        args.append((cfg.lattice_primes[i % n_primes], seed, i))
    cells = ordered_map(_lattice_cell, args, jobs)
    rows = []
    for key in ("member", "det", "reduced", "shape", "sign"):
        bad = sum(not c[key] for c in cells)
        rows.append(row(4, f"basis {key} failures / {len(cells)}", bad, 0, bad == 0))
    worst = max(c["shape_ratio"] for c in cells)
    rows.append(row(4, "max |e||f|/p", worst, 2.0, 1.0 <= worst <= 2.0))
    mins = [c["minimal"] for c in cells if c["minimal"] is not None]
    bad = sum(not v for v in mins)
    rows.append(row(4, f"exhaustive minimality failures / {len(mins)} (p<=101)", bad, 0, bad == 0 and len(mins) > 0))
    return rows


def _htok_cell(args):
    p, seed, idx = args
    ctx = make_field_ctx(p)
    rng = _rng(seed, 5, p, idx)
    H = int(rng.integers(1, p))
    K = int(rng.integers(1, p))
    M = int(rng.integers(1, min(p - 1, 64) + 1))
    mset = make_set(ctx, "random", seed=int(rng.integers(2**32)), size=M)
    _, c = htok_constant(ctx, H, K, mset)
    _, c_eq = htok_constant(ctx, H, H, mset)
    return c, c_eq


def check_htok(cfg: VerifyConfig, seed: int, jobs=1) -> list[dict]:
    args = [(cfg.htok_primes[i % len(cfg.htok_primes)], seed, i) for i in range(cfg.htok_cells)]
    cells = ordered_map(_htok_cell, args, jobs)
    worst = max(c for c, _ in cells)
    worst_eq = max(c for _, c in cells)
    return [
        row(5, f"max HtoK constant over {len(cells)} cells", worst, 10.0, worst <= 10.0),
        row(5, "HtoK constant at H=K", worst_eq, 0.0, worst_eq == 0.0),
    ]


# -- 6: Kloosterman -----------------------------------------------------------


def _kl_prime(args):
    p, rmax, oracle = args
    ctx = make_field_ctx(p)
    tables = kloosterman_tables(ctx, rmax)
    res = {"p": p, "deligne": [], "oracle": [], "fold": [], "imag2": None}
    for t in tables:
        res["deligne"].append(t.max_abs() - t.r)
        if oracle:
            bt = bruteforce_table(ctx, t.r)
            res["oracle"].append(float(np.abs(bt.units - t.units).max()))
    for lo, hi in zip(tables, tables[1:]):
        res["fold"].append(fold_residual(ctx, lo, hi))
    if rmax >= 2:
        res["imag2"] = float(np.abs(tables[1].units.imag).max())
    return res


def check_kloosterman(cfg: VerifyConfig, seed: int, jobs=1) -> list[dict]:
    oracle_ps = set(cfg.kl_oracle_primes)
    primes = sorted(oracle_ps | set(cfg.kl_deligne_primes))
    res = ordered_map(_kl_prime, [(p, cfg.kl_rmax, p in oracle_ps) for p in primes], jobs)
    oracle = max(max(r["oracle"]) for r in res if r["oracle"])
    deligne = max(max(r["deligne"]) for r in res)
    fold = max(max(r["fold"]) for r in res if r["fold"])
    imag = max(r["imag2"] for r in res if r["imag2"] is not None)
    rmax = cfg.kl_rmax
    return [
        row(6, f"max |table - bruteforce| p<={max(oracle_ps)} r<={rmax}", oracle, 1e-8, oracle <= 1e-8),
        row(6, f"max (|K_r(n)| - r) p<={max(primes)} r<={rmax}", deligne, 1e-8, deligne <= 1e-8),
        row(6, "max |Im K_2(n)|", imag, 1e-8, imag <= 1e-8),
        row(6, "max relative fold residual", fold, 1e-6, fold <= 1e-6),
    ]


# -- 7: route checks -----------------------------------------------------------


def bilinear_reference(q: BilinearQuery, K: np.ndarray, p: int) -> complex:
    """Plain double loop over the tabulated values, same operation order as bilinear_sum."""
    total = 0j
    for i in range(q.mset.M):
        m, a = q.mset.elements[i], q.alpha[i]
        for j in range(q.N):
            u = (m * (q.s + 1 + j)) % p
            if u:
                w = a if q.beta is None else a * q.beta[j]
                total += w * complex(K[u])
    return total


def _route_cell(args):
    p, seed, idx = args
    ctx = make_field_ctx(p)
    rng = _rng(seed, 7, p, idx)
    r = int(rng.integers(1, 5))
    M = int(rng.integers(1, 21))
    N = int(rng.integers(1, min(p - 1, 120) + 1))
    s = int(rng.integers(0, p - N))
    mset = make_set(ctx, "random", seed=int(rng.integers(2**32)), size=M)
    alpha = random_unimodular(M, int(rng.integers(2**32)))
    beta = random_unimodular(N, int(rng.integers(2**32))) if idx % 2 else None
    q = BilinearQuery(mset, alpha, N, r, s=s, beta=beta)
    table = kloosterman_tables(ctx, r)[-1]
    got = bilinear_sum(ctx, q, table)
    ref = bilinear_reference(q, table.values, p)
    env_ok = abs(got) <= trivial_envelope(q) * (1 + 1e-12)

    H = int(rng.integers(1, min(p - 1, 60) + 1))
    kset = make_set(ctx, "random", seed=int(rng.integers(2**32)), size=int(rng.integers(1, 16)))
    mset2 = make_set(ctx, "random", seed=int(rng.integers(2**32)), size=int(rng.integers(1, 16)))
    chi = int(rng.integers(1, p - 1))
    zeta = np.asarray(random_unimodular(kset.M, int(rng.integers(2**32))))
    tq = TrilinearQuery(H, kset, mset2, chi, zeta=zeta)
    w_direct = trilinear_direct(ctx, tq)
    w_theta = trilinear_via_theta(ctx, H, kset, mset2, chi, zeta=zeta)
    diff = abs(w_direct - w_theta)
    rel = diff / abs(w_direct) if abs(w_direct) > 0 else diff
    return got == ref, env_ok, float(rel)


def check_routes(cfg: VerifyConfig, seed: int, jobs=1) -> list[dict]:
    args = [(cfg.route_primes[i % len(cfg.route_primes)], seed, i) for i in range(cfg.route_queries)]
    cells = ordered_map(_route_cell, args, jobs)
    bad_bil = sum(not c[0] for c in cells)
    bad_env = sum(not c[1] for c in cells)
    worst = max(c[2] for c in cells)
    n = len(cells)
    return [
        row(7, f"bilinear table vs double loop, inexact / {n}", bad_bil, 0, bad_bil == 0),
        row(7, f"bilinear trivial envelope violations / {n}", bad_env, 0, bad_env == 0),
        row(7, f"trilinear direct vs theta, max relative error over {n}", worst, 1e-9, worst <= 1e-9),
    ]


# -- 8: bound ratio tracking ----------------------------------------------------


def _iroot_floor(a: int, k: int) -> int:
    """Largest x with x^k <= a."""
    lo, hi = 0, 1
    while hi ** k <= a:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid ** k <= a:
            lo = mid
        else:
            hi = mid
    return lo


def _iroot_ceil(a: int, k: int) -> int:
    x = _iroot_floor(a, k)
    return x if x ** k == a else x + 1


def _expected_regime(p: int, H: int, M: int) -> str:
    if H >= _iroot_ceil(p * p, 3):
        return "long-interval"
    if M >= _iroot_ceil(p, 3):
        return "large-set"
    return "short"


def _expected_kms(p: int, N: int, Mplus: int, ell: int) -> tuple[bool, bool]:
    low = N >= _iroot_ceil(p, ell)
    c1 = low and 2 * N <= _iroot_floor(p ** (ell + 1), 2 * ell)
    c2 = low and 2 * N * Mplus <= _iroot_floor(p ** (2 * ell + 1), 2 * ell)
    return c1, c2


def _basic_cell(args):
    p, H, family, size, seed = args
    ctx = make_field_ctx(p)
    params = {"interval": {"start": 1, "length": size}, "random": {"size": size},
              "geometric": {"step": size}}.get(family, {})
    mset = make_set(ctx, family, seed=seed, **params)
    J = cg.j_count_fast(ctx, cg.JQuery(H, mset))
    return cg.basic_constant(J, p, H, mset.M)


def check_bounds(cfg: VerifyConfig, seed: int, jobs=1) -> list[dict]:
    rows = []
    args = []
    for p in cfg.basic_primes:
        h0 = _iroot_ceil(p * p, 3)
        for H in sorted({h0, (h0 + p) // 2, p - 1}):
            for i, (family, size) in enumerate([("random", 3), ("random", 20), ("random", (p - 1) // 2),
                                                ("interval", 10), ("interval", (p - 1) // 3),
                                                ("quadratic_residues", 0), ("geometric", 4)]):
                args.append((p, H, family, size, cg.cell_seed(seed, 8000 + i)))
    consts = ordered_map(_basic_cell, args, jobs)
    worst = max(consts)
    rows.append(row(8, f"basic envelope constant, H>=p^(2/3), {len(consts)} cells", worst, 10.0, worst <= 10.0))

    bad = 0
    total = 0
    for p in (101, 1009, 10007, 100003):
        marks = {1, 2, p - 1, _iroot_ceil(p, 3), _iroot_ceil(p * p, 3)}
        marks |= {m - 1 for m in marks if m > 1}
        vals = sorted(v for v in marks if 1 <= v < p)
        for H in vals:
            for M in vals:
                total += 1
                bad += cg.bound_energy(p, H, M).regime != _expected_regime(p, H, M)
    rows.append(row(8, f"energy regime label mismatches / {total}", bad, 0, bad == 0))

    bad = 0
    total = 0
    for p in (101, 1009, 10007):
        for ell in range(1, 9):
            root = _iroot_ceil(p, ell)
            for N in sorted({1, 2, max(1, root - 1), root, root + 1, p // 2, p - 1}):
                for Mplus in (1, _iroot_floor(p, 2), _iroot_floor(p, 2) + 1, p - 1):
                    rep = bound_kms(p, 3, N, Mplus, ell)
                    exp1, exp2 = _expected_kms(p, N, Mplus, ell)
                    total += 1
                    bad += (rep.flags["cond1"], rep.flags["cond2"]) != (exp1, exp2)
                    bad += rep.flags["applicable"] != (exp1 or exp2)
    rows.append(row(8, f"KMS condition flag mismatches / {total}", bad, 0, bad == 0))

    # the illustration regime: M+ > p^{1/2}, N = p^{15/26}; take p = 10^104 so N is exact
    big = 10 ** 104
    ells = kms_applicable_ells(big, 10 ** 60, 10 ** 52 + 1, range(1, 13))
    rows.append(row(8, "KMS applicable ell at N=p^(15/26), M+>p^(1/2)", " ".join(map(str, ells)),
                    "2 3 4 5 6", ells == [2, 3, 4, 5, 6]))
    flat = O1Convention(1.0, 0.0)
    lo = bound_kms(big, 21, 10 ** 60, 10 ** 52 + 1, 6, flat)
    hi = bound_kms(big, 22, 10 ** 60, 10 ** 52 + 1, 6, flat)
    ok = lo.bound >= 21 * 10 ** 60 and hi.bound < 22 * 10 ** 60
    rows.append(row(8, "KMS nontrivial iff M >= p^(1/78) (ell=6)", f"{lo.bound / (21e60):.6f}/{hi.bound / 22e60:.6f}",
                    "M=21 trivial, M=22 nontrivial", ok))
    return rows


# -- 9 and the whole suite --------------------------------------------------------


def run_checks(cfg: VerifyConfig, seed: int, jobs=1) -> list[dict]:
    rows = []
    rows += check_triple_agreement(cfg, seed, jobs)
    rows += check_worked_example()
    rows += check_lattice(cfg, seed, jobs)
    rows += check_htok(cfg, seed, jobs)
    rows += check_kloosterman(cfg, seed, jobs)
    rows += check_routes(cfg, seed, jobs)
    rows += check_bounds(cfg, seed, jobs)
    if cfg.determinism:
        rows += check_determinism(seed)
    return rows


def check_determinism(seed: int, cfg: VerifyConfig = QUICK) -> list[dict]:
    cfg = dataclasses.replace(cfg, determinism=False)
    first = rows_to_text(run_checks(cfg, seed, jobs=1))
    second = rows_to_text(run_checks(cfg, seed, jobs=2))
    same = first == second
    return [row(9, "reduced verify CSV identical at jobs=1 and jobs=2", len(first) if same else -1,
                "byte-identical", same)]
