import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from congsum.characters import char_sum_interval, conj_index, eval_char, quadratic_index
from congsum.congruence import JQuery, j_count_fast
from congsum.errors import BadEll, DomainError, PrincipalCharacter, WeightedInput
from congsum.field import make_field_ctx
from congsum.kloosterman import random_unimodular
from congsum.report import O1Convention
from congsum.sets import MSet, make_set
from congsum.trilinear import (
    TrilinearQuery,
    bound_trilinear,
    trilinear_nontrivial_conditions,
    measured_exponent,
    s_chi_double,
    theta_table,
    trilinear_direct,
    trilinear_via_theta,
)

FLAT = O1Convention(1.0, 0.0)


def triple_loop(ctx, H, kset, mset, chi, alpha=None, zeta=None, eta=None):
    alpha = alpha if alpha is not None else [1] * H
    zeta = zeta if zeta is not None else [1] * kset.M
    eta = eta if eta is not None else [1] * mset.M
    total = 0j
    for h in range(1, H + 1):
        for k, z in zip(kset, zeta):
            for m, e in zip(mset, eta):
                total += alpha[h - 1] * z * e * eval_char(ctx, chi, h + k * m)
    return total


def test_theta_examples(ctx5):
    th = theta_table(ctx5, 4, MSet(5, (1, 2, 3, 4)))
    assert list(th.theta[1:]) == [4, 4, 4, 4]
    ctx = make_field_ctx(101)
    mset = make_set(ctx, "random", seed=1, size=5)
    th = theta_table(ctx, 10, mset)
    assert th.total() == 50
    assert th.energy() == j_count_fast(ctx, JQuery(10, mset))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([5, 11, 101, 1009]), st.data())
def test_theta_invariants(p, data):
    ctx = make_field_ctx(p)
    H = data.draw(st.integers(1, p - 1))
    mset = MSet.of(p, data.draw(st.sets(st.integers(1, p - 1), min_size=1, max_size=30)))
    th = theta_table(ctx, H, mset)
    assert th.total() == H * mset.M
    assert th.energy() == j_count_fast(ctx, JQuery(H, mset))


def test_direct_degenerate_sets():
    ctx = make_field_ctx(101)
    k = 7
    q = TrilinearQuery(20, MSet(101, (1,)), MSet(101, (1,)), k)
    assert abs(trilinear_direct(ctx, q) - char_sum_interval(ctx, k, 1, 20)) < 1e-12
    # M = {1}: theta' is the indicator of [1, H]
    w = trilinear_via_theta(ctx, 20, MSet(101, (1,)), MSet(101, (1,)), k)
    assert abs(w - char_sum_interval(ctx, k, 1, 20)) < 1e-12


def test_routes_agree_on_seeded_query():
    ctx = make_field_ctx(101)
    kset = make_set(ctx, "random", seed=1, size=3)
    mset = make_set(ctx, "random", seed=2, size=3)
    zeta = np.asarray(random_unimodular(3, 1))
    q = TrilinearQuery(10, kset, mset, quadratic_index(ctx), zeta=zeta)
    direct = trilinear_direct(ctx, q)
    assert abs(direct - triple_loop(ctx, 10, kset, mset, quadratic_index(ctx), zeta=zeta)) < 1e-10
    theta = trilinear_via_theta(ctx, 10, kset, mset, quadratic_index(ctx), zeta=zeta)
    assert abs(direct - theta) <= 1e-9 * abs(direct)


def test_routes_small_case(ctx5):
    full = MSet(5, (1, 2, 3, 4))
    q = TrilinearQuery(4, MSet(5, (1,)), full, 1)
    assert abs(trilinear_direct(ctx5, q) - trilinear_via_theta(ctx5, 4, MSet(5, (1,)), full, 1)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([7, 11, 101]), st.integers(0, 2**32 - 1))
def test_weighted_direct_matches_loop(p, seed):
    ctx = make_field_ctx(p)
    rng = np.random.default_rng(seed)
    H = int(rng.integers(1, min(p, 12)))
    kset = make_set(ctx, "random", seed=seed, size=int(rng.integers(1, 5)))
    mset = make_set(ctx, "random", seed=seed + 1, size=int(rng.integers(1, 5)))
    chi = int(rng.integers(1, p - 1))
    a, z, e = (np.asarray(random_unimodular(n, seed + i)) for i, n in enumerate((H, kset.M, mset.M)))
    q = TrilinearQuery(H, kset, mset, chi, alpha=a, zeta=z, eta=e)
    w = trilinear_direct(ctx, q)
    assert abs(w - triple_loop(ctx, H, kset, mset, chi, a, z, e)) < 1e-9
    assert abs(w) <= q.trivial + 1e-9
    # conjugate character with conjugated weights gives the conjugate sum
    qc = TrilinearQuery(H, kset, mset, conj_index(ctx, chi), alpha=a.conj(), zeta=z.conj(), eta=e.conj())
    assert abs(trilinear_direct(ctx, qc) - w.conjugate()) < 1e-9


def test_theta_route_rejects_weights():
    ctx = make_field_ctx(11)
    s = MSet(11, (1, 2))
    with pytest.raises(WeightedInput):
        trilinear_via_theta(ctx, 3, s, s, 1, alpha=[1, 1j, 1])
    with pytest.raises(WeightedInput):
        trilinear_via_theta(ctx, 3, s, s, 1, eta=[1, -1])
    assert trilinear_via_theta(ctx, 3, s, s, 1, eta=[1, 1]) == trilinear_via_theta(ctx, 3, s, s, 1)


def test_query_validation():
    s = MSet(11, (1, 2))
    with pytest.raises(PrincipalCharacter):
        TrilinearQuery(3, s, s, 0)
    with pytest.raises(ValueError):
        TrilinearQuery(3, s, s, 1, alpha=np.ones(2))
    with pytest.raises(ValueError):
        TrilinearQuery(3, s, s, 1, zeta=np.array([2.0, 1.0]))


def test_s_chi_examples():
    p = 101
    ctx = make_field_ctx(p)
    # sum_{x=0}^{p-2} chi(x) = -chi(p-1)
    for chi in (1, 50, 77):
        assert s_chi_double(ctx, chi, p - 1, MSet(p, (p - 1,))) == pytest.approx(1.0, abs=1e-9)
    mset = make_set(ctx, "random", seed=1, size=10)
    chi = quadratic_index(ctx)
    val = s_chi_double(ctx, chi, 10, mset)
    again = sum(abs(sum(eval_char(ctx, chi, h + m) for h in range(1, 11))) for m in mset)
    assert val == pytest.approx(again, abs=1e-9)
    assert 0 <= val <= 100
    with pytest.raises(PrincipalCharacter):
        s_chi_double(ctx, 0, 10, mset)


def trilinear_formula(p, H, K, M, L):
    return H * K * M * (p ** (-1 / (2 * L)) + (H * M) ** (-1 / (2 * L)) + H ** (-1 / L)) * (
        p ** (1 / (4 * L)) + K ** -0.5 * p ** (1 / (2 * L)))


@pytest.mark.parametrize("p, H, K, M, L", [(1009, 100, 50, 9, 1), (1009, 100, 50, 9, 3), (10007, 500, 20, 15, 2)])
def test_trilinear_bound_arithmetic(p, H, K, M, L):
    rep = bound_trilinear(p, H, K, M, L, FLAT)
    assert rep.bound == pytest.approx(trilinear_formula(p, H, K, M, L), rel=1e-12)
    assert rep.flags["M_hypothesis"] == (M <= p ** (1 / 3))
    with pytest.raises(BadEll):
        bound_trilinear(p, H, K, M, 0)


def test_trilinear_nontrivial_flags():
    p = 10 ** 6 + 3
    f = trilinear_nontrivial_conditions(p, H=2000, K=100, M=50, eps=0.05, o1=FLAT)
    assert f == {"K_large": True, "M_small": True, "HM_large": True, "H_large": True, "all": True, "M_boundary": False}
    f = trilinear_nontrivial_conditions(p, H=20, K=1, M=200, eps=0.05, o1=FLAT)
    assert not f["K_large"] and not f["M_small"] and not f["H_large"] and not f["all"]


def test_measured_exponent():
    assert measured_exponent(50.0, 50.0, 101) == 0.0
    assert measured_exponent(50.0 / 101, 50.0, 101) == pytest.approx(1.0)
    for bad in ((0.0, 1.0, 101), (1.0, 0.0, 101), (1.0, 2.0, 2), (3.0, 2.0, 101)):
        with pytest.raises(DomainError):
            measured_exponent(*bad)
    ctx = make_field_ctx(1009)
    kset = make_set(ctx, "random", seed=3, size=50)
    mset = make_set(ctx, "random", seed=4, size=9)
    q = TrilinearQuery(100, kset, mset, quadratic_index(ctx))
    w = abs(trilinear_direct(ctx, q))
    k = measured_exponent(w, q.trivial, 1009)
    assert k == pytest.approx(math.log(45000 / w) / math.log(1009))
    assert k > 0


def test_boundary_flag_marks_o1_slack():
    f = trilinear_nontrivial_conditions(1009, H=200, K=50, M=11, o1=FLAT)
    assert not f["M_small"] and not f["M_boundary"]
    f = trilinear_nontrivial_conditions(1009, H=200, K=50, M=11)
    assert f["M_small"] and f["M_boundary"]
    assert not trilinear_nontrivial_conditions(1009, H=200, K=50, M=10)["M_boundary"]
