import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from congsum.characters import (
    all_char_sums,
    char_sum_interval,
    char_sum_set,
    check_rounding,
    conj_index,
    eval_char,
    orthogonality_sum,
    quadratic_index,
    weil_sum,
)
from congsum.errors import (
    BadInterval,
    IndexOutOfRange,
    NotCoprime,
    NotSquareFree,
    PrincipalCharacter,
    RoundingDrift,
)
from congsum.field import make_field_ctx
from congsum.harness import random_weil_pair
from congsum.poly import PolyFp, are_coprime, is_square_free, poly_gcd
from conftest import primes


def test_eval_char_examples(ctx5):
    assert eval_char(ctx5, 0, 3) == 1
    for k in range(4):
        assert eval_char(ctx5, k, 0) == 0
    # g = 2 mod 5, ind[2] = 1, chi_1(2) = exp(2 pi i / 4)
    assert ctx5.g == 2
    assert abs(eval_char(ctx5, 1, 2) - 1j) < 1e-15
    with pytest.raises(IndexOutOfRange):
        eval_char(ctx5, 4, 1)


def test_interval_sums(ctx5):
    assert abs(char_sum_interval(ctx5, 0, 0, 4) - 4) < 1e-12
    assert abs(char_sum_interval(ctx5, 1, 0, 4)) < 1e-12
    assert abs(char_sum_interval(ctx5, 1, 0, 2) - (1 + 1j)) < 1e-12
    with pytest.raises(BadInterval):
        char_sum_interval(ctx5, 1, 0, 5)


def test_set_sums(ctx5, ctx7):
    assert abs(char_sum_set(ctx7, 0, [1, 2, 4]) - 3) < 1e-12
    for k in range(1, 6):
        assert abs(char_sum_set(ctx7, k, range(1, 7))) < 1e-12
    assert abs(char_sum_set(ctx5, 1, [1, 4])) < 1e-12


def test_orthogonality_examples():
    ctx = make_field_ctx(7)
    assert orthogonality_sum(ctx, 1) == 6
    assert orthogonality_sum(ctx, 3) == 0
    assert orthogonality_sum(make_field_ctx(3), 2) == 0


@given(primes)
def test_dual_orthogonality(p):
    ctx = make_field_ctx(p)
    assert [orthogonality_sum(ctx, z) for z in range(1, p)] == [p - 1] + [0] * (p - 2)


@given(primes, st.data())
def test_complete_interval_and_conjugation(p, data):
    ctx = make_field_ctx(p)
    k = data.draw(st.integers(1, p - 2)) if p > 3 else 1
    assert abs(char_sum_interval(ctx, k, 0, p - 1)) < 1e-8 * p
    els = data.draw(st.sets(st.integers(1, p - 1), min_size=1))
    s = char_sum_set(ctx, k, els)
    assert abs(char_sum_set(ctx, conj_index(ctx, k), els) - s.conjugate()) < 1e-12


@given(primes, st.data())
def test_character_is_multiplicative(p, data):
    ctx = make_field_ctx(p)
    k = data.draw(st.integers(0, p - 2))
    x = data.draw(st.integers(1, p - 1))
    y = data.draw(st.integers(1, p - 1))
    assert abs(eval_char(ctx, k, x * y) - eval_char(ctx, k, x) * eval_char(ctx, k, y)) < 1e-12
    assert abs(abs(eval_char(ctx, k, x)) - 1) < 1e-12


@given(primes, st.data())
def test_all_char_sums_match_direct(p, data):
    ctx = make_field_ctx(p)
    els = sorted(data.draw(st.sets(st.integers(1, p - 1), min_size=1)))
    fast = all_char_sums(ctx, np.array(els))
    direct = [char_sum_set(ctx, k, els) for k in range(p - 1)]
    assert np.allclose(fast, direct, atol=1e-9)


def test_check_rounding():
    assert check_rounding(6.0000001, 101) == 6
    with pytest.raises(RoundingDrift):
        check_rounding(6.3, 101)


# -- polynomials ------------------------------------------------------------------


def test_poly_basics():
    f = PolyFp(5, (1, 0, 1, 0, 0))
    assert f.coeffs == (1, 0, 1) and f.degree == 2
    assert PolyFp(5, (0, 5)).degree == -math.inf
    assert [f(a) for a in range(5)] == [1, 2, 0, 0, 2]
    assert list(f.eval_all()) == [1, 2, 0, 0, 2]
    assert f.derivative().coeffs == (0, 2)


def test_square_free_and_gcd():
    p = 7
    x = PolyFp(p, (0, 1))
    one = PolyFp(p, (1,))
    assert is_square_free(x) and is_square_free(one)
    assert not is_square_free(x * x)
    # (X-1)(X-2) and (X-2)(X-3) share X-2
    a = PolyFp(p, (-1, 1)) * PolyFp(p, (-2, 1))
    b = PolyFp(p, (-2, 1)) * PolyFp(p, (-3, 1))
    assert poly_gcd(a, b).coeffs == (5, 1)
    assert not are_coprime(a, b)
    assert are_coprime(a, PolyFp(p, (-3, 1)))


@given(primes, st.data())
def test_divmod_reconstructs(p, data):
    coeffs = st.lists(st.integers(0, p - 1), min_size=1, max_size=7)
    a = PolyFp(p, data.draw(coeffs))
    b = PolyFp(p, data.draw(coeffs))
    if b.is_zero():
        return
    q, r = divmod(a, b)
    assert (q * b).coeffs == _sub(a, r, p)
    assert r.is_zero() or r.degree < b.degree


def _sub(a, b, p):
    n = max(len(a.coeffs), len(b.coeffs))
    pad = lambda c: list(c) + [0] * (n - len(c))
    return PolyFp(p, [x - y for x, y in zip(pad(a.coeffs), pad(b.coeffs))]).coeffs


# -- Weil sums ----------------------------------------------------------------------


def test_weil_examples():
    ctx = make_field_ctx(7)
    value, bound = weil_sum(ctx, 1, PolyFp(7, (0, 1)), PolyFp(7, (1,)))
    assert abs(value) < 1e-12 and bound == pytest.approx(math.sqrt(7))
    # quadratic character mod 5 on X^2 + 1: values 1, -1, 0, 0, -1 at a = 0..4
    ctx5 = make_field_ctx(5)
    value, bound = weil_sum(ctx5, 2, PolyFp(5, (1, 0, 1)), PolyFp(5, (1,)))
    assert abs(value - (-1)) < 1e-12
    assert abs(value) <= 2 * math.sqrt(5) == bound
    with pytest.raises(NotSquareFree):
        weil_sum(ctx, 1, PolyFp(7, (0, 0, 1)), PolyFp(7, (1,)))
    with pytest.raises(NotCoprime):
        weil_sum(ctx, 1, PolyFp(7, (0, 1)), PolyFp(7, (0, 3)))
    with pytest.raises(PrincipalCharacter):
        weil_sum(ctx, 0, PolyFp(7, (0, 1)), PolyFp(7, (1,)))


def test_weil_sum_matches_pointwise():
    ctx = make_field_ctx(11)
    f, g = PolyFp(11, (1, 1, 1)), PolyFp(11, (5, 1))
    value, _ = weil_sum(ctx, 3, f, g)
    direct = sum(eval_char(ctx, 3, f(a)) * eval_char(ctx, 3, g(a)).conjugate() for a in range(11))
    assert abs(value - direct) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([5, 7, 11, 13, 101, 1009]), st.integers(0, 2**32 - 1))
def test_weil_corpus_constant(p, seed):
    ctx = make_field_ctx(p)
    rng = np.random.default_rng(seed)
    f, g = random_weil_pair(p, 6, rng)
    k = int(rng.integers(1, p - 1))
    value, bound = weil_sum(ctx, k, f, g)
    assert abs(value) <= 1.5 * bound


def test_quadratic_index(ctx7):
    k = quadratic_index(ctx7)
    assert [round(eval_char(ctx7, k, x).real) for x in range(1, 7)] == [1, 1, -1, 1, -1, -1]
