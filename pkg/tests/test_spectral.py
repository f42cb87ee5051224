from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subrank.combinatorics import krawchouk
from subrank.gf2 import (
    canonicalize,
    iter_elements,
    orthogonal_complement,
    random_subspace,
    random_subspace_codim,
    subspace_from_ints,
)
from subrank.spectral import (
    CheckResult,
    binomial_ratio_bounds_check,
    binomial_ratio_bounds_report,
    convolution_identity_check,
    f_nc,
    indicator_table,
    kkl_subspace_check,
    kkl_subspace_report,
    lemma1_instance_check,
    lemma1_instance_report,
    lemma1_lhs,
    lemma2_instance_check,
    lemma2_instance_report,
    middle_krawchouk_closed,
    pair_count_fourier,
    robbins_check,
    robbins_report,
    subspace_indicator_hat,
    sumratio_check,
    sumratio_lhs,
    sumratio_optimal_constant_report,
    sumratio_report,
    walsh_transform,
)


def dot(x, y):
    return (x & y).bit_count() & 1


def walsh_oracle(f):
    N = len(f)
    return [Fraction(sum(Fraction(f[x]) * (-1) ** dot(z, x) for x in range(N)), N) for z in range(N)]


# -- Walsh transform -----------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 5).flatmap(lambda n: st.lists(st.integers(-9, 9), min_size=1 << n, max_size=1 << n)))
def test_walsh_exact_matches_definition(f):
    assert list(walsh_transform(f)) == walsh_oracle(f)


def test_walsh_float_and_inverse():
    rng = np.random.default_rng(61)
    f = rng.normal(size=32)
    W = walsh_transform(f)
    assert np.allclose(W, [float(v) for v in walsh_oracle([Fraction(x) for x in f])])
    # the transform is an involution up to 2^n
    assert np.allclose(walsh_transform(W) * 32, f)


def test_walsh_rejects_bad_length():
    with pytest.raises(ValueError):
        walsh_transform([1, 2, 3])
    with pytest.raises(ValueError):
        walsh_transform([])


def test_walsh_fractions_stay_exact():
    W = walsh_transform([Fraction(1, 3), 0, 0, Fraction(2, 3)])
    assert list(W) == [Fraction(1, 4), Fraction(-1, 12), Fraction(-1, 12), Fraction(1, 4)]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-5, 5), min_size=1 << n, max_size=1 << n),
    st.lists(st.integers(-5, 5), min_size=1 << n, max_size=1 << n))))
def test_convolution_identity_exact(fg):
    f, g = fg
    assert convolution_identity_check(f, g)


def test_convolution_identity_float_and_failure():
    rng = np.random.default_rng(67)
    f, g = rng.normal(size=16), rng.normal(size=16)
    assert convolution_identity_check(f, g)
    with pytest.raises(ValueError):
        convolution_identity_check([1, 2], [1, 2, 3, 4])


def test_indicator_hat_matches_transform():
    rng = random.Random(71)
    for _ in range(20):
        n = rng.randint(1, 8)
        V = random_subspace(n, rng.randint(0, n), rng)
        W = walsh_transform(indicator_table(V))
        hat = subspace_indicator_hat(V)
        assert {z for z in range(1 << n) if W[z]} == set(hat)
        assert all(W[z] == v for z, v in hat.items())


# -- Krawchouk -----------------------------------------------------------

@pytest.mark.parametrize("n", [1, 3, 5, 7, 9, 11, 13, 15])
def test_middle_krawchouk_closed_small(n):
    for t in range(n + 1):
        assert middle_krawchouk_closed(n, t) == krawchouk(n, (n - 1) // 2, t)


def test_middle_krawchouk_examples():
    # K_1^3(t) = 3 - 2t
    assert [middle_krawchouk_closed(3, t) for t in range(4)] == [3, 1, -1, -3]
    with pytest.raises(ValueError):
        middle_krawchouk_closed(4, 0)
    with pytest.raises(ValueError):
        middle_krawchouk_closed(5, 6)


# -- KKL corollary -------------------------------------------------------

def dual_weights_oracle(V):
    n = V.n
    members = list(iter_elements(V))
    counts = [0] * (n + 1)
    for y in range(1 << n):
        if all(dot(x, y) == 0 for x in members):
            counts[y.bit_count()] += 1
    return counts


def test_kkl_rows_against_bruteforce():
    rng = random.Random(73)
    for _ in range(30):
        n = rng.randint(4, 11)
        V = random_subspace(n, rng.randint(0, n - 2), rng)
        rep = kkl_subspace_report(V)
        c = n - V.dim
        assert rep.c == c and rep.holds is True and kkl_subspace_check(V)
        wd = dual_weights_oracle(V)
        assert [r.params["t"] for r in rep.rows] == list(range(1, math.floor(math.log(2) * c) + 1))
        for r in rep.rows:
            t = r.params["t"]
            assert r.detail == {"weight_t": wd[t], "weight_n_minus_t": wd[n - t]}
            bound = (2 * math.e * math.log(2) * c / t) ** t
            assert r.rhs.contains(Fraction(bound)) or abs(float(r.rhs) - bound) < 1e-9 * bound


def test_kkl_axis_family_counts():
    # dual of "first n-d coordinates vanish" is spanned by those coordinates: C(c, t) words of weight t
    for n in range(4, 16):
        for d in range(0, n - 1):
            V = subspace_from_ints(n, [1 << j for j in range(d)])
            c = n - d
            rep = kkl_subspace_report(V)
            for r in rep.rows:
                t = r.params["t"]
                assert r.detail["weight_t"] == math.comb(c, t)
                assert Fraction(c, t) ** t <= math.comb(c, t)
            assert rep.holds is True


def test_kkl_rejects_small_codimension():
    with pytest.raises(ValueError):
        kkl_subspace_report(random_subspace(6, 5, random.Random(1)))


# -- Fourier pair count --------------------------------------------------

def pair_count_oracle(n, V):
    w = (n - 1) // 2
    members = set(iter_elements(V))
    xs = [x for x in range(1 << n) if x.bit_count() == w]
    return sum((x ^ y) in members for x in xs for y in xs)


def test_pair_count_fourier_against_oracle():
    rng = random.Random(79)
    for _ in range(40):
        n = rng.choice([3, 5, 7, 9])
        V = random_subspace(n, rng.randint(0, n), rng)
        assert pair_count_fourier(n, V) == pair_count_oracle(n, V)


def test_pair_count_fourier_rejects():
    with pytest.raises(ValueError):
        pair_count_fourier(4, random_subspace(4, 2, random.Random(2)))
    with pytest.raises(ValueError):
        pair_count_fourier(5, random_subspace(7, 2, random.Random(3)))


# -- lemma instances -----------------------------------------------------

def test_f_nc_encloses_float():
    for n, c in [(59, 2), (101, 8), (1001, 50)]:
        v = f_nc(n, c)
        expected = 16 * c * c / n**2 + (math.e * math.log(2) * c / n) ** (math.log(2) * c)
        assert float(v) == pytest.approx(expected, rel=1e-12)
        assert v.width < Fraction(1, 2**150)
    with pytest.raises(ValueError):
        f_nc(59, 1)


def test_lemma1_lhs_against_float_oracle():
    rng = random.Random(83)
    for _ in range(10):
        n = rng.choice([25, 37, 49])
        V = random_subspace_codim(n, 2, rng)
        D = orthogonal_complement(V)
        counts = [0] * (n + 1)
        for z in iter_elements(D):
            counts[z.bit_count()] += 1
        h = (n - 1) // 2
        oracle = sum(math.comb(h, t // 2) ** 2 / math.comb(n, t) ** 2 * counts[t] for t in range(1, n))
        assert float(lemma1_lhs(n, V)) == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("n,c", [(59, 2), (59, 4), (77, 6), (101, 8)])
def test_lemma1_instances(n, c):
    rng = random.Random(f"lem1:{n}:{c}")
    for _ in range(5):
        V = random_subspace_codim(n, c, rng)
        rep = lemma1_instance_report(n, V)
        assert rep.holds is True and lemma1_instance_check(n, V)
        assert rep.params == {"n": n, "c": c}
        assert rep.lhs <= rep.rhs.lo


def test_lemma1_range_checks():
    rng = random.Random(5)
    with pytest.raises(ValueError):
        lemma1_instance_report(60, random_subspace_codim(60, 2, rng))
    with pytest.raises(ValueError):
        lemma1_instance_report(59, random_subspace_codim(59, 5, rng))
    with pytest.raises(ValueError):
        lemma1_instance_report(59, random_subspace_codim(61, 2, rng))


def lemma2_oracle(n, c):
    with mpmath.workdps(80):
        f = mpmath.mpf(16 * c * c) / n**2 + (mpmath.e * mpmath.log(2) * c / n) ** (mpmath.log(2) * c)
        rhs = mpmath.mpf(2) ** c * mpmath.mpf(math.comb(n, (n - 1) // 2)) ** (mpmath.mpf(1 - c) / (n - 1))
        return 2 + f <= rhs


@pytest.mark.parametrize("n", [59, 61, 83, 101, 201])
def test_lemma2_against_oracle(n):
    for c in range(2, n // 12 + 1):
        rep = lemma2_instance_report(n, c)
        assert rep.holds == lemma2_oracle(n, c)
        assert rep.holds is True and lemma2_instance_check(n, c)


def test_lemma2_range_checks():
    with pytest.raises(ValueError):
        lemma2_instance_report(57, 2)
    with pytest.raises(ValueError):
        lemma2_instance_report(59, 5)


# -- binomial ratio bounds -----------------------------------------------

def bounds_oracle(n, m):
    out = {}
    if 3 * m <= n:
        lhs = math.lgamma(n // 2 + 1) - math.lgamma(m + 1) - math.lgamma(n // 2 - m + 1) \
            - (math.lgamma(n + 2) - math.lgamma(2 * m + 2) - math.lgamma(n - 2 * m + 1))
        rhs = math.log(2) + (m + 1) * math.log((2 * m + 1) / (2 * (n - m + 1)))
        out["first"] = (lhs, rhs)
    if 1 <= m and 3 * m <= n + 1:
        lhs = math.lgamma(n // 2 + 1) - math.lgamma(m + 1) - math.lgamma(n // 2 - m + 1) \
            - (math.lgamma(n + 2) - math.lgamma(2 * m + 1) - math.lgamma(n - 2 * m + 2))
        rhs = m * math.log(m / (n - m + 1))
        out["second"] = (lhs, rhs)
    return out


@pytest.mark.parametrize("n", [2, 4, 10, 30, 100, 300])
def test_binomial_ratio_bounds_against_log_oracle(n):
    for m in range(0, (n + 1) // 3 + 1):
        rep = binomial_ratio_bounds_report(n, m)
        oracle = bounds_oracle(n, m)
        assert set(rep.detail) == set(oracle)
        for key, (lhs, rhs, ok) in rep.detail.items():
            lo, ro = oracle[key]
            assert math.log(lhs) == pytest.approx(lo, abs=1e-9)
            assert math.log(rhs) == pytest.approx(ro, abs=1e-9)
            assert ok
        assert binomial_ratio_bounds_check(n, m)


def test_binomial_ratio_bounds_small_values():
    rep = binomial_ratio_bounds_report(4, 1)
    # first: C(2,1)/C(5,3) = 1/5 <= 2 (3/8)^2 = 9/32; second: C(2,1)/C(5,2) = 1/5 <= 1/4
    assert rep.detail["first"] == (Fraction(1, 5), Fraction(9, 32), True)
    assert rep.detail["second"] == (Fraction(1, 5), Fraction(1, 4), True)
    with pytest.raises(ValueError):
        binomial_ratio_bounds_report(5, 1)
    with pytest.raises(ValueError):
        binomial_ratio_bounds_report(4, 3)


# -- partial sum ratio ---------------------------------------------------

def test_sumratio_small_value():
    # k = 4, s = 2: (1 + 4) / (1 + 6)
    assert sumratio_lhs(4, 2) == Fraction(5, 7)


@pytest.mark.parametrize("k", [4, 8, 20, 64, 150])
def test_sumratio_against_oracle(k):
    for s in range(2, k // 2 + 1, 2):
        rep = sumratio_report(k, s)
        with mpmath.workdps(50):
            bound = 4 / mpmath.sqrt(mpmath.pi) * mpmath.sqrt(mpmath.mpf(k) / (s * (k - s)))
            oracle = mpmath.mpf(sumratio_lhs(k, s).numerator) / sumratio_lhs(k, s).denominator <= bound
        assert rep.holds == oracle
        assert sumratio_check(k, s)


def test_sumratio_optimal_constant_is_informational():
    rep = sumratio_optimal_constant_report(40, 10)
    assert isinstance(rep, CheckResult) and rep.name == "sumratio-sqrt2/pi"
    assert rep.holds in (True, False, None)


def test_sumratio_rejects():
    for k, s in [(5, 2), (8, 3), (8, 0), (8, 6)]:
        with pytest.raises(ValueError):
            sumratio_report(k, s)


# -- Stirling bounds -----------------------------------------------------

def test_robbins_first_values():
    rep = robbins_report(1)
    lo, hi = rep.rhs
    # sqrt(2 pi) e^-1 e^(1/13) = 0.99587..., sqrt(2 pi) e^-1 e^(1/12) = 1.00227...
    assert float(lo) == pytest.approx(0.995870, abs=1e-6)
    assert float(hi) == pytest.approx(1.002274, abs=1e-6)
    assert rep.holds is True


@pytest.mark.parametrize("n", [1, 2, 3, 10, 50, 170, 500])
def test_robbins_against_log_oracle(n):
    base = 0.5 * math.log(2 * math.pi * n) + n * math.log(n) - n
    mid = math.lgamma(n + 1)
    assert base + 1 / (12 * n + 1) < mid < base + 1 / (12 * n)
    assert robbins_check(n)


def test_robbins_rejects():
    with pytest.raises(ValueError):
        robbins_report(0)


def test_check_result_truthiness():
    assert not CheckResult("x", {}, None, 0, 0)
    assert not CheckResult("x", {}, False, 0, 0)
    assert CheckResult("x", {}, True, 0, 0)


def test_zero_subspace_kkl_and_fourier():
    V = canonicalize(["00000"])
    assert pair_count_fourier(5, V) == math.comb(5, 2)
    assert kkl_subspace_check(V)
    assert len(list(itertools.islice(iter_elements(orthogonal_complement(V)), 40))) == 32
