import itertools

import gmpy2
import mpmath as mp
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from asmtw.combinatorics import asm_to_pcsm, enumerate_asm, enumerate_matchings, histogram, particles, top_path
from asmtw.kernel import (
    PrecisionPolicy, correlation, g_bar, gap_probabilities, gap_probability, h_bar,
    h_bar_cumsum, h_bar_literal, kappa_range, kernel_block, kernel_tables, law_of_max_T,
    law_of_x, p_coeff,
)
from asmtw.pfaffian import pfaffian

MATCHINGS = {n: enumerate_matchings(n) for n in range(1, 6)}


def contour_oracle(n, l, x, extra=False):
    """Trapezoid-free mpmath quadrature of the defining contour integral."""
    def S(m, w, y):
        return (mp.gamma(m + w + 2) * mp.gamma(2 * m - w + 2) * mp.gamma(2 * m - 2 * w + 1)
                * (3 * m - 3 * w + 2) * mp.rgamma(m + w - y + 1) * mp.rgamma(3 * m - w + 3)
                * mp.rgamma(y - 2 * w + 1))

    def G(w):
        p = mp.mpf(1)
        for j in range(l, n + 1):
            p *= w - j
        v = S(n - l, w - l, x - 2 * l) / ((n - w + 1) * p)
        return v * (n - w + 1) / (n + w - x) if extra else v

    c = mp.mpf(x // 2) / 2
    r = c + mp.mpf(1) / 2
    f = lambda t: G(c + r * mp.expj(t)) * r * mp.expj(t)
    return complex(mp.quad(f, [0, mp.pi / 2, mp.pi, 3 * mp.pi / 2, 2 * mp.pi]) / (2 * mp.pi))


def freq(n, pred):
    ms = MATCHINGS[n]
    return mpq(sum(1 for m in ms if pred(set(particles(m)))), len(ms))


def test_p_coeff_identities():
    f = gmpy2.fac
    assert p_coeff(1, 0, 0) == mpq(f(2) * f(3) * 5 * 1, f(0) * f(5))
    assert p_coeff(3, 2, 1) == -p_coeff(2, 1, 0)
    for n in range(1, 7):
        for k in range(n + 1):
            for l in range(k + 1):
                assert p_coeff(n, k, l) == (-1) ** l * p_coeff(n - l, k - l, 0)
            for l in range(k + 1, n + k + 2):
                if l < (n + k + 1) / 2:
                    assert p_coeff(n, k, l) == 0
    with pytest.raises(ValueError):
        p_coeff(2, 3, 0)


def test_g_bar_vanishes_beyond_half():
    assert g_bar(5, 3, 4) == 0
    for n in range(1, 8):
        for x in range(n):
            for l in range(x // 2 + 1, n + 1):
                assert g_bar(n, l, x) == 0 and h_bar(n, l, x) == 0


def test_shift_law():
    for n in range(2, 8):
        for x in range(n):
            for l in range(x // 2 + 1):
                assert g_bar(n, l, x) == g_bar(n - l, 0, x - 2 * l)
                assert h_bar(n, l, x) == h_bar(n - l, 0, x - 2 * l)


@pytest.mark.parametrize("n,x", [(2, 0), (2, 1), (4, 2), (5, 3), (6, 5)])
def test_g_bar_matches_contour_quadrature(n, x):
    for l in range(x // 2 + 1):
        q = contour_oracle(n, l, x)
        assert abs(q - float(g_bar(n, l, x))) < 1e-10


@pytest.mark.parametrize("n,x", [(2, 0), (2, 1), (5, 3)])
def test_face_value_h_integral_is_not_the_kernel_h(n, x):
    # the literal contour integral is h_bar_literal; the kernel needs the binomial form
    q = contour_oracle(n, 0, x, extra=True)
    assert abs(q - float(h_bar_literal(n, 0, x))) < 1e-10
    assert h_bar_literal(n, 0, x) != h_bar(n, 0, x)


def test_h_bar_cumsum():
    n = 5
    for l in range(3):
        for x in range(2 * l, n):
            direct = sum((h_bar(n, l, x - m) for m in range(x - 2 * l + 1)), mpq(0))
            assert h_bar_cumsum(n, l, x) == direct
            if x > 2 * l:
                assert h_bar_cumsum(n, l, x) - h_bar_cumsum(n, l, x - 1) == h_bar(n, l, x)
    assert h_bar_cumsum(n, 0, 0) == h_bar(n, 0, 0)


def test_f12_diagonal_n2():
    assert kernel_block(2, 0, 0).f12 == mpq(2, 7)


@pytest.mark.parametrize("n", range(1, 11))
def test_antisymmetry(n):
    for x, y in itertools.product(range(n), repeat=2):
        b, c = kernel_block(n, x, y), kernel_block(n, y, x)
        assert b.f11 == -c.f11 and b.f22 == -c.f22 and b.f21 == -c.f12
    assert all(kernel_block(n, x, x).f11 == 0 for x in range(n))


@pytest.mark.parametrize("n", [3, 6, 9, 10])
def test_kappa_independence(n):
    for x, y in itertools.product(range(n), repeat=2):
        ref = kernel_block(n, x, y).as_matrix()
        kmin = min(x // 2, y // 2)
        for kappa in list(kappa_range(n, x, y)) + [kmin, n]:
            assert kernel_block(n, x, y, kappa).as_matrix() == ref


@pytest.mark.parametrize("n", range(1, 6))
def test_one_and_two_point_correlations(n):
    for x in range(n):
        assert correlation(n, [x]) == freq(n, lambda p: x in p)
    for x, y in itertools.combinations(range(n), 2):
        assert correlation(n, [x, y]) == freq(n, lambda p: x in p and y in p)


@pytest.mark.parametrize("n", [4, 5])
def test_three_point_correlations(n):
    for pts in itertools.combinations(range(n), 3):
        assert correlation(n, pts) == freq(n, lambda p: set(pts) <= p)


def test_gap_examples():
    assert gap_probability(2, 1) == mpq(5, 7)
    assert gap_probability(2, 2) == mpq(1, 7)
    assert gap_probability(3, 0) == 1


@pytest.mark.parametrize("n", range(1, 6))
def test_gaps_match_enumeration(n):
    gaps = gap_probabilities(n)
    for s in range(n + 1):
        want = freq(n, lambda p: not p & set(range(s)))
        assert gap_probability(n, s) == gaps[s] == want


def test_gap_monotone_in_unit_interval():
    gaps = gap_probabilities(12)
    assert all(0 <= g <= 1 for g in gaps)
    assert all(a >= b for a, b in zip(gaps, gaps[1:]))


def test_law_of_max_T_n2():
    assert law_of_max_T(2) == {-1: mpq(1, 7), 0: mpq(4, 7), 1: mpq(2, 7)}
    assert law_of_x(2) == {1: mpq(2, 7), 2: mpq(4, 7), 3: mpq(1, 7)}


def test_law_of_max_T_matches_top_paths():
    n = 5
    hist = histogram(top_path(asm_to_pcsm(a)).maximum for a in enumerate_asm(n + 1))
    total = sum(hist.values())
    law = law_of_max_T(n)
    assert sum(law.values()) == 1
    assert law == {t: mpq(c, total) for t, c in hist.items()}


def test_bigfloat_matches_exact():
    pol = PrecisionPolicy("bigfloat", 128)
    for n in (10, 30, 50):
        ex, bf = gap_probabilities(n), gap_probabilities(n, pol)
        assert max(abs(a - mpq(b)) for a, b in zip(ex, bf)) < mpq(1, 10 ** 20)



def test_bigfloat_law_keeps_precision():
    ex, bf = law_of_x(12), law_of_x(12, PrecisionPolicy("bigfloat", 200))
    assert all(v.precision == 200 for v in bf.values())
    assert max(abs(ex[m] - mpq(bf[m])) for m in ex) < mpq(1, 10 ** 50)


@settings(max_examples=10, deadline=None)
@given(st.integers(6, 20), st.integers(64, 256))
def test_bigfloat_spot_check(n, bits):
    pol = PrecisionPolicy("bigfloat", bits)
    s = n // 2
    assert abs(mpq(gap_probability(n, s, pol)) - gap_probability(n, s)) < mpq(1, 10 ** 15)


def test_policy_validation():
    with pytest.raises(ValueError):
        PrecisionPolicy("float")
    with pytest.raises(ValueError):
        PrecisionPolicy("bigfloat", 32)
    with pytest.raises(ValueError):
        gap_probability(3, 4)
    with pytest.raises(ValueError):
        kernel_block(3, 3, 0)


# -- rejected readings of the formulas ------------------------------------


def f22_x_limit(n, x, y):
    """f22 with the last single sum cut at x, as printed."""
    t = kernel_tables(n)
    H = t.H
    sgn_n = -1 if n % 2 else 1
    cut = H[0][y] - (H[0][y - x - 1] if y - x - 1 >= 0 else 0)
    b = kernel_block(n, x, y)
    return b.f22 - sgn_n * H[0][y] + sgn_n * cut


def test_x_limit_variant_breaks_antisymmetry():
    n = 5
    bad = [(x, y) for x, y in itertools.product(range(n), repeat=2)
           if f22_x_limit(n, x, y) != -f22_x_limit(n, y, x)]
    assert bad
    # and agrees with the kernel whenever x >= y
    assert all(f22_x_limit(n, x, y) == kernel_block(n, x, y).f22
               for x in range(n) for y in range(x + 1))


def test_literal_h_gives_wrong_correlations():
    n = 4
    L = kernel_tables(n).L

    def hc(l, x):
        if 2 * l > x:
            return mpq(0)
        return sum((h_bar_literal(n, l, x - m) for m in range(x - 2 * l + 1)), mpq(0))

    def block(x, y):
        sgn_n = -1 if n % 2 else 1
        f11 = kernel_block(n, x, y).f11
        f22 = ((x > y) - (x < y) + sum(hc(l + 1, x) * hc(l, y) - hc(l, x) * hc(l + 1, y) for l in range(L))
               - sgn_n * hc(0, x) + sgn_n * hc(0, y))
        f12 = sgn_n * g_bar(n, 0, x) - sum(g_bar(n, l + 1, x) * hc(l, y) - g_bar(n, l, x) * hc(l + 1, y)
                                          for l in range(L))
        return f11, f12, f22

    def corr(pts):
        m = [[None] * (2 * len(pts)) for _ in range(2 * len(pts))]
        for a, x in enumerate(pts):
            for b, y in enumerate(pts):
                f11, f12, f22 = block(x, y)
                f21 = -block(y, x)[1]
                m[2 * a][2 * b], m[2 * a][2 * b + 1] = f11, f12
                m[2 * a + 1][2 * b], m[2 * a + 1][2 * b + 1] = f21, f22
        return pfaffian(m)

    sets = [c for k in (1, 2) for c in itertools.combinations(range(n), k)]
    mismatches = [c for c in sets if corr(list(c)) != freq(n, lambda p: set(c) <= p)]
    assert (2,) in mismatches
