from fractions import Fraction

import numpy as np
import pytest
import gmpy2
from gmpy2 import mpfr, mpq
from hypothesis import given, settings, strategies as st

from asmtw.pfaffian import (
    check_skew, determinant, inverse, leading_pfaffians, matmul, pfaffian, pfaffian_float,
)


def random_skew(rng, n, lo=-5, hi=5):
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = int(rng.integers(lo, hi + 1))
            a[i][j], a[j][i] = v, -v
    return a


def pf_expand(a):
    # expansion along the first row; exponential, fine for n <= 8
    n = len(a)
    if n == 0:
        return 1
    total = 0
    for j in range(1, n):
        rest = [k for k in range(n) if k not in (0, j)]
        sub = [[a[r][c] for c in rest] for r in rest]
        total += (-1) ** (j + 1) * a[0][j] * pf_expand(sub)
    return total


def test_small_cases():
    assert pfaffian([]) == 1
    assert pfaffian([[0, 3], [-3, 0]]) == 3
    a = [[0, 1, 2, 3], [-1, 0, 4, 5], [-2, -4, 0, 6], [-3, -5, -6, 0]]
    assert pfaffian(a) == 1 * 6 - 2 * 5 + 3 * 4


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        pfaffian([[0]])
    with pytest.raises(ValueError):
        pfaffian([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        check_skew([[0, 1, 2], [-1, 0]])


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.sampled_from([2, 4, 6, 8]))
def test_pfaffian_matches_expansion_and_det(seed, n):
    rng = np.random.default_rng(seed)
    a = random_skew(rng, n)
    pf = pfaffian([[mpq(v) for v in r] for r in a])
    assert pf == pf_expand(a)
    assert pf * pf == determinant([[mpq(v) for v in r] for r in a])


@settings(max_examples=30)
@given(st.integers(0, 10**6))
def test_sparse_matrix_needs_pivoting(seed):
    rng = np.random.default_rng(seed)
    a = random_skew(rng, 6, -1, 1)
    assert pfaffian([[Fraction(v) for v in r] for r in a]) == pf_expand(a)


def test_float_and_bigfloat_agree_with_exact():
    rng = np.random.default_rng(3)
    a = random_skew(rng, 10)
    exact = pfaffian([[mpq(v) for v in r] for r in a])
    assert abs(pfaffian_float(np.array(a, dtype=float)) - float(exact)) <= 1e-9 * abs(float(exact))
    with gmpy2.context(gmpy2.get_context(), precision=200):
        big = pfaffian([[mpfr(v) for v in r] for r in a])
        assert abs(big - exact) <= abs(exact) * mpfr("1e-50")


def test_leading_pfaffians():
    rng = np.random.default_rng(5)
    a = [[mpq(v) for v in r] for r in random_skew(rng, 8, 1, 9)]
    lead = leading_pfaffians(a)
    for k, v in enumerate(lead, 1):
        sub = [row[:2 * k] for row in a[:2 * k]]
        assert v == pfaffian(sub)


def test_inverse_and_matmul():
    a = [[mpq(2), mpq(1)], [mpq(5), mpq(3)]]
    inv = inverse(a, one=mpq(1))
    assert matmul(a, inv) == [[1, 0], [0, 1]]
    assert determinant(a) == 1
