import json
from math import factorial

import pytest
from hypothesis import given, strategies as st

from asmtw.combinatorics import (
    AsmMatrix, CapExceeded, GogTrapezoid, MagogTrapezoid, PcsmMatrix, TopPath, ValidationError,
    asm_to_gog, asm_to_pcsm, catalan, count_asm, count_gog_trapezoids, count_magog_trapezoids,
    enumerate_asm, enumerate_matchings, from_dict, from_json, gog_to_asm, gog_to_pcsm, histogram,
    iter_gog_trapezoids, iter_magog_trapezoids, iter_pcsm, magog_to_matching, matching_to_magog,
    particles, pcsm_to_asm, to_json, top_path, trapezoid_slices, tsscpp_graph, x_gog,
    x_gog_from_triangle, x_magog,
)
from asmtw.verify import ASM_COUNTS, TRAPEZOID_TABLE

ASMS = {n: enumerate_asm(n) for n in range(1, 6)}


def product_formula(n):
    num = den = 1
    for j in range(n):
        num *= factorial(3 * j + 1)
        den *= factorial(n + j)
    return num // den


def test_asm_counts_match_product_formula():
    for n in range(1, 7):
        assert count_asm(n) == ASM_COUNTS[n] == product_formula(n)
    assert count_asm(7) == 218348
    assert [len(ASMS[n]) for n in range(1, 6)] == [1, 2, 7, 42, 429]


def test_asm_validation():
    with pytest.raises(ValidationError):
        AsmMatrix([[1, 0], [1, 0]])
    with pytest.raises(ValidationError):
        AsmMatrix([[0, 1, 0], [1, 0, 0], [0, 1, 0]])
    with pytest.raises(ValidationError):
        AsmMatrix([[-1, 1, 1], [1, 0, 0], [1, 0, -1]])
    AsmMatrix([[0, 1, 0], [1, -1, 1], [0, 1, 0]])


def test_pcsm_validation():
    PcsmMatrix([[1, 2], [1, 1]])
    with pytest.raises(ValidationError):
        PcsmMatrix([[0, 2], [1, 1]])
    with pytest.raises(ValidationError):
        PcsmMatrix([[2, 2], [0, 2]])


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        enumerate_asm(7)
    with pytest.raises(CapExceeded):
        enumerate_matchings(4, cap=3)


def test_catalan():
    assert [catalan(k) for k in range(7)] == [1, 1, 2, 5, 14, 42, 132]


@pytest.mark.parametrize("n", range(1, 7))
def test_trapezoid_table(n):
    for k in range(1, n + 1):
        g = count_gog_trapezoids(n, k)
        assert g == count_magog_trapezoids(n, k) == TRAPEZOID_TABLE[n][k - 1]


def test_trapezoid_dp_matches_listing():
    for n in range(1, 5):
        for k in range(1, n + 1):
            assert count_gog_trapezoids(n, k) == sum(1 for _ in iter_gog_trapezoids(n, k))
            assert count_magog_trapezoids(n, k) == sum(1 for _ in iter_magog_trapezoids(n, k))


def test_diagonal_is_asm_count_and_first_column_catalan():
    for n in range(1, 7):
        assert TRAPEZOID_TABLE[n][-1] == count_asm(n + 1)
        assert TRAPEZOID_TABLE[n][0] == catalan(n + 1)


def test_gog_trapezoid_entry_cap():
    # the cap n+1-(i-j) is what separates trapezoids from triangles with a free corner
    with pytest.raises(ValidationError):
        GogTrapezoid(2, 1, [[3], [3]])
    GogTrapezoid(2, 1, [[3], [2]])


asm_strategy = st.integers(2, 5).flatmap(lambda n: st.sampled_from(ASMS[n]))


@given(asm_strategy)
def test_bijections_roundtrip(a):
    c, g = asm_to_pcsm(a), asm_to_gog(a)
    assert pcsm_to_asm(c) == a
    assert gog_to_asm(g) == a
    assert gog_to_pcsm(g) == c


@given(asm_strategy)
def test_observables_agree(a):
    c, g = asm_to_pcsm(a), asm_to_gog(a)
    assert x_gog(c) == x_gog_from_triangle(g)
    tp = top_path(c)
    assert tp.maximum == c.n - x_gog(c)
    assert tp[-c.n] == (0 if c[1, 1] == c.n - 1 else -1)


def test_x_histogram_n2():
    # n = 2 PCSMs come from 3x3 ASMs
    assert histogram(x_gog(asm_to_pcsm(a)) for a in ASMS[3]) == {1: 2, 2: 4, 3: 1}
    assert histogram(x_magog(m) for m in enumerate_matchings(2)) == {1: 2, 2: 4, 3: 1}


@pytest.mark.parametrize("n", range(1, 5))
def test_x_laws_equal(n):
    gog = histogram(x_gog(c) for c in iter_pcsm(n))
    magog = histogram(x_magog(m) for m in enumerate_matchings(n))
    assert gog == magog


def test_particles_first_is_x_minus_one():
    for m in enumerate_matchings(3):
        ps = particles(m)
        assert (ps[0] + 1 if ps else 4) == x_magog(m)


def test_matching_magog_bijection():
    for n in range(1, 4):
        ms = enumerate_matchings(n)
        mags = {matching_to_magog(m) for m in ms}
        assert len(mags) == len(ms) == count_magog_trapezoids(n, n)
        for m in ms:
            assert magog_to_matching(matching_to_magog(m)) == m


def test_tsscpp_graph_sizes():
    for n in range(1, 5):
        g = tsscpp_graph(n)
        assert len(g.vertices) % 2 == 0
        assert list(g.vertices) == sorted(g.vertices)
        assert all(u < v for u, v in g.edges)


def test_trapezoid_slices():
    for n in range(1, 5):
        for m in range(n + 1):
            gog, magog = trapezoid_slices(n, m)
            assert gog == magog


def test_top_path_validation():
    with pytest.raises(ValidationError):
        TopPath(1, [0, 2, 0])
    with pytest.raises(ValidationError):
        TopPath(2, [0, 0, 0])


def test_serialization_roundtrip():
    objs = [ASMS[3][4], asm_to_pcsm(ASMS[4][7]), asm_to_gog(ASMS[4][7]),
            MagogTrapezoid(2, 2, [[2], [2, 2]]), enumerate_matchings(2)[3], top_path(asm_to_pcsm(ASMS[4][1]))]
    for o in objs:
        text = to_json(o)
        assert from_json(text) == o
        assert from_dict(json.loads(text)) == o
    with pytest.raises(ValueError):
        from_dict({"type": "Nope"})
