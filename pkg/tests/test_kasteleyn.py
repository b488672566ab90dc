import itertools

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from asmtw.combinatorics import count_asm, enumerate_matchings, tsscpp_graph
from asmtw.kasteleyn import (
    FaceParityError, InverseEntryRequest, assembled_inverse, build_kasteleyn, check_face_parity,
    dense_inverse, inverse_residual, kasteleyn_pfaffian, kinverse, kinverse_entry, local_stat_prob,
    s_integral, s_integral_quadrature, t_matrix,
)
from asmtw.kernel import kernel_block


def test_signed_pfaffians():
    assert [int(kasteleyn_pfaffian(n)) for n in range(1, 5)] == [2, -7, -42, 429]


@pytest.mark.parametrize("n", range(1, 7))
def test_pfaffian_counts_asms(n):
    assert abs(int(kasteleyn_pfaffian(n))) == count_asm(n + 1)


def test_faces_have_odd_ccw_arrows():
    for n in range(1, 5):
        k = build_kasteleyn(n)
        check_face_parity(k)
        for length, ccw, cw in k.face_report():
            assert ccw + cw == length and ccw % 2 == 1


def test_face_parity_detects_flip():
    k = build_kasteleyn(2)
    g = k.graph
    u, v = g.edges[0]
    a, b = g.index[u], g.index[v]
    rows = [list(r) for r in k.entries]
    rows[a][b], rows[b][a] = -rows[a][b], -rows[b][a]
    flipped = type(k)(k.n, g, tuple(tuple(r) for r in rows))
    with pytest.raises(FaceParityError):
        check_face_parity(flipped)


def test_kasteleyn_is_skew_and_supported_on_edges():
    k = build_kasteleyn(3)
    g = k.graph
    for x, y in itertools.product(g.vertices, repeat=2):
        assert k(x, y) == -k(y, x)
        assert (k(x, y) != 0) == g.has_edge(x, y)


@pytest.mark.parametrize("n", range(1, 5))
def test_assembled_inverse_exact(n):
    assert inverse_residual(n) == 0
    assert assembled_inverse(n) == dense_inverse(n)


def test_closed_form_entry_matches_dense():
    n = 3
    dense = dense_inverse(n)
    g = tsscpp_graph(n)
    inner = [v for v in g.vertices if v[0] <= 2 * n - 1]
    for x, y in itertools.product(inner[::3], inner[::2]):
        req = InverseEntryRequest.from_vertices(n, x, y)
        assert kinverse_entry(n, req) == dense[g.index[x]][g.index[y]]


def test_inverse_request_validation():
    with pytest.raises(ValueError):
        InverseEntryRequest(2, 0, 0, 2, 0, 0, 0)
    with pytest.raises(ValueError):
        InverseEntryRequest(2, 4, 0, 0, 0, 0, 0)


def test_t_matrix_variants():
    with pytest.raises(ValueError):
        t_matrix(2, "22", 0, 0)
    # t^{11} is antisymmetric in its indices
    for i, j in itertools.product(range(5), repeat=2):
        assert t_matrix(2, "11", i, j) == -t_matrix(2, "11", j, i)


@given(st.integers(0, 10), st.integers(0, 10))
def test_s_integral_against_quadrature(l1, l2):
    q = s_integral_quadrature(l1, l2)
    assert abs(q - s_integral(l1, l2)) < 1e-10


def enumeration_freq(n, edges):
    ms = enumerate_matchings(n)
    return mpq(sum(all(m.covers(u, v) for u, v in edges) for m in ms), len(ms))


@pytest.mark.parametrize("n", [2, 3])
def test_single_edge_probabilities(n):
    for u, v in tsscpp_graph(n).edges:
        assert local_stat_prob(n, [(u, v)]) == enumeration_freq(n, [(u, v)])


def test_edge_pair_probabilities():
    n = 3
    edges = tsscpp_graph(n).edges
    pairs = [(e, f) for e, f in itertools.combinations(edges, 2) if not set(e) & set(f)]
    for e, f in pairs[::7]:
        assert local_stat_prob(n, [e, f]) == enumeration_freq(n, [e, f])


def test_local_stat_rejects_non_edges():
    with pytest.raises(ValueError):
        local_stat_prob(2, [((0, 0), (3, 3))])
    with pytest.raises(ValueError):
        local_stat_prob(2, [((0, 0), (0, 1)), ((0, 1), (0, 2))])


@pytest.mark.parametrize("n", [2, 3, 4])
def test_kernel_from_inverse(n):
    for x, y in itertools.product(range(n), repeat=2):
        b = kernel_block(n, x, y)
        assert b.f11 == -kinverse(n, (x, x + 1), (y, y + 1))
        assert b.f22 == -kinverse(n, (x, x + 2), (y, y + 2))
        assert b.f12 == int(x == y) - kinverse(n, (x, x + 1), (y, y + 2))
