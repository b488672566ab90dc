"""Kasteleyn matrix of the TSSCPP dimer graph and its exact inverse.

The inverse is available two ways: a closed form built from binomial
residue sums (``kinverse_entry``) and dense exact inversion
(``dense_inverse``), which serves as a cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

from gmpy2 import mpq

from .combinatorics import TsscppGraph, ValidationError, Vertex, tsscpp_graph
from .kernel import p_coeff
from .pfaffian import inverse, pfaffian


class FaceParityError(RuntimeError):
    """The constructed orientation is not a Kasteleyn orientation."""


def _k_raw(x: Vertex, y: Vertex) -> int:
    x1, x2 = x
    y1, y2 = y
    if (x1 + x2) % 2 == 0:
        if x2 == y2 and x1 - y1 == 1:
            return 1
        if abs(y2 - x2) == 1 and x1 == y1:
            return 1
    if x1 == x2 and y1 == y2 == x1 - 1:
        return 1
    return 0


def kasteleyn_entry(x: Vertex, y: Vertex) -> int:
    """``k(x, y) - k(y, x)``; arrows point from ``x`` to ``y`` when positive."""
    return _k_raw(x, y) - _k_raw(y, x)


@dataclass(frozen=True)
class KasteleynMatrix:
    n: int
    graph: TsscppGraph = field(repr=False)
    entries: tuple[tuple[int, ...], ...] = field(repr=False)

    def __call__(self, x: Vertex, y: Vertex) -> int:
        idx = self.graph.index
        return self.entries[idx[x]][idx[y]]

    def as_mpq(self) -> list[list]:
        return [[mpq(v) for v in row] for row in self.entries]

    def face_report(self) -> list[tuple[int, int, int]]:
        """``(face length, counter-clockwise arrows, clockwise arrows)`` per bounded face."""
        out = []
        for face in self.graph.faces():
            ccw = cw = 0
            for u, v in zip(face, face[1:] + face[:1]):
                s = self(u, v)
                if s > 0:
                    ccw += 1
                elif s < 0:
                    cw += 1
            out.append((len(face), ccw, cw))
        return out


def check_face_parity(k: KasteleynMatrix) -> None:
    """Every bounded face must carry an odd number of counter-clockwise arrows.

    This is the mirror image of the usual clockwise-odd rule (reversing every
    arrow swaps the two), so it is equally a Pfaffian orientation.
    """
    for length, ccw, cw in k.face_report():
        if ccw + cw != length:
            raise FaceParityError("face boundary contains a non-edge")
        if ccw % 2 == 0:
            raise FaceParityError(f"face of length {length} has {ccw} counter-clockwise arrows")


@lru_cache(maxsize=None)
def build_kasteleyn(n: int) -> KasteleynMatrix:
    g = tsscpp_graph(n)
    verts = g.vertices
    rows = []
    for x in verts:
        rows.append(tuple(kasteleyn_entry(x, y) if g.has_edge(x, y) else 0 for y in verts))
    for x in verts:
        for y in verts:
            if kasteleyn_entry(x, y) != 0 and not g.has_edge(x, y):
                raise FaceParityError(f"orientation puts weight on non-edge {x}-{y}")
    k = KasteleynMatrix(n, g, tuple(rows))
    check_face_parity(k)
    return k


def kasteleyn_pfaffian(n: int):
    return pfaffian(build_kasteleyn(n).as_mpq())


# ---------------------------------------------------------------------------
# Closed-form inverse
# ---------------------------------------------------------------------------


def _binom(a: int, b: int) -> int:
    """Binomial coefficient, zero outside ``0 <= b <= a``."""
    if b < 0 or a < 0 or b > a:
        return 0
    return comb(a, b)


def _gen_binom(a: int, b: int) -> int:
    """``a`` choose ``b`` for any integer ``a`` and ``b >= 0``."""
    if b < 0:
        return 0
    if a >= 0:
        return comb(a, b) if b <= a else 0
    return (-1) ** b * comb(b - a - 1, b)


def _r1(n: int, k: int, i: int) -> int:
    # residue at 0 of (1+r)^(n-k) / r^(i-2k+1)
    return _binom(n - k, i - 2 * k)


def _r0(n: int, k: int, i: int) -> int:
    # residue at 0 of (1+r)^(n-k) / ((1-r) r^(i-2k)), |r| < 1
    return sum(comb(n - k, m) for m in range(0, min(i - 2 * k, n - k + 1))) if i - 2 * k > 0 else 0


@lru_cache(maxsize=None)
def _a_tables(n: int):
    """``A_e[l][i] = sum_k p(n,k,l) R_e(k,i)`` for ``e`` in {0,1}."""
    size = 2 * n + 1
    a0 = [[mpq(0)] * size for _ in range(n + 2)]
    a1 = [[mpq(0)] * size for _ in range(n + 2)]
    for l in range(n + 1):
        for k in range(l, n + 1):
            p = p_coeff(n, k, l)
            if p == 0:
                continue
            for i in range(size):
                r0 = _r0(n, k, i)
                r1 = _r1(n, k, i)
                if r0:
                    a0[l][i] += p * r0
                if r1:
                    a1[l][i] += p * r1
    return a0, a1


def _check_index(n: int, i: int):
    if not 0 <= i <= 2 * n:
        raise ValueError(f"index {i} outside [0, {2 * n}]")


def h0b(n: int, i: int) -> mpq:
    _check_index(n, i)
    return -((i + 1) % 2) + _a_tables(n)[0][0][i]


def h1b(n: int, i: int) -> mpq:
    _check_index(n, i)
    return _a_tables(n)[1][0][i]


def s_integral(l1: int, l2: int) -> int:
    """Value of the double ``s``-contour integral with kernel
    ``(s1 - s2) / ((s1 s2 - 1) s1^(l1+1) s2^(l2+1))``."""
    return int(l2 == l1 + 1) - int(l2 == l1 - 1)


def s_integral_quadrature(l1: int, l2: int, radius: float = 0.5, nodes: int = 64) -> complex:
    """The same double integral by the trapezoid rule on two circles ``|s| = radius``."""
    import numpy as np

    if radius * radius >= 1:
        raise ValueError("need radius < 1 so that s1 s2 = 1 stays outside")
    th = 2 * np.pi * np.arange(nodes) / nodes
    z = radius * np.exp(1j * th)
    s1, s2 = z[:, None], z[None, :]
    f = (s1 - s2) / ((s1 * s2 - 1) * s1 ** (l1 + 1) * s2 ** (l2 + 1))
    # ds = i s dtheta on each circle; the (2 pi i)^2 cancels against i^2 (2 pi / N)^2
    return complex((f * s1 * s2).sum() / nodes ** 2)


def _quad_part(n: int, e1: int, e2: int, i: int, j: int) -> mpq:
    tabs = _a_tables(n)
    a, b = tabs[e1], tabs[e2]
    total = mpq(0)
    for l in range(n + 1):
        total += a[l][i] * b[l + 1][j] - a[l + 1][i] * b[l][j]
    return total


def t_matrix(n: int, variant: str, i: int, j: int) -> mpq:
    _check_index(n, i)
    _check_index(n, j)
    ev = lambda v: (v + 1) % 2  # [v+1]_2
    od = lambda v: v % 2  # [v]_2
    if variant == "11":
        return _quad_part(n, 1, 1, i, j)
    if variant == "10":
        return ev(j) * h1b(n, i) + _quad_part(n, 1, 0, i, j)
    if variant == "01":
        return -ev(i) * h1b(n, j) + _quad_part(n, 0, 1, i, j)
    if variant == "00":
        return (int(i < j) * ev(i) * od(j) - int(i > j) * od(i) * ev(j)
                + ev(j) * h0b(n, i) - ev(i) * h0b(n, j) + _quad_part(n, 0, 0, i, j))
    raise ValueError(f"unknown variant {variant!r}")


@dataclass(frozen=True)
class InverseEntryRequest:
    """A pair of vertices in the coordinates ``(i1, i1 + 2 i2 + eps)``."""

    n: int
    i1: int
    i2: int
    eps_i: int
    j1: int
    j2: int
    eps_j: int

    def __post_init__(self):
        n = self.n
        for a1, a2, e in ((self.i1, self.i2, self.eps_i), (self.j1, self.j2, self.eps_j)):
            if e not in (0, 1):
                raise ValidationError("eps must be 0 or 1")
            if not 0 <= a1 <= 2 * n - 1:
                raise ValidationError(f"first coordinate {a1} outside [0, {2 * n - 1}]")
            if not 0 <= a2 <= n - (a1 + e) // 2:
                raise ValidationError(f"offset {a2} outside [0, {n - (a1 + e) // 2}]")

    @classmethod
    def from_vertices(cls, n: int, x: Vertex, y: Vertex) -> "InverseEntryRequest":
        def split(v):
            d = v[1] - v[0]
            return v[0], d // 2, d % 2

        return cls(n, *split(x), *split(y))


def _kinv_formula(n, i1, i2, ei, j1, j2, ej) -> mpq:
    sgn = -1 if (i2 + j2) % 2 else 1
    total = mpq(0)
    if ei == 1 and ej == 1:
        for l1 in range(i1 + 1):
            c1 = _gen_binom(i2 - 1 + l1, l1)
            if c1 == 0:
                continue
            for l2 in range(j1 + 1):
                c2 = _gen_binom(j2 - 1 + l2, l2)
                if c2:
                    total += (-1) ** (l1 + l2) * c1 * c2 * t_matrix(n, "11", i1 - l1, j1 - l2)
        return sgn * total
    if ei == 0 and ej == 0:
        for l1 in range(i2 + 1):
            for l2 in range(j2 + 1):
                total += comb(i2, l1) * comb(j2, l2) * t_matrix(n, "00", i1 + l1, j1 + l2)
        return sgn * total
    if ei == 1 and ej == 0:
        for l1 in range(i1 + 1):
            c1 = _gen_binom(i2 - 1 + l1, l1)
            if c1 == 0:
                continue
            for l2 in range(j2 + 1):
                total += (-1) ** l1 * c1 * comb(j2, l2) * t_matrix(n, "10", i1 - l1, j1 + l2)
        x1, x2 = i1, i1 + 2 * i2 + 1
        y1, y2 = j1, j1 + 2 * j2
        if x1 >= y1 and x1 + x2 < y1 + y2:
            total -= _binom(j2 - i2 - 1, i1 - j1)
        return sgn * total
    return -_kinv_formula(n, j1, j2, ej, i1, i2, ei)


def kinverse_entry(n: int, req: InverseEntryRequest) -> mpq:
    """Entry ``K_n^{-1}(x, y)`` from the closed form; both vertices need ``x1 <= 2n-1``."""
    return _kinv_formula(n, req.i1, req.i2, req.eps_i, req.j1, req.j2, req.eps_j)


def kinverse(n: int, x: Vertex, y: Vertex) -> mpq:
    return kinverse_entry(n, InverseEntryRequest.from_vertices(n, x, y))


@lru_cache(maxsize=None)
def dense_inverse(n: int) -> tuple[tuple[mpq, ...], ...]:
    """Exact inverse of ``K_n`` by Gauss-Jordan elimination over the rationals."""
    inv = inverse(build_kasteleyn(n).as_mpq(), one=mpq(1))
    return tuple(tuple(row) for row in inv)


@lru_cache(maxsize=None)
def assembled_inverse(n: int) -> tuple[tuple[mpq, ...], ...]:
    """``K_n^{-1}`` from the closed form, with the rows and columns of the last
    column of vertices (``x1 = 2n``) recovered from ``K K^{-1} = I``."""
    k = build_kasteleyn(n)
    g = k.graph
    verts = g.vertices
    N = len(verts)
    inner = [a for a, v in enumerate(verts) if v[0] <= 2 * n - 1]
    outer = [a for a, v in enumerate(verts) if v[0] == 2 * n]
    inv = [[None] * N for _ in range(N)]
    for a in inner:
        for b in inner:
            if b < a:
                continue
            val = kinverse(n, verts[a], verts[b])
            inv[a][b] = val
            inv[b][a] = -val
    K = k.entries

    def solve_from_row(r, o, b):
        # row r of K touches the unknown inv[o][b] and otherwise only known entries
        acc = mpq(int(r == b))
        for c in range(N):
            if c != o and K[r][c] != 0:
                acc -= K[r][c] * inv[c][b]
        return acc / K[r][o]

    for o in outer:
        r = next((r for r in range(N) if [c for c in outer if K[r][c]] == [o]), None)
        if r is None:
            raise RuntimeError("could not recover the last column of the inverse")
        for b in inner:
            inv[o][b] = solve_from_row(r, o, b)
            inv[b][o] = -inv[o][b]
        inv[o][o] = mpq(0)
    if len(outer) == 2:
        o1, o2 = outer
        r = next(r for r in range(N) if [c for c in outer if K[r][c]] == [o2])
        inv[o2][o1] = solve_from_row(r, o2, o1)
        inv[o1][o2] = -inv[o2][o1]
    return tuple(tuple(row) for row in inv)


def inverse_residual(n: int, inv=None) -> mpq:
    """Largest absolute entry of ``K_n K_n^{-1} - I`` (exactly zero when correct)."""
    K = build_kasteleyn(n).entries
    inv = assembled_inverse(n) if inv is None else inv
    N = len(K)
    worst = mpq(0)
    for r in range(N):
        nz = [(c, K[r][c]) for c in range(N) if K[r][c]]
        for b in range(N):
            v = sum((w * inv[c][b] for c, w in nz), mpq(0)) - int(r == b)
            if abs(v) > worst:
                worst = abs(v)
    return worst


# ---------------------------------------------------------------------------
# Local statistics
# ---------------------------------------------------------------------------


def local_stat_prob(n: int, edges, inv=None) -> mpq:
    """Probability that all given edges are covered by a uniform perfect matching."""
    g = tsscpp_graph(n)
    k = build_kasteleyn(n)
    inv = assembled_inverse(n) if inv is None else inv
    pts: list[Vertex] = []
    for u, v in edges:
        u, v = tuple(u), tuple(v)
        if not g.has_edge(u, v):
            raise ValidationError(f"{(u, v)} is not an edge")
        pts += [u, v]
    if len(set(pts)) != len(pts):
        raise ValidationError("edges share a vertex")
    if not pts:
        return mpq(1)
    sign = 1
    for a in range(0, len(pts), 2):
        sign *= k(pts[a], pts[a + 1])
    idx = g.index
    # transpose of (K^{-1}(v_i, v_j))
    m = [[inv[idx[pts[b]]][idx[pts[a]]] for b in range(len(pts))] for a in range(len(pts))]
    return sign * pfaffian(m)
