"""Alternating sign matrices, path corner sum matrices, gog/magog arrays and
TSSCPP dimer coverings, together with the bijections and observables that
connect them.

All public interfaces use 1-based (row, column) indices for matrices and
triangular arrays.  Vertices of the dimer graph use their integer plane
coordinates ``(x1, x2)``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, factorial, prod
from typing import Iterable, Iterator

DEFAULT_ENUMERATION_CAP = 6
DEFAULT_TRAPEZOID_CAP = 7


class ValidationError(ValueError):
    """Raised when an object violates one of its defining constraints."""


class CapExceeded(ValueError):
    """Raised when an exhaustive computation is asked for beyond its cap."""


def _as_rows(entries: Iterable[Iterable[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in entries)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsmMatrix:
    """Alternating sign matrix of order ``n``."""

    entries: tuple[tuple[int, ...], ...]
    n: int = field(init=False)

    def __post_init__(self):
        rows = _as_rows(self.entries)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "n", len(rows))
        problem = _asm_violation(rows)
        if problem:
            raise ValidationError(problem)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i - 1][j - 1]

    def to_dict(self) -> dict:
        return {"type": "AsmMatrix", "n": self.n, "entries": [list(r) for r in self.entries]}


def _asm_violation(rows) -> str | None:
    n = len(rows)
    if n == 0:
        return "order must be positive"
    for i, row in enumerate(rows, 1):
        if len(row) != n:
            return f"row {i} has length {len(row)}, expected {n}"
        if any(v not in (-1, 0, 1) for v in row):
            return f"row {i} has an entry outside {{-1,0,1}}"
    lines = [(f"row {i}", row) for i, row in enumerate(rows, 1)]
    lines += [(f"column {j}", [rows[i][j - 1] for i in range(n)]) for j in range(1, n + 1)]
    for name, line in lines:
        nz = [v for v in line if v]
        if sum(nz) != 1:
            return f"{name} sums to {sum(nz)}"
        if any(nz[k] == nz[k + 1] for k in range(len(nz) - 1)):
            return f"{name} does not alternate in sign"
    return None


@dataclass(frozen=True)
class PcsmMatrix:
    """Path corner sum matrix of size ``n`` (the heights ``c_{i,j}``)."""

    entries: tuple[tuple[int, ...], ...]
    n: int = field(init=False)

    def __post_init__(self):
        rows = _as_rows(self.entries)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "n", len(rows))
        problem = _pcsm_violation(rows)
        if problem:
            raise ValidationError(problem)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i - 1][j - 1]

    def to_dict(self) -> dict:
        return {"type": "PcsmMatrix", "n": self.n, "entries": [list(r) for r in self.entries]}


def _pcsm_violation(rows) -> str | None:
    n = len(rows)
    if n == 0:
        return "size must be positive"
    for i, row in enumerate(rows, 1):
        if len(row) != n:
            return f"row {i} has length {len(row)}, expected {n}"
    for i in range(n):
        if rows[0][i] not in (n - 1, n):
            return f"c[1,{i + 1}] = {rows[0][i]} not in {{{n - 1},{n}}}"
        if rows[i][n - 1] not in (n - 1, n):
            return f"c[{i + 1},{n}] = {rows[i][n - 1]} not in {{{n - 1},{n}}}"
    for i in range(n):
        for j in range(n - 1):
            if rows[i][j + 1] - rows[i][j] not in (0, 1):
                return f"c[{i + 1},{j + 2}] - c[{i + 1},{j + 1}] not in {{0,1}}"
    for i in range(n - 1):
        for j in range(n):
            if rows[i][j] - rows[i + 1][j] not in (0, 1):
                return f"c[{i + 1},{j + 1}] - c[{i + 2},{j + 1}] not in {{0,1}}"
    return None


def asm_to_pcsm(a: AsmMatrix) -> PcsmMatrix:
    """Corner-sum map from ``A_{n+1}`` to ``C_n``."""
    n = a.n - 1
    if n < 1:
        raise ValidationError("ASM order must be at least 2 to give a non-empty PCSM")
    # cs[i][s] = sum_{r<=i, t<=s} a[r,t]
    cs = [[0] * (n + 2) for _ in range(n + 2)]
    for i in range(1, n + 2):
        for s in range(1, n + 2):
            cs[i][s] = cs[i - 1][s] + cs[i][s - 1] - cs[i - 1][s - 1] + a[i, s]
    return PcsmMatrix([[n - cs[i][n + 1 - j] for j in range(1, n + 1)] for i in range(1, n + 1)])


def _padded_heights(c: PcsmMatrix) -> list[list[int]]:
    """Heights c[i][j] for 0 <= i, j <= n+1 including the boundary padding."""
    n = c.n
    pad = [[n] * (n + 2) for _ in range(n + 2)]
    for i in range(n + 2):
        pad[i][0] = n - i
        pad[n + 1][n + 1 - i] = n - i
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            pad[i][j] = c[i, j]
    return pad


def pcsm_to_asm(c: PcsmMatrix) -> AsmMatrix:
    n = c.n
    h = _padded_heights(c)
    rows = []
    for i in range(1, n + 2):
        rows.append([
            h[i - 1][n + 1 - j] - h[i][n + 1 - j] - h[i - 1][n + 2 - j] + h[i][n + 2 - j]
            for j in range(1, n + 2)
        ])
    return AsmMatrix(rows)


# ---------------------------------------------------------------------------
# Gog and magog arrays
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GogTrapezoid:
    """An ``(n, k)``-gog trapezoid; ``k == n`` is a monotone triangle.

    ``rows[i-1]`` holds ``g_{i,1} < ... < g_{i,min(i,k)}``.
    """

    n: int
    k: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = _as_rows(self.rows)
        object.__setattr__(self, "rows", rows)
        problem = _gog_violation(self.n, self.k, rows)
        if problem:
            raise ValidationError(problem)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i - 1][j - 1]

    def to_dict(self) -> dict:
        return {"type": "GogTrapezoid", "n": self.n, "k": self.k, "entries": [list(r) for r in self.rows]}


def _gog_violation(n, k, rows) -> str | None:
    if n < 0 or not 0 <= k <= n:
        return f"need 0 <= k <= n, got n={n}, k={k}"
    if len(rows) != n:
        return f"expected {n} rows, got {len(rows)}"
    for i, row in enumerate(rows, 1):
        if len(row) != min(i, k):
            return f"row {i} has length {len(row)}, expected {min(i, k)}"
        for j, v in enumerate(row, 1):
            # the removed bottom-right corner holds its maximal entries, which
            # caps g[i,j] at n+1-(i-j); for triangles this is implied anyway
            if not 1 <= v <= n + 1 - (i - j):
                return f"g[{i},{j}] = {v} outside [1,{n + 1 - (i - j)}]"
            if j > 1 and row[j - 2] >= v:
                return f"g[{i},{j - 1}] < g[{i},{j}] violated"
        if i > 1:
            above = rows[i - 2]
            for j in range(1, len(row) + 1):
                if j <= len(above) and row[j - 1] > above[j - 1]:
                    return f"g[{i},{j}] <= g[{i - 1},{j}] violated"
                if j + 1 <= len(row) and j <= len(above) and above[j - 1] > row[j]:
                    return f"g[{i - 1},{j}] <= g[{i},{j + 1}] violated"
    return None


@dataclass(frozen=True)
class MagogTrapezoid:
    """An ``(n, k)``-magog trapezoid; ``rows[i-1]`` holds ``m_{i,j}`` for
    ``max(1, i-k+1) <= j <= i`` in increasing ``j``."""

    n: int
    k: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = _as_rows(self.rows)
        object.__setattr__(self, "rows", rows)
        problem = _magog_violation(self.n, self.k, rows)
        if problem:
            raise ValidationError(problem)

    def first_column(self, i: int) -> int:
        return max(1, i - self.k + 1)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        j0 = self.first_column(i)
        if not j0 <= j <= i:
            raise IndexError(ij)
        return self.rows[i - 1][j - j0]

    def to_dict(self) -> dict:
        return {"type": "MagogTrapezoid", "n": self.n, "k": self.k, "entries": [list(r) for r in self.rows]}


def _magog_violation(n, k, rows) -> str | None:
    if n < 0 or not 0 <= k <= n:
        return f"need 0 <= k <= n, got n={n}, k={k}"
    if len(rows) != n:
        return f"expected {n} rows, got {len(rows)}"

    def cell(i, j):
        j0 = max(1, i - k + 1)
        return rows[i - 1][j - j0] if j0 <= j <= i else None

    for i, row in enumerate(rows, 1):
        expected = i - max(1, i - k + 1) + 1 if k else 0
        if len(row) != max(expected, 0):
            return f"row {i} has length {len(row)}, expected {max(expected, 0)}"
    for i in range(1, n + 1):
        for j in range(max(1, i - k + 1), i + 1):
            v = cell(i, j)
            if not 1 <= v <= j + 1:
                return f"m[{i},{j}] = {v} outside [1,{j + 1}]"
            if i < n:
                diag = cell(i + 1, j + 1)
                if diag is not None and v > diag:
                    return f"m[{i},{j}] <= m[{i + 1},{j + 1}] violated"
                below = cell(i + 1, j)
                if below is not None and v < below:
                    return f"m[{i},{j}] >= m[{i + 1},{j}] violated"
    return None


def asm_to_gog(a: AsmMatrix) -> GogTrapezoid:
    """Monotone triangle of order ``n`` from an ASM of order ``n + 1``."""
    n = a.n - 1
    b = [0] * (n + 1)
    rows = []
    for i in range(1, n + 1):
        for j in range(n + 1):
            b[j] += a[i, j + 1]
        rows.append([j + 1 for j in range(n + 1) if b[j] == 1])
    return GogTrapezoid(n, n, rows)


def gog_to_asm(g: GogTrapezoid) -> AsmMatrix:
    if g.k != g.n:
        raise ValidationError(f"gog trapezoid with k={g.k} < n={g.n} is not a monotone triangle")
    n = g.n
    prev = [0] * (n + 1)
    rows = []
    for i in range(1, n + 2):
        cur = [0] * (n + 1)
        if i <= n:
            for v in g.rows[i - 1]:
                cur[v - 1] = 1
        else:
            cur = [1] * (n + 1)
        rows.append([cur[j] - prev[j] for j in range(n + 1)])
        prev = cur
    return AsmMatrix(rows)


def gog_to_pcsm(g: GogTrapezoid) -> PcsmMatrix:
    """Direct formula ``c_{i,j} = n - #{t : g_{i,t} <= n+1-j}``."""
    n = g.n
    if g.k != n:
        raise ValidationError("need a monotone triangle")
    return PcsmMatrix([[n - sum(1 for v in g.rows[i] if v <= n + 1 - j) for j in range(1, n + 1)]
                       for i in range(n)])


# ---------------------------------------------------------------------------
# The TSSCPP dimer graph
# ---------------------------------------------------------------------------

Vertex = tuple[int, int]
Edge = tuple[Vertex, Vertex]


@dataclass(frozen=True)
class TsscppGraph:
    """The graph ``G_n^m`` with its plane embedding.

    Vertices are sorted lexicographically by ``(x1, x2)``; this order fixes the
    row/column order of the Kasteleyn matrix.  Edges are stored with the
    lexicographically smaller endpoint first.
    """

    n: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    index: dict = field(compare=False, repr=False)
    adjacency: dict = field(compare=False, repr=False)

    @property
    def special_vertex(self) -> Vertex:
        return (2 * self.n, 2 * self.n + 1 - self.n % 2)

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return v in self.adjacency.get(u, ())

    def faces(self) -> list[list[Vertex]]:
        """Bounded faces as counter-clockwise vertex cycles."""
        return _bounded_faces(self)


@lru_cache(maxsize=None)
def tsscpp_graph(n: int) -> TsscppGraph:
    if n < 1:
        raise ValueError("n must be positive")
    odd = n % 2 == 1
    verts = [(x1, x2) for x1 in range(2 * n + 1) for x2 in range(x1, 2 * n + 2)
             if not (odd and (x1, x2) == (2 * n, 2 * n + 1))]
    vset = set(verts)
    edges = []
    for x1 in range(2 * n):
        for x2 in range(x1, 2 * n + 2):
            if (x1 + x2) % 2 == 1:
                edges.append(((x1, x2), (x1 + 1, x2)))
    for x1 in range(2 * n + 1 - int(odd)):
        for x2 in range(x1, 2 * n + 1):
            edges.append(((x1, x2), (x1, x2 + 1)))
    for x1 in range(2 * n):
        edges.append(((x1, x1), (x1 + 1, x1 + 1)))
    assert all(u in vset and v in vset for u, v in edges)
    edges = sorted((min(u, v), max(u, v)) for u, v in edges)
    adj: dict = {v: [] for v in verts}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    adjacency = {v: tuple(sorted(nb)) for v, nb in adj.items()}
    return TsscppGraph(n, tuple(verts), tuple(edges), {v: i for i, v in enumerate(verts)}, adjacency)


def _bounded_faces(graph: TsscppGraph) -> list[list[Vertex]]:
    from math import atan2

    order = {}
    for v, nbs in graph.adjacency.items():
        order[v] = sorted(nbs, key=lambda w: atan2(w[1] - v[1], w[0] - v[0]))
    seen = set()
    faces = []
    for u, v in graph.edges:
        for a, b in ((u, v), (v, u)):
            if (a, b) in seen:
                continue
            cycle = []
            x, y = a, b
            while (x, y) not in seen:
                seen.add((x, y))
                cycle.append(x)
                # next edge: the neighbour of y immediately clockwise from x,
                # so that the face lies to the left of every traversed edge
                nbs = order[y]
                k = nbs.index(x)
                x, y = y, nbs[(k - 1) % len(nbs)]
            faces.append(cycle)
    # the unbounded face is the only one with negative signed area
    def area2(cyc):
        return sum(p[0] * q[1] - q[0] * p[1] for p, q in zip(cyc, cyc[1:] + cyc[:1]))

    return [f for f in faces if area2(f) > 0]


@dataclass(frozen=True)
class DimerMatching:
    """A perfect matching of ``G_n^m`` (equivalently a TSSCPP of size n+1)."""

    n: int
    edges: frozenset

    def __post_init__(self):
        es = frozenset((min(u, v), max(u, v)) for u, v in
                       ((tuple(a), tuple(b)) for a, b in self.edges))
        object.__setattr__(self, "edges", es)
        g = tsscpp_graph(self.n)
        covered = Counter()
        for u, v in es:
            if not g.has_edge(u, v):
                raise ValidationError(f"{(u, v)} is not an edge of G_{self.n}^m")
            covered[u] += 1
            covered[v] += 1
        for v in g.vertices:
            if covered[v] != 1:
                raise ValidationError(f"vertex {v} covered {covered[v]} times")

    def covers(self, u: Vertex, v: Vertex) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def to_dict(self) -> dict:
        return {"type": "DimerMatching", "n": self.n,
                "entries": [[list(u), list(v)] for u, v in sorted(self.edges)]}


def _matchings(graph: TsscppGraph, forced=(), forbidden=()) -> Iterator[frozenset]:
    """Depth-first enumeration of perfect matchings; the first unmatched vertex
    in lexicographic order is always the one matched next."""
    forbidden = {(min(u, v), max(u, v)) for u, v in forbidden}
    matched = {}
    chosen = []
    for u, v in forced:
        if u in matched or v in matched:
            return
        matched[u] = v
        matched[v] = u
        chosen.append((min(u, v), max(u, v)))
    verts = graph.vertices
    adj = graph.adjacency

    def rec(start):
        while start < len(verts) and verts[start] in matched:
            start += 1
        if start == len(verts):
            yield frozenset(chosen)
            return
        u = verts[start]
        for w in adj[u]:
            e = (min(u, w), max(u, w))
            if w in matched or e in forbidden:
                continue
            matched[u] = w
            matched[w] = u
            chosen.append(e)
            yield from rec(start + 1)
            chosen.pop()
            del matched[u], matched[w]

    yield from rec(0)


# ---------------------------------------------------------------------------
# Enumerations and counts
# ---------------------------------------------------------------------------


def _check_cap(n: int, cap: int):
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")


def _asm_rows(n: int, colsum: list[int]) -> Iterator[list[int]]:
    """Admissible next ASM rows given the current 0/1 column partial sums."""
    row = [0] * n

    def rec(j, expect, total):
        if j == n:
            if expect == -1 and total == 1:  # last nonzero was +1
                yield list(row)
            return
        # zero entry
        row[j] = 0
        yield from rec(j + 1, expect, total)
        # nonzero entry must equal `expect`
        if expect == 1 and colsum[j] == 0:
            row[j] = 1
            yield from rec(j + 1, -1, total + 1)
        elif expect == -1 and colsum[j] == 1:
            row[j] = -1
            yield from rec(j + 1, 1, total - 1)
        row[j] = 0

    yield from rec(0, 1, 0)


def iter_asm(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[AsmMatrix]:
    """All ASMs of order ``n`` by row-by-row completion on column sums."""
    _check_cap(n, cap)
    rows: list[list[int]] = []

    def rec(colsum):
        if len(rows) == n:
            if all(colsum):
                yield AsmMatrix(rows)
            return
        for r in _asm_rows(n, colsum):
            rows.append(r)
            yield from rec([c + v for c, v in zip(colsum, r)])
            rows.pop()

    yield from rec([0] * n)


def enumerate_asm(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> list[AsmMatrix]:
    return list(iter_asm(n, cap))


def iter_pcsm(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[PcsmMatrix]:
    """All PCSMs of size ``n`` (through ``A_{n+1}``)."""
    for a in iter_asm(n + 1, cap + 1 if cap is not None else cap):
        yield asm_to_pcsm(a)


def iter_matchings(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[DimerMatching]:
    _check_cap(n, cap)
    for es in _matchings(tsscpp_graph(n)):
        yield DimerMatching(n, es)


def enumerate_matchings(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> list[DimerMatching]:
    return list(iter_matchings(n, cap))


def count_asm(n: int) -> int:
    """``prod_{i<n} (3i+1)! / (n+i)!`` as an exact integer."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    num = prod(factorial(3 * i + 1) for i in range(n))
    den = prod(factorial(n + i) for i in range(n))
    q, r = divmod(num, den)
    assert r == 0
    return q


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


# --- trapezoids -------------------------------------------------------------


def _gog_next_rows(prev: tuple[int, ...], i: int, k: int, n: int) -> Iterator[tuple[int, ...]]:
    """Admissible row ``i`` of an ``(n, k)``-gog trapezoid below row ``prev``."""
    length = min(i, k)
    row = [0] * length

    def rec(j, low):
        if j == length:
            yield tuple(row)
            return
        lo = low
        if j >= 1 and j - 1 < len(prev):
            lo = max(lo, prev[j - 1])
        hi = n + 1 - (i - 1 - j)
        if j < len(prev):
            hi = min(hi, prev[j])
        for v in range(lo, hi + 1):
            row[j] = v
            yield from rec(j + 1, v + 1)

    yield from rec(0, 1)


def iter_gog_trapezoids(n: int, k: int) -> Iterator[GogTrapezoid]:
    rows: list[tuple[int, ...]] = []

    def rec(prev):
        i = len(rows) + 1
        if i > n:
            yield GogTrapezoid(n, k, rows)
            return
        for r in _gog_next_rows(prev, i, k, n):
            rows.append(r)
            yield from rec(r)
            rows.pop()

    yield from rec(())


def _magog_next_rows(prev: dict[int, int], cols: range, n: int) -> Iterator[dict[int, int]]:
    """Rows {j: m_{i+1,j}} with m_{i,j-1} <= m_{i+1,j} <= m_{i,j} where defined."""
    cols = list(cols)
    row: dict[int, int] = {}

    def rec(t):
        if t == len(cols):
            yield dict(row)
            return
        j = cols[t]
        lo = max(1, prev.get(j - 1, 1))
        hi = min(j + 1, prev.get(j, j + 1))
        for v in range(lo, hi + 1):
            row[j] = v
            yield from rec(t + 1)

    yield from rec(0)


def iter_magog_trapezoids(n: int, k: int) -> Iterator[MagogTrapezoid]:
    rows: list[dict[int, int]] = []

    def rec(prev):
        i = len(rows) + 1
        if i > n:
            yield MagogTrapezoid(n, k, [[r[j] for j in sorted(r)] for r in rows])
            return
        cols = range(max(1, i - k + 1), i + 1) if k else range(0)
        for r in _magog_next_rows(prev, cols, n):
            rows.append(r)
            yield from rec(r)
            rows.pop()

    yield from rec({})


def _count_dp(n, k, next_rows, start) -> int:
    layer = {start: 1}
    for i in range(1, n + 1):
        nxt: Counter = Counter()
        for prev, cnt in layer.items():
            for r in next_rows(i, prev):
                nxt[r] += cnt
        layer = nxt
    return sum(layer.values())


def count_gog_trapezoids(n: int, k: int, method: str = "auto", cap: int = DEFAULT_TRAPEZOID_CAP) -> int:
    """Number of ``(n, k)``-gog trapezoids.

    ``method`` is ``"enumerate"`` (exhaustive, capped), ``"dp"`` (row transfer
    keyed on full rows) or ``"auto"``.
    """
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if method == "auto":
        method = "enumerate" if n <= min(cap, 5) else "dp"
    if method == "enumerate":
        _check_cap(n, cap)
        return sum(1 for _ in iter_gog_trapezoids(n, k))
    return _count_dp(n, k, lambda i, prev: _gog_next_rows(prev, i, k, n), ())


def count_magog_trapezoids(n: int, k: int, method: str = "auto", cap: int = DEFAULT_TRAPEZOID_CAP) -> int:
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    if method == "auto":
        method = "enumerate" if n <= min(cap, 5) else "dp"
    if method == "enumerate":
        _check_cap(n, cap)
        return sum(1 for _ in iter_magog_trapezoids(n, k))

    def nxt(i, prev):
        cols = range(max(1, i - k + 1), i + 1) if k else range(0)
        for r in _magog_next_rows(dict(prev), cols, n):
            yield tuple(sorted(r.items()))

    return _count_dp(n, k, nxt, ())


# ---------------------------------------------------------------------------
# Magog triangles from dimer coverings
# ---------------------------------------------------------------------------


def _magog_row_edges(n: int, k: int) -> list[Edge]:
    off = 2 * (n - k)
    return [((i, i + off + 1), (i, i + off + 2)) for i in range(2 * k)]


def matching_to_magog(m: DimerMatching) -> MagogTrapezoid:
    n = m.n
    rows = []
    for k in range(1, n + 1):
        xs = [u[0] for u, v in _magog_row_edges(n, k) if m.covers(u, v)]
        if len(xs) != k:
            raise ValidationError(f"row {k} of the matching has {len(xs)} vertical edges, expected {k}")
        rows.append([x - (j - 2) for j, x in enumerate(xs, 1)])
    return MagogTrapezoid(n, n, rows)


def magog_to_matching(t: MagogTrapezoid) -> DimerMatching:
    """Inverse of :func:`matching_to_magog`: the unique perfect matching whose
    row edges are exactly those recorded by the magog triangle."""
    n = t.n
    if t.k != n:
        raise ValidationError("need a magog triangle")
    forced, forbidden = [], []
    for k in range(1, n + 1):
        xs = {t[k, j] + j - 2 for j in range(1, k + 1)}
        for e in _magog_row_edges(n, k):
            (forced if e[0][0] in xs else forbidden).append(e)
    found = list(_matchings(tsscpp_graph(n), forced, forbidden))
    if len(found) != 1:
        raise ValidationError(f"magog triangle determines {len(found)} matchings")
    return DimerMatching(n, found[0])


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------


def x_gog(c: PcsmMatrix) -> int:
    """Smallest ``m`` such that the ``m``-th antidiagonal from the top-right
    corner carries an entry different from ``n`` (``n + 1`` if none does)."""
    n = c.n
    for m in range(1, n + 1):
        if any(c[k, n - m + k] != n for k in range(1, m + 1)):
            return m
    return n + 1


def x_gog_from_triangle(g: GogTrapezoid) -> int:
    """``x_gog`` read off a monotone triangle: ``min_k (g_{k,1} + k - 1)``."""
    return min([g.n + 1] + [g.rows[k - 1][0] + k - 1 for k in range(1, g.n + 1)])


def x_magog(m: DimerMatching) -> int:
    """Position (1-based) of the first uncovered edge ``((j-1, j), (j-1, j+1))``."""
    for j in range(1, m.n + 1):
        if not m.covers((j - 1, j), (j - 1, j + 1)):
            return j
    return m.n + 1


def particles(m: DimerMatching) -> tuple[int, ...]:
    """Sites ``k`` of ``[0, n-1]`` whose edge ``((k,k+1),(k,k+2))`` is uncovered."""
    return tuple(k for k in range(m.n) if not m.covers((k, k + 1), (k, k + 2)))


@dataclass(frozen=True)
class TopPath:
    """h-coordinates ``T_n(t)`` of the top level line, ``t = -n..n``."""

    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != 2 * self.n + 1:
            raise ValidationError("need 2n+1 values")
        if any(abs(a - b) > 1 for a, b in zip(vals, vals[1:])):
            raise ValidationError("T_n must move by at most one per step")
        if any(not -1 <= v <= self.n - 1 for v in vals):
            raise ValidationError("T_n outside [-1, n-1]")

    def __getitem__(self, t: int) -> int:
        if not -self.n <= t <= self.n:
            raise IndexError(t)
        return self.values[t + self.n]

    @property
    def maximum(self) -> int:
        return max(self.values)

    def to_dict(self) -> dict:
        return {"type": "TopPath", "n": self.n, "entries": list(self.values)}


class _GogGraph:
    """The hexagonal graph ``G_n^g`` carrying the PCSM heights on its faces.

    Coordinates of face centres are doubled so that they are integral.
    """

    def __init__(self, n: int):
        self.n = n

    def is_vertex(self, v: Vertex) -> bool:
        n = self.n
        x, y = v
        if x % 2 == 1 and y % 2 == 0:
            return -1 <= x <= 2 * n - 1 and 0 <= y <= 2 * n and v != (-1, 0)
        if x % 2 == 0 and y % 2 == 1:
            return 0 <= x <= 2 * n and 1 <= y <= 2 * n + 1 and v != (2 * n, 2 * n + 1)
        return False

    def has_edge(self, a: Vertex, b: Vertex) -> bool:
        if not (self.is_vertex(a) and self.is_vertex(b)):
            return False
        if a[0] % 2 == 0:
            a, b = b, a
        if a[0] % 2 == 0:
            return False
        n = self.n
        d = (b[0] - a[0], b[1] - a[1])
        if d == (1, 1):
            return a != (2 * n - 1, 2 * n)
        if d == (-1, 1):
            return not (a[0] == -1 and a[1] >= 2)
        if d == (1, -1):
            return not (a[1] == 0 and a[0] >= 1)
        return False

    @staticmethod
    def faces_at(v: Vertex) -> set:
        x, y = 2 * v[0], 2 * v[1]
        if v[0] % 2 == 1:
            offs = ((1, 1), (-3, 1), (1, -3))
        else:
            offs = ((-1, -1), (-1, 3), (3, -1))
        return {(x - ox, y - oy) for ox, oy in offs}

    def height(self, c: PcsmMatrix, face) -> int:
        n = self.n
        fx, fy = face  # doubled centre
        if fy == -1 and (fx + 3) % 4 == 0 and 1 <= (fx + 3) // 4 <= n + 1:
            return (fx + 3) // 4 - 1
        if fx == -3 and (fy + 1) % 4 == 0 and 1 <= (fy + 1) // 4 <= n + 1:
            return (fy + 1) // 4 - 1
        if (fx + 3) % 4 == 0 and (4 * n + 3 - fy) % 4 == 0:
            j = (fx + 3) // 4
            i = (4 * n + 3 - fy) // 4
            if 1 <= i <= n and 1 <= j <= n:
                return c[i, j]
        return n


def top_path(c: PcsmMatrix) -> TopPath:
    """Trace the level line separating height-``n`` faces from lower faces,
    from ``(-1, 2n)`` to ``(2n-1, 0)``."""
    n = c.n
    g = _GogGraph(n)
    v = (-1, 2 * n)
    end = (2 * n - 1, 0)
    visited = [v]
    while v != end:
        if v[0] % 2 != 0:
            moves = [(v[0] + 1, v[1] - 1), (v[0] + 1, v[1] + 1)]
        else:
            moves = [(v[0] + 1, v[1] - 1), (v[0] - 1, v[1] - 1)]
        if len(visited) >= 2:
            moves = [w for w in moves if w != visited[-2]]
        nxt = None
        for w in moves:
            if not g.has_edge(v, w):
                continue
            f1, f2 = tuple(g.faces_at(v) & g.faces_at(w))
            # orientation: left face has positive cross product with the step
            d = (w[0] - v[0], w[1] - v[1])
            def cross(f):
                return d[0] * (f[1] - 2 * v[1]) - d[1] * (f[0] - 2 * v[0])
            left, right = (f1, f2) if cross(f1) > 0 else (f2, f1)
            if g.height(c, left) == n and g.height(c, right) < n:
                if nxt is not None:
                    raise RuntimeError("ambiguous level line")
                nxt = w
        if nxt is None:
            raise RuntimeError(f"level line lost at {v}")
        visited.append(nxt)
        v = nxt
    best: dict[int, int] = {}
    for x, y in visited:
        t = (x - y + 1) // 2
        h = (x + y - 2 * n - 1) // 2
        best[t] = max(best.get(t, h), h)
    return TopPath(n, [best[t] for t in range(-n, n + 1)])


def trapezoid_slices(n: int, m: int, cap: int = 5) -> tuple[int, int]:
    """Brute-force sizes of ``{Y^g_n = m}`` and ``Y^m_n(m)``."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    _check_cap(n, cap)
    gog = sum(1 for c in iter_pcsm(n, cap) if x_gog(c) >= n + 1 - m)
    magog = sum(1 for mm in iter_matchings(n, cap)
                if all(mm.covers((k, k + 1), (k, k + 2)) for k in range(n - m)))
    return gog, magog


def histogram(values: Iterable[int]) -> dict[int, int]:
    return dict(sorted(Counter(values).items()))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def to_json(obj) -> str:
    return json.dumps(obj.to_dict(), separators=(",", ":"))


def from_dict(d: dict):
    kind = d["type"]
    if kind == "AsmMatrix":
        return AsmMatrix(d["entries"])
    if kind == "PcsmMatrix":
        return PcsmMatrix(d["entries"])
    if kind == "GogTrapezoid":
        return GogTrapezoid(d["n"], d["k"], d["entries"])
    if kind == "MagogTrapezoid":
        return MagogTrapezoid(d["n"], d["k"], d["entries"])
    if kind == "DimerMatching":
        return DimerMatching(d["n"], [(tuple(u), tuple(v)) for u, v in d["entries"]])
    if kind == "TopPath":
        return TopPath(d["n"], d["entries"])
    raise ValueError(f"unknown type {kind!r}")


def from_json(text: str):
    return from_dict(json.loads(text))


def write_ndjson(objs: Iterable, stream) -> int:
    count = 0
    for obj in objs:
        stream.write(to_json(obj) + "\n")
        count += 1
    return count
