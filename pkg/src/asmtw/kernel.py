"""Pfaffian point process of uncovered diagonal edges on ``L_n = {0, ..., n-1}``.

Kernel entries are finite residue sums, evaluated exactly over the
rationals.  Gap probabilities are Pfaffians of ``J - f`` on a window and can be
eliminated either exactly or in big-float arithmetic.
"""
from __future__ import annotations

from contextlib import nullcontext
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpq, mpfr

from .pfaffian import leading_pfaffians, pfaffian


@dataclass(frozen=True)
class PrecisionPolicy:
    """How kernel Pfaffians are evaluated.

    ``mode`` is ``"exact"`` (rationals end to end) or ``"bigfloat"`` (exact
    kernel tables, elimination in ``bits``-bit binary floating point).
    ``kappa`` is ``None`` for the smallest admissible truncation, otherwise a
    fixed value.
    """

    mode: str = "exact"
    bits: int = 256
    kappa: int | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "bigfloat"):
            raise ValueError(f"unknown precision mode {self.mode!r}")
        if self.mode == "bigfloat" and self.bits < 64:
            raise ValueError("bigfloat mode needs at least 64 bits")

    def context(self):
        """Arithmetic context for this policy (a no-op in exact mode)."""
        if self.mode == "exact":
            return nullcontext()
        return gmpy2.context(gmpy2.get_context(), precision=self.bits)

    def convert(self, v):
        if self.mode == "exact":
            return v
        with self.context():
            return mpfr(v)


EXACT = PrecisionPolicy()


# ---------------------------------------------------------------------------
# Coefficients and residue sums
# ---------------------------------------------------------------------------


def catalan_number(m: int):
    return gmpy2.bincoef(2 * m, m) // (m + 1)


@lru_cache(maxsize=None)
def p_coeff(n: int, k: int, l: int) -> mpq:
    """``(n+k-2l+1)! (2n-k-l+1)! / ((k-l)! (3n-k+2-2l)!) (-1)^k (3n-3k+2) C_{n-k}``.

    Zero when ``k < l`` (the falling factorial hidden in the first ratio
    vanishes).
    """
    if not (0 <= k <= n and l >= 0):
        raise ValueError(f"p_coeff needs 0 <= k <= n and l >= 0, got {(n, k, l)}")
    if k < l:
        return mpq(0)
    f = gmpy2.fac
    num = f(n + k - 2 * l + 1) * f(2 * n - k - l + 1) * (3 * n - 3 * k + 2) * catalan_number(n - k)
    v = mpq(num, f(k - l) * f(3 * n - k + 2 - 2 * l))
    return -v if k % 2 else v


def _binom(a: int, b: int):
    if b < 0 or a < 0 or b > a:
        return 0
    return gmpy2.bincoef(a, b)


@lru_cache(maxsize=None)
def _residue_row(m: int, extra: int, top: int) -> tuple:
    """``(-1)^m sum_k p(m,k,0) C(m-k+extra, y-2k)`` for ``y = 0..top``."""
    sign = -1 if m % 2 else 1
    out = []
    for y in range(top + 1):
        acc = mpq(0)
        for k in range(0, min(y // 2, m) + 1):
            b = _binom(m - k + extra, y - 2 * k)
            if b:
                acc += p_coeff(m, k, 0) * b
        out.append(sign * acc)
    return tuple(out)


def _check_x(n: int, x: int):
    if not 0 <= x <= n - 1:
        raise ValueError(f"x={x} outside L_n = [0, {n - 1}]")


def g_bar(n: int, l: int, x: int) -> mpq:
    """Sum of the residues of ``G_{n,l,x}`` at ``w = 0, ..., floor(x/2)``."""
    _check_x(n, x)
    if l < 0:
        raise ValueError("l must be nonnegative")
    if 2 * l > x:
        return mpq(0)
    return _residue_row(n - l, 0, x - 2 * l)[x - 2 * l]


def h_bar(n: int, l: int, x: int) -> mpq:
    """As :func:`g_bar` for the integrand carrying the extra factor
    ``(n-w+1)/(n+w-x)``; its residues use ``C(m-k+1, y-2k)``."""
    _check_x(n, x)
    if l < 0:
        raise ValueError("l must be nonnegative")
    if 2 * l > x:
        return mpq(0)
    return _residue_row(n - l, 1, x - 2 * l)[x - 2 * l]


def h_bar_literal(n: int, l: int, x: int) -> mpq:
    """Residues of ``G_{n,l,x}(w) (n-w+1)/(n+w-x)`` taken at face value.

    With ``m = n-l`` and ``y = x-2l`` the residue at ``w = l+k`` is
    ``P(m,k,y) (m-k+1)/(m+k-y)``.  Kept for comparison only: it is not the
    kernel of the particle process.
    """
    _check_x(n, x)
    if 2 * l > x:
        return mpq(0)
    m, y = n - l, x - 2 * l
    sign = -1 if m % 2 else 1
    acc = mpq(0)
    for k in range(0, min(y // 2, m) + 1):
        b = _binom(m - k, y - 2 * k)
        if b:
            acc += p_coeff(m, k, 0) * b * mpq(m - k + 1, m + k - y)
    return sign * acc


def h_bar_cumsum(n: int, l: int, x: int) -> mpq:
    """``sum_{m=0}^{x} h_bar(n, l, x - m)``."""
    _check_x(n, x)
    if 2 * l > x:
        return mpq(0)
    return _cumsum_row(n - l, x - 2 * l)[x - 2 * l]


@lru_cache(maxsize=None)
def _cumsum_row(m: int, top: int) -> tuple:
    out, acc = [], mpq(0)
    for v in _residue_row(m, 1, top):
        acc += v
        out.append(acc)
    return tuple(out)


def kappa_range(n: int, x: int, y: int) -> range:
    """Integers strictly between ``min(x//2, y//2)`` and ``(n+1)//2``."""
    return range(min(x // 2, y // 2) + 1, (n + 1) // 2)


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelBlock:
    x: int
    y: int
    f11: object
    f12: object
    f21: object
    f22: object

    def as_matrix(self):
        return ((self.f11, self.f12), (self.f21, self.f22))


class KernelTables:
    """``G[l][x]`` and cumulative ``H[l][x]`` for ``0 <= x <= xmax``.

    Every kernel entry on ``[0, xmax]^2`` is a short bilinear form in these
    tables; truncating the ``l``-sums at ``xmax//2 + 1`` loses nothing because
    both tables vanish for ``2l > x``.
    """

    def __init__(self, n: int, xmax: int | None = None):
        self.n = n
        self.xmax = n - 1 if xmax is None else xmax
        if not 0 <= self.xmax <= n - 1:
            raise ValueError("xmax outside L_n")
        self.L = self.xmax // 2 + 1
        zero = mpq(0)
        self.G = []
        self.H = []
        for l in range(self.L + 1):
            if 2 * l > self.xmax:
                self.G.append([zero] * (self.xmax + 1))
                self.H.append([zero] * (self.xmax + 1))
                continue
            top = self.xmax - 2 * l
            g = _residue_row(n - l, 0, top)
            h = _cumsum_row(n - l, top)
            self.G.append([zero] * (2 * l) + list(g))
            self.H.append([zero] * (2 * l) + list(h))

    def block(self, x: int, y: int, kappa: int | None = None) -> KernelBlock:
        n = self.n
        for v in (x, y):
            if not 0 <= v <= self.xmax:
                raise ValueError(f"{v} outside [0, {self.xmax}]")
        top = self.L - 1 if kappa is None else kappa
        G, H = self.G, self.H
        sgn_n = -1 if n % 2 else 1

        def term(A, B, a, b):
            acc = mpq(0)
            for l in range(0, top + 1):
                a1 = A[l + 1][a] if l + 1 < len(A) else 0
                b1 = B[l + 1][b] if l + 1 < len(B) else 0
                a0 = A[l][a] if l < len(A) else 0
                b0 = B[l][b] if l < len(B) else 0
                acc += a1 * b0 - a0 * b1
            return acc

        f11 = term(G, G, x, y)
        f22 = (x > y) - (x < y) + term(H, H, x, y) - sgn_n * H[0][x] + sgn_n * H[0][y]
        f12 = sgn_n * G[0][x] - term(G, H, x, y)
        f21 = -(sgn_n * G[0][y] - term(G, H, y, x))
        return KernelBlock(x, y, f11, f12, f21, f22)


@lru_cache(maxsize=64)
def kernel_tables(n: int, xmax: int | None = None) -> KernelTables:
    return KernelTables(n, xmax)


def kernel_block(n: int, x: int, y: int, kappa: int | None = None) -> KernelBlock:
    """The 2x2 kernel block ``f(x, y)`` on ``L_n``.

    ``kappa`` may be any integer in :func:`kappa_range` (or larger); the value
    does not depend on it.
    """
    _check_x(n, x)
    _check_x(n, y)
    return kernel_tables(n, max(x, y)).block(x, y, kappa)


def correlation_matrix(n: int, points, policy: PrecisionPolicy = EXACT) -> list[list]:
    """``[f(x_i, x_j)]`` as a ``2m x 2m`` matrix (rows ``(x, 1), (x, 2), ...``)."""
    pts = list(points)
    if not pts:
        return []
    t = kernel_tables(n, max(pts))
    m = [[None] * (2 * len(pts)) for _ in range(2 * len(pts))]
    for a, x in enumerate(pts):
        for b, y in enumerate(pts):
            blk = t.block(x, y, policy.kappa)
            for i, row in enumerate(blk.as_matrix()):
                for j, v in enumerate(row):
                    m[2 * a + i][2 * b + j] = policy.convert(v)
    return m


def correlation(n: int, points, policy: PrecisionPolicy = EXACT):
    """Probability that every point of ``points`` carries a particle."""
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise ValueError("points must be distinct")
    if not pts:
        return mpq(1)
    with policy.context():
        return pfaffian(correlation_matrix(n, pts, policy))


@dataclass(frozen=True)
class GapMatrix:
    """``J - f`` on the window ``{0, ..., s-1}``."""

    n: int
    s: int
    entries: tuple

    @classmethod
    def build(cls, n: int, s: int, policy: PrecisionPolicy = EXACT) -> "GapMatrix":
        if not 0 <= s <= n:
            raise ValueError(f"s={s} outside [0, {n}]")
        f = correlation_matrix(n, range(s), policy)
        with policy.context():
            g = [[-v for v in row] for row in f]
            for a in range(s):
                g[2 * a][2 * a + 1] += 1
                g[2 * a + 1][2 * a] -= 1
        return cls(n, s, tuple(tuple(r) for r in g))


def gap_probability(n: int, s: int, policy: PrecisionPolicy = EXACT):
    """Probability of no particle in ``{0, ..., s-1}``, i.e. ``P[X >= s + 1]``."""
    if not 0 <= s <= n:
        raise ValueError(f"s={s} outside [0, {n}]")
    if s == 0:
        return policy.convert(mpq(1))
    with policy.context():
        return pfaffian([list(r) for r in GapMatrix.build(n, s, policy).entries])


def gap_probabilities(n: int, policy: PrecisionPolicy = EXACT) -> list:
    """``[gap(0), gap(1), ..., gap(n)]`` from a single elimination.

    Leading Pfaffians of ``J - f`` on ``L_n`` are the successive gaps; they are
    all positive, so no pivoting is needed.
    """
    if n < 1:
        raise ValueError("n must be positive")
    m = [list(r) for r in GapMatrix.build(n, n, policy).entries]
    with policy.context():
        lead = leading_pfaffians(m, check=False)
    return [policy.convert(mpq(1))] + list(lead)


def law_of_x(n: int, policy: PrecisionPolicy = EXACT) -> dict:
    """``{m: P[X = m]}`` for ``m = 1..n+1``."""
    gaps = gap_probabilities(n, policy) + [policy.convert(mpq(0))]
    with policy.context():
        return {m: gaps[m - 1] - gaps[m] for m in range(1, n + 2)}


def law_of_max_T(n: int, policy: PrecisionPolicy = EXACT) -> dict:
    """``{t: P[max T_n = t]}`` for ``t = -1..n-1``, using ``max T_n = n - X``."""
    return {n - m: p for m, p in sorted(law_of_x(n, policy).items(), reverse=True)}
