"""Airy functions, the 2x2 GOE block kernel and the GOE Tracy-Widom law F1.

F1 is evaluated as the Fredholm Pfaffian ``Pf(J - K)`` on ``L^2(s, inf)``,
discretized by Gauss-Legendre quadrature after the change of variables
``x = s + log(1/(1-u))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .pfaffian import pfaffian_float

AIRY_RANGE = 100.0


def _check_range(x):
    if np.any(np.abs(np.asarray(x)) > AIRY_RANGE):
        raise ValueError(f"|x| must be at most {AIRY_RANGE}")


def airy(x):
    _check_range(x)
    return special.airy(x)[0]


def airy_prime(x):
    _check_range(x)
    return special.airy(x)[1]


_TAIL_H = 1 / 32
_TAIL_LO, _TAIL_HI = -AIRY_RANGE, 40.0


_TAIL_TERMS = 14


@lru_cache(maxsize=1)
def _tail_table() -> tuple[np.ndarray, ...]:
    """``A``, ``Ai`` and ``Ai'`` on a uniform grid; ``A`` accumulated panelwise from the right."""
    grid = np.arange(_TAIL_LO, _TAIL_HI + _TAIL_H / 2, _TAIL_H)
    t, w = _leggauss(16)
    pts = grid[:-1, None] + (t[None, :] + 1) * _TAIL_H / 2
    panel = special.airy(pts)[0] @ w * _TAIL_H / 2
    tail = np.zeros_like(grid)
    # beyond the last node the tail is below 1e-50
    tail[:-1] = np.cumsum(panel[::-1])[::-1]
    ai, aip = special.airy(grid)[:2]
    return grid, tail, ai, aip


def airy_tail(x):
    """``A(x) = int_x^inf Ai(t) dt`` to near machine precision."""
    x = np.asarray(x, dtype=float)
    _check_range(x)
    grid, tail, ai, aip = _tail_table()
    xc = np.clip(x, _TAIL_LO, _TAIL_HI)
    k = np.rint((xc - _TAIL_LO) / _TAIL_H).astype(int)
    x0, d = grid[k], xc - grid[k]
    # Taylor coefficients of Ai at x0 from y'' = x y, integrated termwise
    c = [ai[k], aip[k], x0 * ai[k] / 2]
    acc = c[0] * d + c[1] * d ** 2 / 2 + c[2] * d ** 3 / 3
    for j in range(3, _TAIL_TERMS):
        c.append((x0 * c[j - 2] + c[j - 3]) / (j * (j - 1)))
        acc = acc + c[j] * d ** (j + 1) / (j + 1)
    out = tail[k] - acc
    out = np.where(x > _TAIL_HI, 0.0, out)
    return out if out.ndim else float(out)


def airy_contour(x: float, nodes: int = 200, length: float = 8.0) -> float:
    """Ai(x) from its contour integral over the rays ``r e^{+-i pi/3}``."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    r = (t + 1) * length / 2
    w = w * length / 2
    e = np.exp(1j * np.pi / 3)
    z = r * e
    # out along e^{i pi/3} minus out along e^{-i pi/3}
    f = np.exp(z ** 3 / 3 - x * z) * e - np.exp(np.conj(z) ** 3 / 3 - x * np.conj(z)) * np.conj(e)
    return float((np.sum(w * f) / (2j * np.pi)).real)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre on ``u`` with ``x = s + log(1/(1-u))``, cut at ``s + span``."""

    m: int = 80
    span: float = 16.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one node")
        if self.span <= 0:
            raise ValueError("span must be positive")

    def nodes(self, s: float) -> tuple[np.ndarray, np.ndarray]:
        t, w = _leggauss(self.m)
        umax = 1 - math.exp(-self.span)
        u = (t + 1) * umax / 2
        x = s - np.log1p(-u)
        wx = w * umax / 2 / (1 - u)
        return x, wx

    def refined(self) -> "QuadratureRule":
        return QuadratureRule(2 * self.m, self.span)


DEFAULT_RULE = QuadratureRule()


@lru_cache(maxsize=32)
def _leggauss(m: int):
    return np.polynomial.legendre.leggauss(m)


def _lambda_rule(lo: float, panels: int = 12, per: int = 24):
    """Composite Gauss-Legendre on ``[0, L]`` for lambda integrals."""
    L = max(20.0, 14.0 - lo)
    t, w = _leggauss(per)
    edges = np.linspace(0.0, L, panels + 1)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        xs.append((t + 1) * (b - a) / 2 + a)
        ws.append(w * (b - a) / 2)
    return np.concatenate(xs), np.concatenate(ws)


# ---------------------------------------------------------------------------
# GOE kernel
# ---------------------------------------------------------------------------


def kgoe_blocks(xs, ys) -> dict:
    """All four entries ``K^{ij}(x_a, y_b)`` as arrays of shape ``(len(xs), len(ys))``."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    lam, lw = _lambda_rule(min(xs.min(), ys.min()))
    aix, aipx = special.airy(xs[:, None] + lam[None, :])[:2]
    aiy, aipy = special.airy(ys[:, None] + lam[None, :])[:2]
    tx = airy_tail(xs[:, None] + lam[None, :])
    ty = airy_tail(ys[:, None] + lam[None, :])
    W = lw[None, :]
    k11 = 0.25 * ((aix * W) @ aipy.T - (aipx * W) @ aiy.T)
    ax0 = airy(xs)
    tail_x, tail_y = airy_tail(xs), airy_tail(ys)
    k12 = (aix * W) @ aiy.T + 0.5 * np.outer(ax0, 1 - tail_y)
    ay0 = airy(ys)
    k21 = -((aiy * W) @ aix.T + 0.5 * np.outer(ay0, 1 - tail_x)).T
    # inner integral over mu >= lambda is the Airy tail at the shifted point
    k22 = ((aix * W) @ ty.T - (tx * W) @ aiy.T
           - tail_x[:, None] + tail_y[None, :] - np.sign(xs[:, None] - ys[None, :]))
    return {(1, 1): k11, (1, 2): k12, (2, 1): k21, (2, 2): k22}


def kgoe(i: int, j: int, xi: float, eta: float) -> float:
    if (i, j) not in ((1, 1), (1, 2), (2, 1), (2, 2)):
        raise ValueError("i, j must be 1 or 2")
    return float(kgoe_blocks([xi], [eta])[(i, j)][0, 0])


def kgoe_matrix(grid) -> dict:
    return kgoe_blocks(grid, grid)


def airy_kernel_integral(x: float, y: float) -> float:
    """Closed form of ``int_0^inf Ai(x+l) Ai(y+l) dl``."""
    if x == y:
        return float(airy_prime(x) ** 2 - x * airy(x) ** 2)
    return float((airy(x) * airy_prime(y) - airy_prime(x) * airy(y)) / (x - y))


# ---------------------------------------------------------------------------
# F1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class F1Result:
    s: float
    value: float
    error: float
    nodes: int

    def to_dict(self) -> dict:
        return {"s": self.s, "value": self.value, "error": self.error, "nodes": self.nodes}


@lru_cache(maxsize=32)
def sign_matrix(m: int) -> np.ndarray:
    """Discrete ``sgn(x_i - x_j)`` for Gauss-Legendre nodes, exact on polynomials.

    Built from the spectral integration matrix ``C_ij = int_{-1}^{t_i} l_j``;
    ``D_ij = (2 C_ij - w_j) / w_j``.  Gauss exactness makes ``D`` skew.
    """
    t, w = _leggauss(m)
    V = np.polynomial.legendre.legvander(t, m)  # P_0..P_m at nodes
    k = np.arange(m)
    coef = (V[:, :m] * w[:, None] * (2 * k + 1) / 2).T  # l_j = sum_k coef[k, j] P_k
    prim = np.empty((m, m))
    prim[:, 0] = t + 1
    for kk in range(1, m):
        prim[:, kk] = (V[:, kk + 1] - V[:, kk - 1]) / (2 * kk + 1)
    C = prim @ coef
    D = (2 * C - w[None, :]) / w[None, :]
    return 0.5 * (D - D.T)


def fredholm_pfaffian_matrix(s: float, rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    """The ``2m x 2m`` matrix ``J - W^{1/2} K W^{1/2}`` in interleaved order.

    The jump ``-sgn(x - y)`` inside ``K^{22}`` is discretized with
    :func:`sign_matrix` instead of pointwise values; pointwise sampling of the
    jump limits convergence to second order in ``m``.
    """
    x, w = rule.nodes(s)
    m = len(x)
    K = kgoe_blocks(x, x)
    k22 = K[(2, 2)] + np.sign(x[:, None] - x[None, :]) - sign_matrix(m)
    sw = np.sqrt(w)
    S = np.outer(sw, sw)
    M = np.zeros((2 * m, 2 * m))
    M[0::2, 0::2] = -K[(1, 1)] * S
    M[0::2, 1::2] = -K[(1, 2)] * S
    M[1::2, 0::2] = -K[(2, 1)] * S
    M[1::2, 1::2] = -k22 * S
    idx = np.arange(m)
    M[2 * idx, 2 * idx + 1] += 1.0
    M[2 * idx + 1, 2 * idx] -= 1.0
    return M


def _f1_value(s: float, rule: QuadratureRule) -> float:
    M = fredholm_pfaffian_matrix(s, rule)
    asym = np.abs(M + M.T).max()
    if asym > 1e-10:
        raise ValueError(f"matrix not skew-symmetric (defect {asym:.2e})")
    return float(pfaffian_float(0.5 * (M - M.T)))


def f1(s: float, rule: QuadratureRule = DEFAULT_RULE, estimate: bool = True) -> F1Result:
    """GOE Tracy-Widom distribution function ``F1(s)``."""
    v = _f1_value(s, rule)
    err = abs(_f1_value(s, rule.refined()) - v) if estimate else float("nan")
    return F1Result(float(s), v, err, rule.m)


def f1_values(ss, rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    return np.array([_f1_value(float(s), rule) for s in ss])


def f1_ferrari_spohn(s: float, m: int = 60, span: float = 16.0) -> float:
    """Independent evaluation ``det(I - B_s)`` with ``B_s(x, y) = Ai(x + y + s)`` on ``L^2(0, inf)``."""
    t, w = _leggauss(m)
    x = (t + 1) * span / 2
    w = w * span / 2
    sw = np.sqrt(w)
    B = airy(x[:, None] + x[None, :] + s) * np.outer(sw, sw)
    return float(np.linalg.det(np.eye(m) - B))


def f1_series(s: float, kmax: int = 2, m: int = 60) -> float:
    """Partial sum ``1 + sum_{k<=kmax} (-1)^k/k! int Pf[K(x_i, x_j)]`` by product cubature."""
    if not 0 <= kmax <= 3:
        raise ValueError("kmax must be in 0..3")
    total = 1.0
    if kmax == 0:
        return total
    x, w = QuadratureRule(m).nodes(s)
    K = kgoe_blocks(x, x)
    k11, k12, k22 = K[(1, 1)], K[(1, 2)], K[(2, 2)]
    d12 = np.diag(k12)
    total -= float(np.sum(w * d12))
    if kmax >= 2:
        # Pf of the 4x4 block matrix for points (x_a, x_b)
        pf2 = np.outer(d12, d12) - k11 * k22 + k12 * (-k12.T)
        total += 0.5 * float(w @ pf2 @ w)
    if kmax >= 3:
        n = len(x)
        acc = 0.0
        for a in range(n):
            for b in range(n):
                blocks = np.zeros((n, 6, 6))
                pts = [a, b]
                for c in range(n):
                    idx = pts + [c]
                    for p in range(3):
                        for q in range(3):
                            u, v = idx[p], idx[q]
                            blocks[c, 2 * p, 2 * q] = k11[u, v]
                            blocks[c, 2 * p, 2 * q + 1] = k12[u, v]
                            blocks[c, 2 * p + 1, 2 * q] = -k12[v, u]
                            blocks[c, 2 * p + 1, 2 * q + 1] = k22[u, v]
                vals = np.array([_pf6(bl) for bl in blocks])
                acc += w[a] * w[b] * float(w @ vals)
        total -= acc / 6
    return total


def _pf6(a: np.ndarray) -> float:
    return float(pfaffian_float(a))


# ---------------------------------------------------------------------------
# Empirical distribution helpers
# ---------------------------------------------------------------------------


class F1Interpolant:
    """Tabulated F1 with monotone cubic interpolation, for fast CDF lookups."""

    def __init__(self, lo: float = -8.0, hi: float = 6.0, step: float = 0.1,
                 rule: QuadratureRule = QuadratureRule(40)):
        from scipy.interpolate import PchipInterpolator

        self.grid = np.arange(lo, hi + step / 2, step)
        vals = np.clip(f1_values(self.grid, rule), 0.0, 1.0)
        self.values = np.maximum.accumulate(vals)
        self._interp = PchipInterpolator(self.grid, self.values)
        self.lo, self.hi = lo, hi

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        out = self._interp(np.clip(s, self.lo, self.hi))
        out = np.where(s < self.lo, 0.0, np.where(s > self.hi, 1.0, out))
        return out if out.ndim else float(out)


def ks_distance(samples, cdf) -> float:
    """Kolmogorov-Smirnov distance between the empirical law of ``samples`` and ``cdf``."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = len(xs)
    if n == 0:
        raise ValueError("no samples")
    # distinct values matter for lattice data; check both one-sided gaps
    uniq, counts = np.unique(xs, return_counts=True)
    upper = np.cumsum(counts) / n
    lower = upper - counts / n
    F = cdf(uniq)
    Fm = cdf(uniq - 1e-12)
    return float(max(np.max(np.abs(upper - F)), np.max(np.abs(lower - Fm))))
