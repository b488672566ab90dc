"""Saddle-point analysis of the kernel near the edge ``x = alpha n``.

Covers the exponent functions ``S1, S2, S3``, their critical points and
derivatives, steepest-descent traces, the decay exponent ``g(a)``, the
rescaled kernel and its comparison with the GOE kernel, and the limit shape
of the top path.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

ALPHA = 2 - math.sqrt(3)
C1 = 2 / 3 ** (4 / 3)
C0 = 1 / (2 * 3 ** (1 / 6))


@dataclass(frozen=True)
class Scalings:
    alpha: float = ALPHA
    c1: float = C1
    c0: float = C0

    def check(self, tol: float = 1e-15) -> bool:
        return abs(self.c0 - 1 / (3 * math.sqrt(3) * self.c1)) <= tol


SCALINGS = Scalings()


class BranchCutError(ValueError):
    """A logarithm argument sits too close to the negative real axis."""


def _log(z: complex, eps: float) -> complex:
    z = complex(z)
    if eps and z.real <= 0 and abs(z.imag) < eps:
        raise BranchCutError(f"log argument {z} within {eps} of the branch cut")
    return cmath.log(z)


def _xlogx(z: complex, eps: float) -> complex:
    z = complex(z)
    if z == 0:
        return 0j
    return z * _log(z, eps)


def s1(w: complex, a: float, eps: float = 0.0) -> complex:
    """Leading exponent ``S1(w, a)`` with principal logarithms."""
    L = lambda z: _xlogx(z, eps)
    return (L(1 + w) + L(2 - w) + L(2 - 2 * w) + L(-w) - L(1 - w)
            - L(1 + w - a) - L(3 - w) - L(a - 2 * w))


def s2(w: complex, a: float, lam: float, X: float, eps: float = 0.0) -> complex:
    lg = lambda z: _log(z, eps)
    return (-X * lg(1 + w - a) + X * lg(a - 2 * w) - 2 * lam * lg(1 + w)
            + 2 * lam * lg(3 - w) - lam * lg(2 - w) + lam * lg(-w))


def s3(w: complex, a: float, r: int, eps: float = 0.0) -> complex:
    lg = lambda z: _log(z, eps)
    return (2 * lg(1 + w) + 2 * lg(2 - w) + lg(2 - 2 * w) - lg(1 + w - a)
            - 3 * lg(3 - w) - lg(a - 2 * w) - lg(1 - w) - 1 - 2 * r * lg(1 + w)
            + 2 * r * lg(3 - w) - r * lg(2 - w) + r * lg(-w))


def s1_dw(w: complex, a: float) -> complex:
    lg = cmath.log
    return (lg(1 + w) - lg(2 - w) - 2 * lg(2 - 2 * w) - lg(-w) + lg(1 - w)
            - lg(1 + w - a) + lg(3 - w) + 2 * lg(a - 2 * w))


def s1_dw2(w: complex, a: float) -> complex:
    return (1 / (1 + w) + 1 / (2 - w) + 1 / (1 - w) - 1 / w - 1 / (1 + w - a)
            - 1 / (3 - w) - 4 / (a - 2 * w))


def s1_dw3(w: complex, a: float) -> complex:
    return (-1 / (1 + w) ** 2 + 1 / (2 - w) ** 2 + 1 / (1 - w) ** 2 + 1 / w ** 2
            + 1 / (1 + w - a) ** 2 - 1 / (3 - w) ** 2 - 8 / (a - 2 * w) ** 2)


def s1_da(w: complex, a: float) -> complex:
    return cmath.log(1 + w - a) + 1 - cmath.log(a - 2 * w) - 1


def saddle_points(a: float) -> tuple[complex, complex]:
    """The two critical points ``w_+(a), w_-(a)`` of ``S1(., a)``."""
    if not 0 < a < 2 + math.sqrt(3):
        raise ValueError("need 0 < a < 2 + sqrt(3)")
    disc = 1 - 4 * a + a * a
    if abs(disc) < 1e-14:
        disc = 0.0  # a within rounding of alpha: the saddles coalesce
    root = cmath.sqrt(disc) if disc < 0 else math.sqrt(max(disc, 0.0))
    den = -8 - 4 * a + a * a
    base = 4 - 10 * a + a * a
    wp = (base + 2 * (a - 2) * root) / den
    wm = (base - 2 * (a - 2) * root) / den
    return complex(wp), complex(wm)


def s1_second_derivative_at_saddle(a: float, branch: str = "+") -> float:
    """Closed form of ``d^2 S1 / dw^2`` at ``w_+(a)`` (``branch='+'``) or ``w_-(a)``."""
    if not 0 < a < ALPHA:
        raise ValueError("need 0 < a < alpha")
    if branch not in ("+", "-"):
        raise ValueError("branch must be '+' or '-'")
    sgn = 1 if branch == "+" else -1
    rt = math.sqrt(1 - 4 * a + a * a)
    poly1 = -256 + 1296 * a - 1428 * a ** 2 + 616 * a ** 3 - 117 * a ** 4 + 12 * a ** 5 - a ** 6
    poly2 = -256 + 752 * a - 396 * a ** 2 + 104 * a ** 3 - 13 * a ** 4
    return -(poly1 + sgn * poly2 * rt) / (6 * (4 - a) ** 2 * (2 - a) * a * a)


def saddle_derivative(a: float) -> float:
    """Closed form of ``d w_+ / da`` on ``(0, alpha)``."""
    if not 0 < a < ALPHA:
        raise ValueError("need 0 < a < alpha")
    rt = math.sqrt(1 - 4 * a + a * a)
    num = 6 * (16 - 4 * a + a * a) * rt - 6 * (16 - 28 * a + 7 * a * a)
    return num / ((-8 - 4 * a + a * a) ** 2 * rt)


def s1_third_derivative_at_alpha() -> float:
    """``d^3 S1 / dw^3`` at the double critical point ``w_+(alpha)``."""
    return 81 / 4


@dataclass(frozen=True)
class SaddleReport:
    a: float
    w_plus: complex
    w_minus: complex
    s1_dd_plus: float | None
    s1_dd_minus: float | None
    exponent: float | None
    exponent_derivative: float | None

    def to_dict(self) -> dict:
        c = lambda z: [z.real, z.imag]
        return {"a": self.a, "w_plus": c(self.w_plus), "w_minus": c(self.w_minus),
                "s1_dd_plus": self.s1_dd_plus, "s1_dd_minus": self.s1_dd_minus,
                "g": self.exponent, "g_prime": self.exponent_derivative}


def saddle_report(a: float) -> SaddleReport:
    wp, wm = saddle_points(a)
    inside = 0 < a < ALPHA
    g = decay_exponent(a) if inside else (None, None)
    return SaddleReport(
        a, wp, wm,
        s1_second_derivative_at_saddle(a, "+") if inside else None,
        s1_second_derivative_at_saddle(a, "-") if inside else None,
        g[0], g[1])


# ---------------------------------------------------------------------------
# Steepest descent
# ---------------------------------------------------------------------------


class TraceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ContourTrace:
    a: float
    points: tuple[complex, ...] = field(repr=False)

    @property
    def endpoint(self) -> complex:
        return self.points[-1]

    @property
    def launch_angle(self) -> float:
        d = self.points[1] - self.points[0]
        return math.atan2(d.imag, d.real)

    def max_abs_im_s1(self) -> float:
        return max(abs(s1(w, self.a).imag) for w in self.points[1:-1])

    def re_s1(self) -> list[float]:
        return [s1(w, self.a).real for w in self.points[1:]]


def _newton_im(w: complex, a: float, target: float, tol: float) -> complex:
    for _ in range(50):
        val = s1(w, a).imag - target
        if abs(val) <= tol:
            return w
        d = s1_dw(w, a)
        g = 1j * d.conjugate()  # gradient of Im S1
        w = w - val * g / (abs(d) ** 2)
    raise TraceError(f"Newton correction failed near {w}")


def steepest_descent_trace(a: float, step: float = 1e-3, tol: float = 1e-9,
                           axis_tol: float = 1e-10, max_steps: int = 200000) -> ContourTrace:
    """Follow ``Im S1(w, a) = Im S1(w_+(a), a)`` from ``w_+(a)`` into the upper
    half plane along decreasing ``Re S1`` until the real axis is reached."""
    if not 0 < a <= ALPHA + 1e-15:
        raise ValueError("need 0 < a <= alpha")
    at_alpha = abs(a - ALPHA) < 1e-12
    w0 = saddle_points(a)[0].real + 0j
    target = s1(w0, a).imag
    theta = math.pi / 3 if at_alpha else math.pi / 2
    first = step if at_alpha else step / 10
    w = _newton_im(w0 + first * cmath.exp(1j * theta), a, target, tol)
    pts = [w0, w]
    for _ in range(max_steps):
        d = s1_dw(w, a)
        if d == 0:
            raise TraceError("hit a critical point")
        direction = -d.conjugate() / abs(d)
        h = step
        if direction.imag < 0:
            # approach the axis in geometrically shrinking steps
            h = min(step, 0.5 * w.imag / -direction.imag)
        nxt = _newton_im(w + h * direction, a, target, tol)
        if nxt.imag <= 0:
            raise TraceError("trace crossed the real axis")
        if s1(nxt, a).real > s1(w, a).real + 1e-12:
            raise TraceError("Re S1 increased along the trace; reduce the step")
        pts.append(nxt)
        w = nxt
        if w.imag < axis_tol:
            pts.append(complex(w.real, 0.0))
            return ContourTrace(a, tuple(pts))
        if abs(w) > 50:
            raise TraceError("trace escaped")
    raise TraceError("trace did not reach the real axis")


def decay_exponent(a: float) -> tuple[float, float]:
    """``g(a) = S1(w_+(a), a)`` and ``g'(a) = log[(1-a+w_+)/(a-2w_+)]``."""
    if not 0 < a <= ALPHA:
        raise ValueError("need 0 < a <= alpha")
    wp = saddle_points(a)[0].real
    g = s1(wp, a).real
    gp = math.log((1 - a + wp) / (a - 2 * wp))
    return g, gp


def decay_exponent_derivative_alt(a: float) -> float:
    """Second closed form ``log[-1 - 2/(sqrt(1-4a+a^2) - 1)]``."""
    return math.log(-1 - 2 / (math.sqrt(1 - 4 * a + a * a) - 1))


# ---------------------------------------------------------------------------
# Limit shape
# ---------------------------------------------------------------------------


def limit_shape(points: int = 101) -> list[tuple[float, float]]:
    """Points ``(x, y)`` of ``x(2-x) + y(2-y) + (2-x)(2-y) = 1`` for ``x`` in [1, 2]."""
    if points < 2:
        raise ValueError("need at least two points")
    xs = np.linspace(1.0, 2.0, points)
    return [(float(x), float((x + math.sqrt(max(12 - 3 * x * x, 0.0))) / 2)) for x in xs]


def limit_shape_residual(x: float, y: float) -> float:
    return x * (2 - x) + y * (2 - y) + (2 - x) * (2 - y) - 1


def top_path_limit(u: float) -> float:
    """Limit of ``T_n(un)/n``: the arc for ``|u| <= 1/2``, frozen slope beyond."""
    u = abs(u)
    if u > 1:
        raise ValueError("need |u| <= 1")
    if u <= 0.5:
        return math.sqrt(3 - 3 * u * u) - 1
    return 1 - u


# ---------------------------------------------------------------------------
# Rescaled kernel
# ---------------------------------------------------------------------------


def edge_site(n: int, xi: float) -> int:
    return math.floor(ALPHA * n - C0 * n ** (1 / 3) * xi)


def rescaled_kernel(n: int, i: int, j: int, xi: float, eta: float) -> float:
    """``(c0 n^{1/3})^{4-i-j} f^{ij}([alpha n - c0 n^{1/3} xi], [alpha n - c0 n^{1/3} eta])``."""
    from .kernel import kernel_tables

    if (i, j) not in ((1, 1), (1, 2), (2, 1), (2, 2)):
        raise ValueError("i, j must be 1 or 2")
    x, y = edge_site(n, xi), edge_site(n, eta)
    for v in (x, y):
        if not 0 <= v <= n - 1:
            raise ValueError(f"site {v} outside L_n")
    blk = kernel_tables(n, max(x, y)).block(x, y)
    val = blk.as_matrix()[i - 1][j - 1]
    return float(val) * (C0 * n ** (1 / 3)) ** (4 - i - j)


def rescaled_kernel_grid(n: int, grid) -> dict:
    """All four rescaled entries on ``grid x grid``: ``{(i,j): array}``."""
    from .kernel import kernel_tables

    sites = [edge_site(n, v) for v in grid]
    if min(sites) < 0 or max(sites) > n - 1:
        raise ValueError("grid maps outside L_n")
    t = kernel_tables(n, max(sites))
    scale = C0 * n ** (1 / 3)
    out = {k: np.zeros((len(grid), len(grid))) for k in ((1, 1), (1, 2), (2, 1), (2, 2))}
    for a, x in enumerate(sites):
        for b, y in enumerate(sites):
            m = t.block(x, y).as_matrix()
            for i in (1, 2):
                for j in (1, 2):
                    out[(i, j)][a, b] = float(m[i - 1][j - 1]) * scale ** (4 - i - j)
    return out


def site_coordinate(n: int, x: int) -> float:
    """Rescaled position ``(alpha n - x) / (c0 n^{1/3})`` of site ``x``."""
    return (ALPHA * n - x) / (C0 * n ** (1 / 3))


@dataclass(frozen=True)
class ConvergenceRow:
    """Sup errors of one kernel entry at one ``n``.

    ``sup_error`` compares at the grid values themselves.  ``sup_error_sites``
    compares at the rescaled positions of the lattice sites the grid maps to,
    which removes the rounding jitter of ``[.]``.
    """

    n: int
    i: int
    j: int
    sup_error: float
    argmax: tuple[float, float]
    sup_error_sites: float


def convergence_study(ns=(50, 100, 200, 400), grid=None) -> list[ConvergenceRow]:
    from .goetw import kgoe_blocks

    grid = np.arange(-3.0, 3.0001, 0.5) if grid is None else np.asarray(grid, dtype=float)
    goe = kgoe_blocks(grid, grid)
    rows = []
    for n in ns:
        resc = rescaled_kernel_grid(n, grid)
        at_sites = np.array([site_coordinate(n, edge_site(n, v)) for v in grid])
        goe_sites = kgoe_blocks(at_sites, at_sites)
        for (i, j), m in resc.items():
            err = np.abs(m - goe[(i, j)])
            a, b = np.unravel_index(int(np.argmax(err)), err.shape)
            err_sites = float(np.abs(m - goe_sites[(i, j)]).max())
            rows.append(ConvergenceRow(n, i, j, float(err.max()),
                                       (float(grid[a]), float(grid[b])), err_sites))
    return rows


@dataclass(frozen=True)
class TailProbe:
    n: int
    M: float
    rate_f11: float
    rate_f12: float
    rate_f12_by_eta: tuple[float, ...]
    max_abs_f22: float


def tail_bound_probe(n: int, M: float, points: int = 8, depth: float = 6.0) -> TailProbe:
    """Least-squares exponential decay rates of the rescaled kernel on the gap
    side ``xi, eta`` in ``[-M, depth - M]``.

    Rates are ``c`` in ``|f| ~ C exp(-c (xi + eta))`` (for ``f11``) and
    ``|f| ~ C exp(-c xi)`` (for ``f12``, also fitted column by column in
    ``eta``); positive means decay.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    if points < 3:
        raise ValueError("need at least three grid points")
    grid = np.linspace(-M, depth - M, points)
    sites = [edge_site(n, v) for v in grid]
    if min(sites) < 0 or max(sites) > n - 1:
        raise ValueError("probe grid leaves L_n; use a smaller depth or larger n")
    resc = rescaled_kernel_grid(n, grid)

    def rate(xs, vals):
        vals = np.abs(vals)
        keep = vals > 0
        if keep.sum() < 3:
            raise ValueError("insufficient nonzero samples for a fit")
        return float(-np.polyfit(np.asarray(xs)[keep], np.log(vals[keep]), 1)[0])

    xs11, v11 = [], []
    for a in range(points):
        for b in range(points):
            if a != b:
                xs11.append(grid[a] + grid[b])
                v11.append(resc[(1, 1)][a, b])
    r11 = rate(xs11, np.array(v11))
    r12 = rate(np.repeat(grid, points), resc[(1, 2)].ravel())
    by_eta = tuple(rate(grid, resc[(1, 2)][:, b]) for b in range(points))
    return TailProbe(n, M, r11, r12, by_eta, float(np.abs(resc[(2, 2)]).max()))
