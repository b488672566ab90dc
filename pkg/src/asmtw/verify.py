"""Acceptance checks, one function per criterion.

Each check returns a :class:`CriterionResult` carrying the pass/fail verdict
and the measured quantities, so that failures are reported with numbers.
"""
from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

ASM_COUNTS = {1: 1, 2: 2, 3: 7, 4: 42, 5: 429, 6: 7436}

TRAPEZOID_TABLE = {
    1: [2],
    2: [5, 7],
    3: [14, 35, 42],
    4: [42, 219, 387, 429],
    5: [132, 1594, 4862, 7007, 7436],
    6: [429, 12935, 76505, 166296, 210912, 218348],
}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} [{verdict}] {self.title} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "details": self.details}


def _timed(number, title, fn, budget=None):
    t0 = time.perf_counter()
    passed, details = fn()
    dt = time.perf_counter() - t0
    if budget is not None:
        details["budget_s"] = budget
        passed = passed and dt <= budget
    return CriterionResult(number, title, bool(passed), details, dt)


# ---------------------------------------------------------------------------


def criterion_1() -> CriterionResult:
    from .combinatorics import count_asm, enumerate_asm

    def run():
        brute = {n: len(enumerate_asm(n)) for n in range(1, 7)}
        formula = {n: count_asm(n) for n in range(1, 7)}
        ok = brute == ASM_COUNTS and formula == ASM_COUNTS
        return ok, {"brute_force": brute, "product_formula": formula}

    return _timed(1, "ASM enumeration n=1..6", run, budget=60)


def criterion_2() -> CriterionResult:
    from .combinatorics import count_gog_trapezoids, count_magog_trapezoids

    def run():
        gog = {n: [count_gog_trapezoids(n, k) for k in range(1, n + 1)] for n in range(1, 7)}
        magog = {n: [count_magog_trapezoids(n, k) for k in range(1, n + 1)] for n in range(1, 7)}
        return gog == TRAPEZOID_TABLE and magog == TRAPEZOID_TABLE, {"gog": gog, "magog": magog}

    return _timed(2, "gog/magog trapezoid table n<=6", run, budget=300)


def criterion_3() -> CriterionResult:
    from .combinatorics import iter_matchings, iter_pcsm, x_gog, x_magog

    def run():
        laws = {}
        ok = True
        for n in range(1, 6):
            g = Counter(x_gog(c) for c in iter_pcsm(n))
            m = Counter(x_magog(d) for d in iter_matchings(n))
            laws[n] = {"gog": dict(sorted(g.items())), "magog": dict(sorted(m.items()))}
            ok &= g == m
        ok &= laws[2]["gog"] == {1: 2, 2: 4, 3: 1}
        return ok, laws

    return _timed(3, "law of X^g equals law of X^m, n<=5", run)


def fraction_str(v) -> str:
    """Lossless ``p/q`` text for an exact rational."""
    q = mpq(v)
    return f"{q.numerator}/{q.denominator}"


def criterion_4() -> CriterionResult:
    from .combinatorics import enumerate_matchings, particles
    from .kernel import correlation, gap_probability

    def run():
        g21, g22 = gap_probability(2, 1), gap_probability(2, 2)
        ok = g21 == mpq(5, 7) and g22 == mpq(1, 7)
        mismatches = 0
        checked = 0
        for n in range(1, 6):
            ms = enumerate_matchings(n)
            total = len(ms)
            occ = [frozenset(particles(m)) for m in ms]
            for s in range(n + 1):
                freq = mpq(sum(1 for o in occ if not any(x < s for x in o)), total)
                checked += 1
                mismatches += gap_probability(n, s) != freq
            for r in (1, 2, 3):
                for pts in itertools.combinations(range(n), r):
                    freq = mpq(sum(1 for o in occ if all(p in o for p in pts)), total)
                    checked += 1
                    mismatches += correlation(n, pts) != freq
        ok = ok and mismatches == 0
        return ok, {"gap(2,1)": fraction_str(g21), "gap(2,2)": fraction_str(g22), "checked": checked,
                    "mismatches": mismatches}

    return _timed(4, "kernel gaps and correlations vs enumeration, n<=5", run, budget=120)


def criterion_5() -> CriterionResult:
    from .combinatorics import count_asm
    from .kasteleyn import inverse_residual, kasteleyn_pfaffian, s_integral, s_integral_quadrature

    def run():
        pf = {n: int(kasteleyn_pfaffian(n)) for n in range(1, 7)}
        ok = all(abs(pf[n]) == count_asm(n + 1) for n in pf)
        resid = {n: fraction_str(inverse_residual(n)) for n in range(1, 5)}
        ok &= all(r == "0/1" for r in resid.values())
        err = max(abs(s_integral_quadrature(a, b) - s_integral(a, b))
                  for a in range(11) for b in range(11))
        ok &= err <= 1e-10
        return ok, {"pfaffians": pf, "inverse_residual": resid, "s_integral_max_err": err}

    return _timed(5, "Kasteleyn Pfaffian, inverse and s-integral", run)


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def _s1_mp(w, a):
    import mpmath as mp

    L = lambda z: z * mp.log(z)
    return (L(1 + w) + L(2 - w) + L(2 - 2 * w) + L(-w) - L(1 - w) - L(1 + w - a)
            - L(3 - w) - L(a - 2 * w))


def _s1_diff(w, a, k, wrt="w"):
    """Numerical derivative of S1 at 40 digits (independent of the closed forms)."""
    import mpmath as mp

    with mp.workdps(40):
        w, a = mp.mpc(w), mp.mpf(a)
        if wrt == "w":
            return mp.diff(lambda z: _s1_mp(z, a), w, k)
        return mp.diff(lambda b: _s1_mp(w, b), a, k)


def _saddle_mp(a):
    import mpmath as mp

    return ((4 - 10 * a + a * a) + 2 * (a - 2) * mp.sqrt(1 - 4 * a + a * a)) / (-8 - 4 * a + a * a)


def _saddle_diff(a):
    import mpmath as mp

    with mp.workdps(40):
        return float(mp.diff(_saddle_mp, mp.mpf(a)))


def _g_diff(a):
    import mpmath as mp

    with mp.workdps(40):
        return float(mp.diff(lambda b: mp.re(_s1_mp(_saddle_mp(b), b)), mp.mpf(a)))


def criterion_6() -> CriterionResult:
    from . import asymptotics as A

    def run():
        d = {}
        wp, wm = A.saddle_points(A.ALPHA)
        d["w_plus_minus_gap_at_alpha"] = abs(wp - wm)
        grid = np.linspace(0.01, A.ALPHA - 1e-3, 40)
        d["max_abs_S1prime"] = max(max(abs(A.s1_dw(w, a)) for w in A.saddle_points(a)) for a in grid)
        w0 = wp.real
        d["third_derivative"] = A.s1_dw3(w0, A.ALPHA).real
        d["third_derivative_err"] = abs(d["third_derivative"] - A.s1_third_derivative_at_alpha())
        ends = {}
        for a in (0.1, 0.2, A.ALPHA):
            tr = A.steepest_descent_trace(a)
            ends[round(a, 6)] = abs(tr.endpoint - a)
        d["trace_endpoint_err"] = ends
        # closed forms against high-precision numerical differentiation of S1
        fd = []
        for a in (0.05, 0.1, 0.2, 0.25):
            pts = [complex(A.saddle_points(a)[0].real, 0.3), complex(-0.5, 0.2), complex(0.05, 0.4)]
            pts += [complex(w.real, 0) for w in A.saddle_points(a)]
            for idx, w in enumerate(pts):
                num = [complex(_s1_diff(w, a, k)) for k in (1, 2, 3)]
                # S1' vanishes at the saddles, where only the absolute check above applies
                if idx < 3:
                    fd.append(_rel(A.s1_dw(w, a), num[0]))
                fd += [_rel(A.s1_dw2(w, a), num[1]), _rel(A.s1_dw3(w, a), num[2])]
                fd.append(_rel(A.s1_da(w, a), complex(_s1_diff(w, a, 1, wrt="a"))))
            for br, w in zip("+-", A.saddle_points(a)):
                fd.append(_rel(A.s1_second_derivative_at_saddle(a, br), float(_s1_diff(w.real, a, 2).real)))
            fd.append(_rel(A.saddle_derivative(a), _saddle_diff(a)))
            fd.append(_rel(A.decay_exponent(a)[1], _g_diff(a)))
        fd3 = float(_s1_diff(wp.real, A.ALPHA, 3).real)
        d["third_derivative_fd"] = fd3
        d["max_rel_fd_err"] = max(fd)
        ok = (d["w_plus_minus_gap_at_alpha"] <= 1e-7 and d["max_abs_S1prime"] <= 1e-10
              and d["third_derivative_err"] <= 1e-12 and max(ends.values()) <= 1e-6
              and d["max_rel_fd_err"] <= 1e-6)
        return ok, d

    return _timed(6, "saddle-point checks", run)


def criterion_7(ns=(50, 100, 200, 400)) -> CriterionResult:
    from .asymptotics import convergence_study

    def run():
        rows = convergence_study(ns)
        sup = {f"{r.i}{r.j}": {} for r in rows}
        sites = {f"{r.i}{r.j}": {} for r in rows}
        for r in rows:
            sup[f"{r.i}{r.j}"][r.n] = r.sup_error
            sites[f"{r.i}{r.j}"][r.n] = r.sup_error_sites
        ok = True
        for key, by_n in sup.items():
            errs = [by_n[n] for n in ns]
            ok &= all(b < a for a, b in zip(errs, errs[1:])) and errs[-1] <= 0.05
        return ok, {"sup_error": sup, "sup_error_at_sites": sites}

    return _timed(7, "rescaled kernel -> GOE kernel", run, budget=1800)


def criterion_8() -> CriterionResult:
    from .goetw import QuadratureRule, f1, f1_series, f1_values

    def run():
        grid = np.arange(-6.0, 4.0001, 0.25)
        vals = f1_values(grid)
        mono = bool(np.all(np.diff(vals) >= 0))
        lo, hi = float(vals[0]), float(vals[-1])
        stab = max(f1(float(s)).error for s in np.arange(-8.0, 8.0001, 1.0))
        series = max(abs(f1_series(s, 2) - f1(s, QuadratureRule(), estimate=False).value)
                     for s in (2.0, 2.5, 3.0, 4.0))
        ok = mono and lo < 0.01 and hi > 0.999 and stab < 1e-6 and series < 1e-6
        return ok, {"monotone": mono, "F1(-6)": lo, "F1(4)": hi, "node_doubling": stab,
                    "series_gap": series}

    return _timed(8, "F1 numerics", run)


def lattice_sup_distance(n: int, law: dict, cdf, lo: float = -4.0, hi: float = 3.0) -> float:
    """``sup_s |P[(max T - (1-alpha) n)/(c0 n^{1/3}) <= s] - F(s)|`` over ``[lo, hi]``.

    The finite-n law is a step function, so both one-sided limits at each jump
    inside the window count, as do the window ends.
    """
    from .sampler import rescale_max

    ts = np.array(sorted(law))
    p = np.array([float(law[t]) for t in ts])
    s = rescale_max(n, ts)
    cdf_n = np.cumsum(p)
    inside = (s >= lo) & (s <= hi)
    before = cdf_n - p
    d = 0.0
    if inside.any():
        d = max(np.max(np.abs(cdf_n[inside] - cdf(s[inside]))),
                np.max(np.abs(before[inside] - cdf(s[inside] - 1e-12))))
    for end in (lo, hi):
        k = np.searchsorted(s, end, side="right")
        d = max(d, abs((cdf_n[k - 1] if k else 0.0) - float(cdf(end))))
    return float(d)


def criterion_9(n_exact: int = 100, mc_ns=(50, 100, 200), samples: int = 5000) -> CriterionResult:
    from .goetw import F1Interpolant
    from .kernel import PrecisionPolicy, law_of_max_T
    from .sampler import empirical_max_law

    def run():
        F = F1Interpolant()
        law = law_of_max_T(n_exact, PrecisionPolicy("bigfloat", 256))
        sup = lattice_sup_distance(n_exact, law, F)
        ks = {}
        for n in mc_ns:
            # burn-in n^2 sweeps: 10 n sweeps leaves the chain visibly out of equilibrium at n=100
            ecdf = empirical_max_law(n, samples, sweeps=n, seed=20240 + n, burn_in=n * n, cdf=F)
            ks[n] = ecdf.ks
        ks_vals = [ks[n] for n in mc_ns]
        trend = all(b < a for a, b in zip(ks_vals, ks_vals[1:]))
        ok_a = sup <= 0.05
        ok_b = ks.get(100, 1.0) <= 0.1 and trend
        return ok_a and ok_b, {"exact_sup_distance": sup, "exact_pass": ok_a, "mc_ks": ks,
                               "mc_trend_decreasing": trend, "mc_pass": ok_b}

    return _timed(9, "max T_n fluctuations vs F1 at desk scale", run, budget=5400)


DETERMINISM_COMMANDS = [
    ["count", "--n", "6"],
    ["gap", "--n", "4", "--s", "2"],
    ["law", "--n", "5"],
    ["law", "--n", "12", "--mode", "bigfloat", "--bits", "128"],
    ["kasteleyn-check", "--n", "3"],
    ["tw-goe", "--s", "-1.5"],
    ["saddle", "--a", "0.2"],
    ["limit-shape", "--points", "11"],
    ["sample", "--n", "6", "--count", "5", "--sweeps", "3", "--seed", "7"],
    ["max-law", "--n", "20", "--count", "50", "--sweeps", "2", "--seed", "3"],
    ["converge", "--i", "1", "--j", "2", "--nmax", "50"],
]


def criterion_10(commands=DETERMINISM_COMMANDS) -> CriterionResult:
    import tempfile
    from pathlib import Path

    from .cli import main

    def run():
        diffs = []
        with tempfile.TemporaryDirectory() as tmp:
            for k, cmd in enumerate(commands):
                outs = []
                for rep, threads in enumerate(("1", "4", "1")):
                    path = Path(tmp) / f"{k}_{rep}.out"
                    code = main(cmd + ["--threads", threads, "--output", str(path)])
                    outs.append((code, path.read_bytes()))
                if len(set(outs)) != 1:
                    diffs.append(" ".join(cmd))
        return not diffs, {"commands": len(commands), "nondeterministic": diffs}

    return _timed(10, "bitwise determinism across runs and thread counts", run)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_all(which=None, echo=None) -> list[CriterionResult]:
    out = []
    for k in sorted(CRITERIA if which is None else which):
        r = CRITERIA[k]()
        if echo:
            echo(r.line())
        out.append(r)
    return out
