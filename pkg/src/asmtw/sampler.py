"""Glauber (heat-bath) dynamics on monotone triangles.

Each step picks a uniform entry ``g_{i,j}`` and redraws it uniformly from the
interval of values compatible with its neighbours.  The chain is irreducible
and uniform-stationary, so its law converges to the uniform measure on ASMs.

The hot loop lives in the compiled extension ``_glauber``; a pure-Python
implementation with the same RNG stream is used when the extension is
unavailable or when ``ASMTW_PURE_PYTHON=1``.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import ALPHA, C0
from .combinatorics import GogTrapezoid, PcsmMatrix, gog_to_pcsm, top_path

_MASK = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def _next(s: list[int]) -> int:
    result = (_rotl((s[1] * 5) & _MASK, 7) * 9) & _MASK
    t = (s[1] << 17) & _MASK
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


def allowed_range(g, n: int, i: int, j: int) -> tuple[int, int]:
    """Values ``g_{i,j}`` may take given all other entries (flat storage, 1-based i, j)."""
    e = i * (i - 1) // 2 + j - 1
    lo, hi = 1, n + 1 - (i - j)
    if j > 1:
        lo = max(lo, g[e - 1] + 1)
    if j < i:
        hi = min(hi, g[e + 1] - 1)
    if i > 1:
        up = (i - 1) * (i - 2) // 2 + j - 1
        if j <= i - 1:
            hi = min(hi, g[up])
        if j >= 2:
            lo = max(lo, g[up - 1])
    if i < n:
        down = i * (i + 1) // 2 + j - 1
        lo = max(lo, g[down])
        hi = min(hi, g[down + 1])
    return lo, hi


def _run_steps_py(g, n: int, state, steps: int) -> None:
    s = [int(v) for v in state]
    size = n * (n + 1) // 2
    for _ in range(steps):
        r = _next(s) % size
        i = (1 + math.isqrt(1 + 8 * r)) // 2
        j = r - i * (i - 1) // 2 + 1
        lo, hi = allowed_range(g, n, i, j)
        g[r] = lo + _next(s) % (hi - lo + 1)
    for k in range(4):
        state[k] = s[k]


def _select_backend():
    if os.environ.get("ASMTW_PURE_PYTHON") == "1":
        return "python", _run_steps_py
    try:
        from ._glauber import run_steps
    except ImportError:
        return "python", _run_steps_py
    return "cython", run_steps


BACKEND, _run_steps = _select_backend()


def seed_state(seed) -> np.ndarray:
    """Four nonzero 64-bit words for xoshiro256** from a numpy ``SeedSequence``."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    st = ss.generate_state(4, np.uint64)
    if not st.any():
        st[0] = 1
    return st


@dataclass
class GlauberChain:
    n: int
    seed: object = 0
    backend: str = BACKEND
    g: np.ndarray = field(init=False, repr=False)
    state: np.ndarray = field(init=False, repr=False)
    steps: int = field(init=False, default=0)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.backend not in ("cython", "python"):
            raise ValueError("backend must be 'cython' or 'python'")
        if self.backend == "cython" and BACKEND != "cython":
            raise RuntimeError("compiled backend unavailable")
        n = self.n
        # minimal triangle: row i is 1..i
        self.g = np.array([j for i in range(1, n + 1) for j in range(1, i + 1)], dtype=np.int32)
        self.state = seed_state(self.seed)

    @property
    def size(self) -> int:
        return self.n * (self.n + 1) // 2

    @property
    def sweeps(self) -> float:
        return self.steps / self.size

    def run(self, steps: int) -> "GlauberChain":
        if steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.backend == "cython":
            _run_steps(self.g, self.n, self.state, steps)
        else:
            g = self.g.tolist()
            st = [int(v) for v in self.state]
            _run_steps_py(g, self.n, st, steps)
            self.g[:] = g
            self.state[:] = np.array(st, dtype=np.uint64)
        self.steps += steps
        return self

    def sweep(self, count: int = 1) -> "GlauberChain":
        return self.run(count * self.size)

    def triangle(self) -> GogTrapezoid:
        n, flat = self.n, self.g.tolist()
        rows = [tuple(flat[i * (i - 1) // 2: i * (i + 1) // 2]) for i in range(1, n + 1)]
        return GogTrapezoid(n, n, rows)

    def pcsm(self) -> PcsmMatrix:
        return gog_to_pcsm(self.triangle())

    def x_gog(self) -> int:
        firsts = self.g[np.arange(1, self.n + 1) * np.arange(0, self.n) // 2]
        return int(min(self.n + 1, int((firsts + np.arange(0, self.n)).min())))

    def max_T(self) -> int:
        return self.n - self.x_gog()

    def copy_state(self) -> tuple:
        return self.g.tobytes(), self.state.tobytes()


def glauber_step(chain: GlauberChain) -> GlauberChain:
    return chain.run(1)


def sample_uniform(n: int, sweeps: int, seed=0, backend: str = BACKEND) -> PcsmMatrix:
    """Run ``sweeps * n(n+1)/2`` moves from the minimal triangle and return the PCSM."""
    if sweeps < 1:
        raise ValueError("sweeps must be at least 1")
    return GlauberChain(n, seed, backend).sweep(sweeps).pcsm()


@dataclass(frozen=True)
class EmpiricalCdf:
    n: int
    values: tuple[float, ...] = field(repr=False)
    center: float
    scale: float
    ks: float | None = None
    center_values: tuple[float, ...] | None = field(default=None, repr=False)

    @property
    def count(self) -> int:
        return len(self.values)

    def __call__(self, s) -> np.ndarray:
        xs = np.asarray(self.values)
        return np.searchsorted(xs, np.asarray(s, dtype=float), side="right") / len(xs)

    def table(self) -> list[tuple[float, float]]:
        uniq, counts = np.unique(self.values, return_counts=True)
        return list(zip(uniq.tolist(), (np.cumsum(counts) / len(self.values)).tolist()))


def rescale_max(n: int, t) -> np.ndarray:
    return (np.asarray(t, dtype=float) - (1 - ALPHA) * n) / (C0 * n ** (1 / 3))


def empirical_max_law(n: int, samples: int, sweeps: int = 1, seed=0, burn_in: int | None = None,
                      backend: str = BACKEND, center_stats: bool = False, cdf=None) -> EmpiricalCdf:
    """Rescaled ``max T_n`` along one chain: ``burn_in`` sweeps (default ``10 n``)
    then one sample every ``sweeps`` sweeps.  ``cdf`` defaults to F1."""
    from .goetw import F1Interpolant, ks_distance

    if samples < 1 or sweeps < 1:
        raise ValueError("samples and sweeps must be positive")
    burn_in = 10 * n if burn_in is None else burn_in
    chain = GlauberChain(n, seed, backend).sweep(burn_in)
    raw, centre = [], []
    for _ in range(samples):
        chain.sweep(sweeps)
        raw.append(chain.max_T())
        if center_stats:
            centre.append(top_path(chain.pcsm())[0])
    vals = np.sort(rescale_max(n, raw))
    cdf = F1Interpolant() if cdf is None else cdf
    scale = C0 * n ** (1 / 3)
    cvals = None
    if center_stats:
        cvals = tuple(((np.asarray(centre) - (1 - ALPHA) * n) / (4 ** (1 / 3) * scale)).tolist())
    return EmpiricalCdf(n, tuple(vals.tolist()), (1 - ALPHA) * n, scale, ks_distance(vals, cdf), cvals)
