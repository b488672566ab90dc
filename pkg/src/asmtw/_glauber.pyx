# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled heat-bath sweeps on monotone triangles (xoshiro256** RNG)."""
from libc.math cimport sqrt
from libc.stdint cimport uint64_t, int32_t


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _next(uint64_t* s) nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


def run_steps(int32_t[::1] g, int n, uint64_t[::1] state, long long steps):
    """Apply ``steps`` heat-bath moves in place; ``state`` is advanced too."""
    cdef uint64_t s[4]
    cdef long long step
    cdef uint64_t size = <uint64_t>(n * (n + 1) // 2)
    cdef int i, j, lo, hi, v, e, up, down
    cdef uint64_t r
    for e in range(4):
        s[e] = state[e]
    with nogil:
        for step in range(steps):
            r = _next(s) % size
            # locate row i (1-based) and column j of flat entry r
            i = <int>((1.0 + sqrt(1.0 + 8.0 * <double>r)) / 2.0)
            while <uint64_t>(i * (i - 1) // 2) > r:
                i -= 1
            while <uint64_t>(i * (i + 1) // 2) <= r:
                i += 1
            e = <int>r
            j = e - (i * (i - 1) // 2) + 1
            lo = 1
            hi = n + 1 - (i - j)
            if j > 1 and g[e - 1] + 1 > lo:
                lo = g[e - 1] + 1
            if j < i and g[e + 1] - 1 < hi:
                hi = g[e + 1] - 1
            if i > 1:
                up = (i - 1) * (i - 2) // 2 + j - 1
                if j <= i - 1 and g[up] < hi:
                    hi = g[up]
                if j >= 2 and g[up - 1] > lo:
                    lo = g[up - 1]
            if i < n:
                down = i * (i + 1) // 2 + j - 1
                if g[down] > lo:
                    lo = g[down]
                if g[down + 1] < hi:
                    hi = g[down + 1]
            v = lo + <int>(_next(s) % <uint64_t>(hi - lo + 1))
            g[e] = v
    for e in range(4):
        state[e] = s[e]
