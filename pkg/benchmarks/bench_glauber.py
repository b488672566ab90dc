"""Compiled vs pure-Python Glauber moves on monotone triangles.

    python benchmarks/bench_glauber.py --n 50 --sweeps 20

Both backends share the RNG stream, so the final triangles must agree.
"""
import argparse
import time

from asmtw import sampler


def time_backend(backend, n, sweeps, seed):
    ch = sampler.GlauberChain(n, seed, backend)
    t0 = time.perf_counter()
    ch.sweep(sweeps)
    dt = time.perf_counter() - t0
    return dt, ch


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--sweeps", type=int, default=20)
    p.add_argument("--seed", type=int, default=1)
    a = p.parse_args(argv)

    steps = a.sweeps * a.n * (a.n + 1) // 2
    results, times = {}, {}
    backends = ["python"] + (["cython"] if sampler.BACKEND == "cython" else [])
    for b in backends:
        dt, ch = time_backend(b, a.n, a.sweeps, a.seed)
        results[b], times[b] = ch, dt
        print(f"{b:>7}: {dt:8.3f} s  {1e9 * dt / steps:9.1f} ns/step")
    if len(results) == 2:
        same = (results["python"].g == results["cython"].g).all()
        print(f"speedup: {times['python'] / times['cython']:.0f}x, identical final state: {bool(same)}")
    else:
        print("compiled extension not built; only the Python backend was timed")


if __name__ == "__main__":
    main()
