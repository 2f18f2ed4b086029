"""Time the numba loop kernels against the vectorized numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--sizes 64 128 256] [--repeat 5]

Both forms are called on identical inputs and their outputs are compared
before timing. With ``AXILIFT_DISABLE_NUMBA=1`` only the numpy column is
filled in.
"""
import argparse
import time

import numpy as np

from axilift import kernels
from axilift.elliptic import assemble, hardy_potential
from axilift.grid import build_grid


def best_of(func, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_stencil(n, repeat):
    g = build_grid(n, n)
    op = assemble(g, 3.0, hardy_potential(g, 0.8))
    u = np.random.default_rng(0).standard_normal(g.shape)
    out = np.empty_like(u)
    args = (u, op.kr_in, op.kz_in, op.diag, out)
    inner = 50
    res = {"numpy": best_of(lambda: [kernels.stencil_apply_numpy(*args) for _ in range(inner)], repeat) / inner}
    if kernels.HAS_NUMBA:
        ref = kernels.stencil_apply_numpy(*args).copy()
        kernels.stencil_apply_loops(*args)  # compile
        assert np.allclose(out, ref, rtol=1e-13, atol=1e-13)
        res["numba"] = best_of(lambda: [kernels.stencil_apply_loops(*args) for _ in range(inner)], repeat) / inner
    return res


def bench_cg(n, repeat):
    g = build_grid(n, n)
    op = assemble(g, 3.0)
    R, Z = g.mesh()
    f = np.ascontiguousarray(8 * (1 - Z**2) + 2 * (1 - R**2))

    def run(cg):
        x = np.zeros(g.shape)
        its, res = cg(op.kr_in, op.kz_in, op.diag, op.mass, f, x, 1e-10, 100000)
        assert res <= 1e-10
        return its

    res = {"numpy": best_of(lambda: run(kernels.cg_numpy), repeat)}
    if kernels.HAS_NUMBA:
        run(kernels.cg_loops)
        res["numba"] = best_of(lambda: run(kernels.cg_loops), repeat)
    return res


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[64, 128, 256])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    print(f"backend in use: {'numba' if kernels.HAS_NUMBA else 'numpy'}")
    print(f"{'kernel':<10}{'n':>6}{'numpy [s]':>14}{'numba [s]':>14}{'speedup':>10}")
    for name, bench in (("stencil", bench_stencil), ("cg", bench_cg)):
        for n in args.sizes:
            r = bench(n, args.repeat)
            nb = r.get("numba")
            speed = f"{r['numpy'] / nb:9.1f}x" if nb else f"{'-':>10}"
            print(f"{name:<10}{n:>6}{r['numpy']:>14.3e}{(nb if nb else float('nan')):>14.3e}{speed}")


if __name__ == "__main__":
    main()
