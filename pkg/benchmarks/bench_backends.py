"""Convolution backend comparison: gmp (gmpy2/GMP) vs purepy (CPython ints).

Times the exact integer convolution that dominates every correlation sum,
at sizes matching real kernel cuts, plus one end-to-end smoothed sum per
backend.  Run:

    python3 benchmarks/bench_backends.py [--sizes 1000,4000,16000] [--repeat 3]
"""

import argparse
import time

from tricorr import convolve, forms
from tricorr.corrsum import SmoothingKernel, triple_sum_direct


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_convolutions(sizes, repeat):
    top = max(sizes)
    form = forms.gen_level1_eigenform(12, 2 * top)
    print(f"{'n':>8} {'gmp':>12} {'purepy':>12} {'ratio':>8}")
    for n in sizes:
        a = form.coeffs[1 : n + 1]
        c = form.coeffs[1 : 2 * n + 1]
        B = convolve.slot_width(a, c)
        n_out = len(a) + len(c) - 1
        rows = {}
        for name in ("gmp", "purepy"):
            try:
                backend = convolve.get_backend(name)
            except ImportError:
                rows[name] = None
                continue
            rows[name] = time_call(
                lambda b=backend: b.convolve_packed(a, c, B, n_out), repeat
            )
        g, p = rows["gmp"], rows["purepy"]
        ratio = f"{p / g:8.2f}" if g and p else "     n/a"
        print(f"{n:>8} {_fmt(g):>12} {_fmt(p):>12} {ratio}")


def bench_end_to_end(repeat):
    form = forms.gen_level1_eigenform(12, 42000)
    kernel = SmoothingKernel.exponential(512, 512)
    print("\nfull smoothed sum, X = Y = 512, tail factor 40:")
    saved = convolve._impl  # backend is normally fixed at import
    try:
        for name in ("gmp", "purepy"):
            try:
                backend = convolve.get_backend(name)
            except ImportError:
                print(f"  {name:>7}: unavailable")
                continue
            convolve._impl = backend
            t = time_call(
                lambda: triple_sum_direct(form, form, form, kernel), repeat
            )
            print(f"  {name:>7}: {_fmt(t)}")
    finally:
        convolve._impl = saved


def _fmt(t):
    if t is None:
        return "n/a"
    return f"{t * 1e3:.1f} ms" if t < 1 else f"{t:.2f} s"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="1000,4000,16000")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"selected backend at import: {convolve.backend_name()}\n")
    bench_convolutions(sizes, args.repeat)
    bench_end_to_end(args.repeat)


if __name__ == "__main__":
    main()
