"""Compare the compiled convolution kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each case counts J_r(N) for t^3 + s^3 with both backends, checks that the
results agree, and prints the best wall time of each and the speed-up.
"""

import argparse
import time

from cubicdecoupling import CubicForm, _backend, count_J

CASES = [(2, 8), (2, 16), (2, 32), (3, 6), (3, 10), (4, 4)]
QUICK = [(2, 8), (3, 6)]


def best_time(fn, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true", help="two small cases only")
    args = parser.parse_args(argv)

    if "compiled" not in _backend.available():
        print("compiled kernels are not built; only the Python backend is available")
        return 1
    phi = CubicForm(1, 0, 0, 1)
    print(f"{'r':>2} {'N':>4} {'J':>16} {'compiled s':>11} {'python s':>10} {'speed-up':>9}")
    for r, n in QUICK if args.quick else CASES:
        tc, jc = best_time(lambda: count_J(phi, r, n, backend="compiled"), args.repeat)
        tp, jp = best_time(lambda: count_J(phi, r, n, backend="python"), args.repeat)
        if jc != jp:
            raise SystemExit(f"backend mismatch at r={r} N={n}: {jc} != {jp}")
        print(f"{r:>2} {n:>4} {jc:>16} {tc:>11.4f} {tp:>10.4f} {tp / tc:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
