"""Compare the compiled and numpy grid sweeps on placement objectives.

    python3 benchmarks/bench_grid.py [--q 1000] [--repeat 3]
"""
import argparse
import time

from repeatergates import _kernels_py, bounds

try:
    from repeatergates import _kernels as compiled
except ImportError:
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=int, default=1000)
    ap.add_argument("--q3", type=int, default=120, help="resolution for three-relay families")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'family':<8}{'q':>6}{'numpy s':>12}{'cython s':>12}{'speedup':>10}  agree")
    for family in ("P3.2", "P2.2", "P5.2", "P1.3"):
        variant, exprs = bounds.objective(family)
        coeffs, ids = bounds._piece_matrix(exprs)
        q = args.q if variant.n <= 2 else args.q3
        t_py, r_py = best_of(lambda: _kernels_py.grid_minimize(coeffs, ids, len(exprs), q, variant.n), args.repeat)
        if compiled is None:
            print(f"{family:<8}{q:>6}{t_py:>12.4f}{'n/a':>12}{'':>10}  -")
            continue
        t_cy, r_cy = best_of(lambda: compiled.grid_minimize(coeffs, ids, len(exprs), q, variant.n), args.repeat)
        agree = r_py[1] == r_cy[1] and abs(r_py[0] - r_cy[0]) < 1e-12
        print(f"{family:<8}{q:>6}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>10.1f}  {agree}")


if __name__ == "__main__":
    main()
