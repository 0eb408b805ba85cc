"""Time each kernel under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]

Prints one line per kernel with the best-of-``repeat`` time for both
backends, the speed-up and the largest relative disagreement.
"""

import argparse
import time

import numpy as np

from mollicrit import kernels


def _cases(scale):
    rng = np.random.default_rng(7)
    n_coef = int(20000 * scale)
    a = rng.standard_normal(n_coef) + 1j * rng.standard_normal(n_coef)
    s = 0.4 + 1j * rng.uniform(1000, 2000, int(200 * scale))
    g = rng.standard_normal(int(2000 * scale)).astype(np.complex128)
    m = rng.standard_normal(int(80 * scale)).astype(np.complex128)
    n_t = int(4000 * scale)
    return [
        ("dirichlet_eval", lambda: kernels.dirichlet_eval(a, s)),
        ("dirichlet_eval_tgrid", lambda: kernels.dirichlet_eval_tgrid(a, 0.35, 1000.0, 0.03, n_t)),
        ("power_sums", lambda: kernels.power_sums(s, n_coef)),
        ("dirichlet_convolve", lambda: kernels.dirichlet_convolve(g, m)),
        ("linear_sieve", lambda: kernels.linear_sieve(int(2_000_000 * scale))),
    ]


def _best(fn, repeat):
    out = fn()  # also triggers compilation
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _rel_diff(x, y):
    if isinstance(x, tuple):
        return max(_rel_diff(u, v) for u, v in zip(x, y))
    x, y = np.asarray(x), np.asarray(y)
    scale = max(float(np.max(np.abs(y))), 1e-300)
    return float(np.max(np.abs(x.astype(np.complex128) - y.astype(np.complex128)))) / scale


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    prev = kernels.backend()
    print(f"{'kernel':<22}{'numba [s]':>12}{'numpy [s]':>12}{'speed-up':>10}{'rel diff':>12}")
    try:
        for name, fn in _cases(args.scale):
            kernels.set_backend("numba")
            t_nb, r_nb = _best(fn, args.repeat)
            kernels.set_backend("numpy")
            t_np, r_np = _best(fn, args.repeat)
            print(f"{name:<22}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}{_rel_diff(r_nb, r_np):>12.1e}")
    finally:
        kernels.set_backend(prev)


if __name__ == "__main__":
    main()
