"""Compare the numba kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--scales 20000] [--points 12] [--repeat 5]
"""

import argparse
import time

import numpy as np

from qconn import _kernels


def random_balls(S: int, n: int, rng: np.random.Generator, density: float = 0.15) -> np.ndarray:
    bits = rng.random((S, n, n)) < density
    bits[:, np.arange(n), np.arange(n)] = True
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    return (bits.astype(np.uint64) * weights).sum(axis=2).astype(np.uint64)


def random_nbhd(n: int, rng: np.random.Generator) -> np.ndarray:
    reach = rng.random((n, n)) < 0.2
    np.fill_diagonal(reach, True)
    for k in range(n):
        reach |= reach[:, k : k + 1] & reach[k : k + 1, :]
    weights = np.uint64(1) << np.arange(n, dtype=np.uint64)
    return (reach.astype(np.uint64) * weights).sum(axis=1).astype(np.uint64)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--scales", type=int, default=20000)
    ap.add_argument("--points", type=int, default=12)
    ap.add_argument("--scan-points", type=int, default=18)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    balls = random_balls(args.scales, args.points, rng)
    nbhd = random_nbhd(args.scan_points, rng)

    if not _kernels.USE_NUMBA:
        print("numba unavailable or disabled; only the numpy path can run")
    # warm up the JIT so compile time is not measured
    _kernels.component_labels(balls[:2])
    _kernels.clopen_masks(nbhd[:4])

    assert np.array_equal(_kernels.component_labels(balls), _kernels.component_labels(balls, force_numpy=True))
    assert np.array_equal(_kernels.clopen_masks(nbhd), np.sort(_kernels.clopen_masks(nbhd, force_numpy=True)))

    rows = [
        ("component_labels", f"{args.scales} scales x {args.points} points",
         lambda: _kernels.component_labels(balls), lambda: _kernels.component_labels(balls, force_numpy=True)),
        ("clopen_masks", f"2^{args.scan_points} subsets",
         lambda: _kernels.clopen_masks(nbhd), lambda: _kernels.clopen_masks(nbhd, force_numpy=True)),
    ]
    print(f"{'kernel':<18} {'size':<28} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, size, fast, slow in rows:
        a = best_of(fast, args.repeat) * 1e3
        b = best_of(slow, args.repeat) * 1e3
        print(f"{name:<18} {size:<28} {a:>10.2f} {b:>10.2f} {b / a:>7.1f}x")


if __name__ == "__main__":
    main()
