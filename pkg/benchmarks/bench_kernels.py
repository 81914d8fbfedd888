"""Time the compiled and pure-Python batch kernels on random CSR data.

    python3 benchmarks/bench_kernels.py --researchers 20000 --repeat 3
"""
import argparse
import timeit

import numpy as np

from hgbench import _backend


def make_batch(n_researchers, mean_papers, seed):
    rng = np.random.default_rng(seed)
    sizes = rng.poisson(mean_papers, n_researchers)
    offsets = np.zeros(n_researchers + 1, dtype=np.int64)
    np.cumsum(sizes, out=offsets[1:])
    total = int(offsets[-1])
    cites = np.floor(rng.lognormal(1.5, 1.2, total)).astype(np.int64)
    authors = rng.integers(1, 8, total).astype(np.int64)
    # each segment sorted by citations descending
    for lo, hi in zip(offsets[:-1], offsets[1:]):
        order = np.argsort(-cites[lo:hi], kind="stable")
        cites[lo:hi] = cites[lo:hi][order]
        authors[lo:hi] = authors[lo:hi][order]
    return cites, authors, offsets


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--researchers", type=int, default=20000)
    ap.add_argument("--papers", type=float, default=12.0, help="mean papers per researcher")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cites, authors, offsets = make_batch(args.researchers, args.papers, args.seed)
    kernels = _backend.available()
    print(f"{args.researchers} researchers, {len(cites)} papers; backends: {sorted(kernels)}")
    results = {}
    for name, k in sorted(kernels.items()):
        h = k.h_batch(cites, offsets)
        jobs = {
            "h_batch": lambda: k.h_batch(cites, offsets),
            "g_batch": lambda: k.g_batch(cites, offsets, True),
            "hm_batch": lambda: k.hm_batch(cites, authors, offsets),
            "hi_batch": lambda: k.hi_batch(authors, offsets, h),
            "hreal_batch": lambda: k.hreal_batch(cites.astype(np.float64), offsets),
        }
        for job, fn in jobs.items():
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            results[(name, job)] = (best, np.asarray(fn()))

    print(f"{'kernel':<12} " + " ".join(f"{n:>12}" for n in sorted(kernels)) + "     speedup  agree")
    for job in ("h_batch", "g_batch", "hm_batch", "hi_batch", "hreal_batch"):
        times = [results[(n, job)][0] for n in sorted(kernels)]
        line = f"{job:<12} " + " ".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if "cython" in kernels:
            py, cy = results[("python", job)], results[("cython", job)]
            line += f"  {py[0] / cy[0]:>9.1f}x  {np.array_equal(py[1], cy[1])}"
        print(line)


if __name__ == "__main__":
    main()
