"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--length 256] [--repeat 3]

Prints the best-of-``repeat`` wall time per kernel and backend, plus the
speedup of the compiled core. Skips the compiled column if it is not built.
"""

import argparse
import timeit

import numpy as np

from salientdtw._kernels import backend_module


def workloads(length, rng):
    x, y = rng.normal(size=length), rng.normal(size=length)
    lo = np.maximum(np.arange(length) - length // 10, 0).astype(np.intp)
    hi = np.minimum(np.arange(length) + length // 10, length - 1).astype(np.intp)
    npairs = 200
    st1, st2 = rng.uniform(0, length, npairs), rng.uniform(0, length, npairs)
    w1, w2 = rng.uniform(2, 30, npairs), rng.uniform(2, 30, npairs)
    nf = 300
    desc = rng.normal(size=(2, nf, 64))
    amp = rng.normal(size=(2, nf))
    sig = rng.uniform(1, 10, size=(2, nf))
    cuts = np.linspace(0, length, 9).round().astype(np.intp)
    return {
        "dtw_full": lambda k: k.dtw_full(x, y, 0, True),
        "dtw_banded": lambda k: k.dtw_banded(x, y, lo, hi, 0, True),
        "prune_ranked": lambda k: k.prune_ranked(st1, st1 + w1, st2, st2 + w2),
        "dominant_pairs": lambda k: k.dominant_pairs(amp[0], sig[0], desc[0], amp[1],
                                                     sig[1], desc[1], 1.0, 4.0, 1.5),
        "band_rows": lambda k: k.band_rows(length, length, cuts, cuts, True, 1, 0.0,
                                           0.2, 1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = {"python": backend_module("python")}
    try:
        backends["compiled"] = backend_module("compiled")
    except ImportError:
        print("# compiled core not built; python backend only")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}" + "".join(f"{b + ' ms':>14}" for b in backends) + f"{'speedup':>10}")
    for name, fn in workloads(args.length, rng).items():
        ms = {}
        for b, mod in backends.items():
            ms[b] = 1e3 * min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        speed = f"{ms['python'] / ms['compiled']:>9.1f}x" if "compiled" in ms else ""
        print(f"{name:<16}" + "".join(f"{v:>14.3f}" for v in ms.values()) + speed)


if __name__ == "__main__":
    main()
