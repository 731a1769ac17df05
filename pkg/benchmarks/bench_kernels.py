"""Time the compiled kernels against the pure numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from spectrasketch import kernels
from spectrasketch.linalg import eigh
from spectrasketch.mvee import mvee_centered
from spectrasketch.tensor import sym_lift_matrix


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((30, 30))
    A = A + A.T
    X = rng.uniform(-1, 1, size=(2000, 5))
    S = rng.standard_normal((500, 6))
    S /= np.linalg.norm(S, axis=1)[:, None]
    Z = sym_lift_matrix(rng.standard_normal((400, 3)), 2)
    return {
        "jacobi 30x30": lambda: eigh(A),
        "lift 2000 pts d=5 k=4": lambda: sym_lift_matrix(X, 4),
        "mvee 500 sphere pts R^6": lambda: mvee_centered(S, gap_tol=1e-7),
        "mvee 400 lifted pts D=6": lambda: mvee_centered(Z, gap_tol=1e-7),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = kernels.available_backends()
    results = {}
    for name in backends:
        prev = kernels.use_backend(name)
        for label, fn in cases(args.seed).items():
            fn()  # warm caches
            results[label, name] = best_of(fn, args.repeat)
        kernels.use_backend(prev)

    labels = list(cases(args.seed))
    width = max(map(len, labels))
    print(f"{'case':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + ("  speedup" if len(backends) > 1 else ""))
    for label in labels:
        row = [results[label, b] for b in backends]
        line = f"{label:<{width}}  " + "  ".join(f"{t * 1e3:8.2f}ms" for t in row)
        if len(backends) > 1:
            line += f"  {row[1] / row[0]:6.1f}x"
        print(line)
    if len(backends) == 1:
        print("compiled extension not built; only the python backend was timed")


if __name__ == "__main__":
    main()
