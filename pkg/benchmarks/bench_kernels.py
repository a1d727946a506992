"""Time the compiled and NumPy stencil kernels on 2-D fields.

    python3 benchmarks/bench_kernels.py [--n 512] [--repeat 20]
"""

import argparse
import timeit

import numpy as np

from sbpquad import kernels
from sbpquad.operators import build_operator
from sbpquad.tensor import apply_Deta, apply_Dxi


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=512)
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    u = np.random.default_rng(0).standard_normal((args.n + 1, args.n + 1))
    backends = kernels.available_backends()
    print(f"grid {args.n + 1}^2, best of {args.repeat}, backends: {', '.join(backends)}")
    print(f"{'family':<10}{'axis':<6}" + "".join(f"{b + ' [ms]':>16}" for b in backends) + f"{'speedup':>10}")
    for fam in ("diag-1-2", "diag-2-4", "diag-3-6"):
        op = build_operator(fam, args.n)
        for axis, fn in (("xi", apply_Dxi), ("eta", apply_Deta)):
            times = {}
            for b in backends:
                kernels.use_backend(b)
                times[b] = min(timeit.repeat(lambda: fn(op, u), number=1, repeat=args.repeat)) * 1e3
            speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
            print(f"{fam:<10}{axis:<6}" + "".join(f"{times[b]:>16.3f}" for b in backends) + f"{speed:>10.2f}")


if __name__ == "__main__":
    main()
