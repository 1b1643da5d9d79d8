#!/usr/bin/env python3
"""Time the stencil backends against each other on identical workloads.

Runs the full pass loop once per backend and reports the best-of-N wall
time plus the speedup. The outputs must agree bit for bit; a mismatch is
a bug and fails the script.
"""
import argparse
import math
import sys
import time

import numpy as np

from balldiff._kernel import select_kernel


def _workload(nx: int, passes: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.linspace(-10.0, 10.0, nx)
    values = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    # ramp like a growing diffusion coefficient, capped below the stability bound
    nus = np.linspace(0.0, 0.4, passes)
    return values, nus


def _best_time(impl, values, nus, repeat: int) -> tuple[float, np.ndarray]:
    best = math.inf
    out = values
    for _ in range(repeat):
        start = time.perf_counter()
        out = impl.apply_passes(values, nus)
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nx", type=int, nargs="+", default=[2000, 20000],
                        help="grid sizes to time (default: 2000 20000)")
    parser.add_argument("--passes", type=int, default=500,
                        help="stencil passes per timing (default: 500)")
    parser.add_argument("--repeat", type=int, default=3,
                        help="repetitions, best one counts (default: 3)")
    args = parser.parse_args(argv)

    python_impl, _ = select_kernel("python")
    try:
        compiled_impl, _ = select_kernel("compiled")
    except ImportError:
        compiled_impl = None
        print("compiled backend not built; timing the numpy backend only")

    status = 0
    for nx in args.nx:
        values, nus = _workload(nx, args.passes)
        t_py, out_py = _best_time(python_impl, values, nus, args.repeat)
        line = f"nx={nx:<8d} passes={args.passes:<6d} python {1e3 * t_py:8.2f} ms"
        if compiled_impl is not None:
            t_c, out_c = _best_time(compiled_impl, values, nus, args.repeat)
            agree = np.array_equal(out_py, out_c)
            line += f"   compiled {1e3 * t_c:8.2f} ms   speedup {t_py / t_c:5.1f}x"
            line += f"   bitwise {'ok' if agree else 'MISMATCH'}"
            if not agree:
                status = 1
        print(line)
    return status


if __name__ == "__main__":
    sys.exit(main())
