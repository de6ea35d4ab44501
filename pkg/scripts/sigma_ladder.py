"""Semi-wavefront speed and right-tail class along a sigma ladder.

Prints CSV: sigma, c, relative gap to the exact local speed, right limit,
bounds_pass, wall time. Larger sigmas probe where the right tail stops
reaching A.

    python3 scripts/sigma_ladder.py 1.0 0.5 0.2 0.1 0.05 0.01 0.003 0.001
"""

import argparse
import math
import time

from nonlocal_fronts import KernelSpec, ModelParams, extract_semiwavefront


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("sigmas", type=float, nargs="*", default=[0.5, 0.2, 0.1, 0.05, 0.01, 0.003, 0.001])
    ap.add_argument("--d", type=float, default=0.16)
    ap.add_argument("--d0", type=float, default=0.1)
    ap.add_argument("--kernel", default="tophat")
    args = ap.parse_args()
    k = getattr(KernelSpec, args.kernel)()
    A = ModelParams(args.d, 1.0).A
    c_local = (3 * A - 2) / math.sqrt(2)
    print("sigma,c,rel_gap_local,right_limit,bounds_pass,seconds")
    for s in args.sigmas:
        t = time.perf_counter()
        f = extract_semiwavefront(ModelParams(args.d, s, args.d0), k, s)
        print(f"{s:.17g},{f.c:.17g},{(f.c - c_local) / c_local:.3e},{f.right_limit},{f.bounds_pass},"
              f"{time.perf_counter() - t:.1f}", flush=True)


if __name__ == "__main__":
    main()
