"""Speed threshold c_star(sigma) for each kernel family, as CSV.

    python3 scripts/c_star_sweep.py --d 0.16 --smax 6
"""

import argparse

import numpy as np

from nonlocal_fronts import KernelSpec, ModelParams, c_star, speed_threshold


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=float, default=0.16)
    ap.add_argument("--smax", type=float, default=6.0)
    ap.add_argument("--n", type=int, default=25)
    args = ap.parse_args()
    m = ModelParams(args.d, 1.0)
    fams = ("tophat", "gaussian", "laplace")
    print(f"# operator threshold 2 sqrt(2A-d) = {speed_threshold(m):.12g}")
    print("sigma," + ",".join(fams))
    for s in np.linspace(args.smax / args.n, args.smax, args.n):
        vals = [c_star(s, m, getattr(KernelSpec, f)()) for f in fams]
        print(f"{s:.17g}," + ",".join(f"{v:.17g}" for v in vals))


if __name__ == "__main__":
    main()
