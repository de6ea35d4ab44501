"""Distance between nonlocal monotone fronts and the local front as sigma -> 0.

    python3 scripts/sigma_to_zero_monotone.py --c 3
"""

import argparse

import numpy as np

from nonlocal_fronts import KernelSpec, ModelParams, MonotoneConfig, local_bvp_front, solve_monotone


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=float, default=0.16)
    ap.add_argument("--c", type=float, default=3.0)
    ap.add_argument("sigmas", type=float, nargs="*", default=[0.2, 0.1, 0.05, 0.01, 0.001])
    args = ap.parse_args()
    ref = local_bvp_front(ModelParams(args.d, 0.0), args.c, "a_to_A", L=80, h=0.005)
    k = KernelSpec.tophat()
    print("sigma,sup_distance,iterations,residual_sup")
    for s in args.sigmas:
        f = solve_monotone(args.c, s, ModelParams(args.d, s), k, MonotoneConfig(h=min(0.01, s / 4)))
        dist = np.max(np.abs(f.profile.values - ref.profile(f.profile.x)))
        print(f"{s:.17g},{dist:.6e},{f.iterations},{f.residual_sup:.3e}", flush=True)


if __name__ == "__main__":
    main()
