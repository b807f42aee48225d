"""Round-trip p-error against the grid size for a few corpus seeds.

    python3 scripts/grid_convergence.py --seeds 0-2 --grids 256 512 1024 2048
"""

import argparse
import math

import numpy as np

from pencil_inverse import Grid, PipelineConfig, forward, inverse, synthetic_potentials


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0-2")
    ap.add_argument("--grids", type=int, nargs="+", default=[256, 512, 1024, 2048])
    ap.add_argument("-N", type=int, default=32)
    args = ap.parse_args()
    lo, _, hi = args.seeds.partition("-")
    print("seed " + " ".join(f"{m:>10d}" for m in args.grids) + "   ratios")
    for seed in range(int(lo), int(hi or lo) + 1):
        errs = []
        for m in args.grids:
            pot = synthetic_potentials(seed, Grid(m))
            sd, _ = forward(pot, args.N)
            p = inverse(sd, PipelineConfig(m=m, N=args.N)).potentials.p.values
            errs.append(math.sqrt(np.mean((p - pot.p.values) ** 2) / np.mean(pot.p.values**2)))
        ratios = [a / b for a, b in zip(errs, errs[1:])]
        print(f"{seed:4d} " + " ".join(f"{e:10.2e}" for e in errs) + "   "
              + " ".join(f"{r:6.1f}" for r in ratios), flush=True)


if __name__ == "__main__":
    main()
