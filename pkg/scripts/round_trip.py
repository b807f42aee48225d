"""Forward-then-inverse study on the seeded synthetic corpus.

    python3 scripts/round_trip.py --seeds 0-9 -m 1024 -N 32
"""

import argparse
import json
import math
import time

import numpy as np

from pencil_inverse import Grid, PipelineConfig, forward, inverse, synthetic_potentials


def parse_seeds(text):
    lo, _, hi = text.partition("-")
    return list(range(int(lo), int(hi or lo) + 1))


def rel_l2(a, b):
    return math.sqrt(np.mean((a - b) ** 2)) / math.sqrt(np.mean(b**2))


def centred(f):
    return f - f.mean()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", default="0-9")
    ap.add_argument("-m", type=int, default=1024)
    ap.add_argument("-N", type=int, default=32)
    ap.add_argument("--alpha0", type=float, default=1.0)
    ap.add_argument("--no-refine", action="store_true")
    ap.add_argument("--json", help="write per-seed rows here")
    args = ap.parse_args()

    rows = []
    for seed in parse_seeds(args.seeds):
        t0 = time.perf_counter()
        pot = synthetic_potentials(seed, Grid(args.m))
        sd, _ = forward(pot, args.N)
        res = inverse(sd, PipelineConfig(m=args.m, N=args.N, alpha0=args.alpha0, refine=not args.no_refine))
        row = {
            "seed": seed,
            "p_rel_l2": rel_l2(res.potentials.p.values, pot.p.values),
            "r_rel_l2": rel_l2(centred(res.potentials.r.values), centred(pot.r.values)),
            **res.report["roundtrip"],
            "quantization_residual": res.report["quantization_residual"],
            "seconds": time.perf_counter() - t0,
        }
        rows.append(row)
        print("seed {seed:3d}  p {p_rel_l2:.2e}  r {r_rel_l2:.2e}  dlam {max_dlambda:.1e}  "
              "dalpha {max_dalpha:.1e}  {seconds:.1f}s".format(**row), flush=True)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
