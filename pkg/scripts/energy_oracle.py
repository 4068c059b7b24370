"""Compare solver radii with the equilibrium-energy and Fekete capacity estimates.

    python3 scripts/energy_oracle.py --parts 1,1,2 1,2,3 --N 256
"""

import argparse

from cardytest.fekete import SegmentSet, capacity_estimate
from cardytest.slitmap import GapVector, rho0_from_gaps


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--parts", nargs="+", default=["1", "1,1", "1,1,2", "1,2,3", "2,1,1,4"])
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--fekete-n", type=int, nargs="+", default=[8, 16, 32])
    args = p.parse_args()
    for text in args.parts:
        gaps = GapVector.from_parts([int(x) for x in text.split(",")])
        rho0 = rho0_from_gaps(gaps)
        est = capacity_estimate(SegmentSet.from_gaps(gaps.gammas), args.N, args.fekete_n, restarts=2)
        deltas = "  ".join(f"d{n}={d:.4f}" for n, d in est.delta_sequence)
        print(f"{text:>10}  rho0={rho0:.10f}  rho0*cap={rho0 * est.rho_inf:.8f}  {deltas}")


if __name__ == "__main__":
    main()
