"""F0(rho) against its asymptote and the bounds rho - ln 16 <= F0 <= rho.

    python3 scripts/cardy_table.py
"""

import argparse

from cardytest.qseries import LN16, cardy_F0


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rho", type=float, nargs="+", default=[1, 2, 5, 10, 20, 50, 100, 200, 500])
    p.add_argument("--eps", type=float, default=1e-200, help="small enough to resolve the remainder")
    args = p.parse_args()
    print(f"{'rho':>6} {'F0':>22} {'rho - ln16':>12} {'F0 - asymptote':>15} {'K':>5} {'P':>7}")
    for rho in args.rho:
        ev = cardy_F0(rho, args.eps)
        flag = "" if ev.value >= rho - LN16 else "  below rho - ln16"
        print(f"{rho:6g} {ev.value:22.15f} {rho - LN16:12.6f} {ev.gap_to_asymptote:15.3e}"
              f" {ev.truncation_k:5d} {ev.truncation_prod:7d}{flag}")


if __name__ == "__main__":
    main()
