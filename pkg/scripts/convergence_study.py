"""L2 error against the manufactured solution as the degree increases.

    python scripts/convergence_study.py configs/advection_convergence.cfg --N 2 4 6 8 10
"""

import argparse
from dataclasses import replace

from splitdg.cli import convergence_table
from splitdg.config import parse_config


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("config")
    parser.add_argument("--N", type=int, nargs="+", default=[2, 4, 6, 8])
    parser.add_argument("--cfl", type=float, nargs="+", default=None,
                        help="repeat the sweep for each CFL number to separate time and space error")
    args = parser.parse_args()

    base = parse_config(args.config)
    for cfl in args.cfl or [base.cfl]:
        print(f"cfl = {cfl}")
        for N, err, rate in convergence_table(replace(base, cfl=cfl), args.N):
            print(f"  N={N:3d}  error={err:.3e}  rate={'' if rate is None else f'{rate:.2f}'}")


if __name__ == "__main__":
    main()
