"""Equilibrium displacement under a growing bounded pressure perturbation.

Sweeps eps over a geometric grid for the two-genotype flat model with a
tanh bump added to each pressure, solving the perturbed equilibrium by
continuation at every step. The l1 displacement and its ratio to sqrt(eps)
are tabulated; a bounded ratio over decades is the stability signature.

Usage: python3 scripts/perturbation_response.py [--decades 4] [--per-decade 2]
"""
import argparse
import sys

import numpy as np

from lvmut.analysis import perturbation_sweep
from lvmut.presets import get_preset


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--decades", type=int, default=4)
    ap.add_argument("--per-decade", type=int, default=2)
    ap.add_argument("--eps-max", type=float, default=1e-2)
    args = ap.parse_args(argv)

    base = get_preset("sym2").model
    bump = get_preset("pert2").model.interaction
    count = args.decades * args.per_decade + 1
    grid = np.geomspace(args.eps_max * 10.0 ** (-args.decades), args.eps_max, count)
    table = perturbation_sweep(base, bump.amp, bump.w, list(grid))

    print(f"{'eps':>12} {'sigma':>12} {'l1 dist':>14} {'dist/sqrt(eps)':>16}")
    ratios = []
    for row in table.rows:
        if row.failed:
            print(f"{row.eps:>12.3e} {row.sigma:>12.3e}   failed: {row.error}")
            continue
        if row.eps == 0.0:
            print(f"{row.eps:>12.3e} {row.sigma:>12.3e} {row.l1_distance:>14.6e}")
            continue
        ratios.append(row.ratio)
        print(
            f"{row.eps:>12.3e} {row.sigma:>12.3e} {row.l1_distance:>14.6e}"
            f" {row.ratio:>16.6f}"
        )
    if ratios:
        spread = max(ratios) / min(ratios)
        print(f"ratio spread over the grid: {spread:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
