"""Scaling of the magnetoinductive hierarchy potentials.

Feeds a frozen transverse distribution of size eps^2 through the elliptic
hierarchy and measures how each potential A_j shrinks as eps -> 0; the j-th
potential should scale like eps^(2j+1).

Usage: python3 demos/hierarchy_scaling.py
"""

import numpy as np

from kinlim import PhaseGrid, build_hierarchy, darwin_potentials, deposit_moments, equilibrium
from kinlim.cli import fit_loglog_slope
from kinlim.phase_space import DistField, PERTURBATION

L = 4.0 * np.pi


def main():
    grid = PhaseGrid(n_x=16, length=L, n_v=64, v_max=8.0, dim_v=2)
    eq = equilibrium("maxwellian", dim_v=2, n_v=64, v_max=8.0, sigma=1.0)
    x = grid.x
    V = grid.v_nodes()
    prof = (np.cos(2.0 * np.pi * x / L)[:, None, None]
            * ((V[..., 1] + 0.3 * V[..., 0] ** 2 * V[..., 1])
               * np.exp(-np.sum(V * V, axis=-1) / 2.0))[None, ...])

    eps_values = [0.05, 0.025, 0.0125]
    norms = {1: [], 2: [], 3: []}
    print(f"{'eps':>8} {'||A_1||':>12} {'||A_2||':>12} {'||A_3||':>12}")
    for eps in eps_values:
        h = build_hierarchy(eq, eps, 3, grid)
        g = DistField(grid, eps * eps * prof, PERTURBATION)
        mom = deposit_moments(g, eps, max_ell=7)
        row = []
        for j, A in enumerate(darwin_potentials(h, mom), start=1):
            n = float(np.sqrt(np.sum(A**2) * grid.dx))
            norms[j].append(n)
            row.append(n)
        print(f"{eps:>8} {row[0]:>12.3e} {row[1]:>12.3e} {row[2]:>12.3e}")

    print("\nfitted log-log slopes (expected 2j + 1):")
    for j in (1, 2, 3):
        slope, half = fit_loglog_slope(eps_values, norms[j])
        print(f"  A_{j}: {slope:.3f} +/- {half:.3f}   (expected {2 * j + 1})")


if __name__ == "__main__":
    main()
