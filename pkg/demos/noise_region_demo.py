"""Admissible region of correlated excess noise, drawn as an ASCII map.

The complex cross-correlation between the two receivers' excess noise is
bounded by physicality of the joint state (roughly a disc of radius
sqrt(xi_b1 * xi_b2)). Inside the disc the key rate grows with the
correlation modulus and is smallest at zero correlation.
"""

import numpy as np

from mimo_cvqkd import PowerBudget, scan_xi_region


def main():
    grid = 21
    points = scan_xi_region(0.1, 0.001, 0.001, 0.95, PowerBudget(9.4), grid,
                            opt_grid=8)

    rates = np.full((grid, grid), np.nan)
    res = sorted({p.xi_re for p in points})
    ims = sorted({p.xi_im for p in points})
    for p in points:
        if p.admissible:
            rates[ims.index(p.xi_im), res.index(p.xi_re)] = p.skr

    finite = rates[np.isfinite(rates)]
    lo, hi = finite.min(), finite.max()
    shades = " .:-=+*#%@"
    print("key rate over the correlated-noise plane ('.' low, '@' high, blank"
          " inadmissible):")
    for row in rates[::-1]:
        line = ""
        for r in row:
            if np.isnan(r):
                line += "  "
            else:
                k = int((r - lo) / (hi - lo) * (len(shades) - 1))
                line += shades[k] * 2
        print(line)

    print()
    print(f"minimum rate {lo:.5f} at zero correlation, "
          f"maximum {hi:.5f} on the boundary "
          f"(gain {100 * (hi / lo - 1):.2f}%)")


if __name__ == "__main__":
    main()
