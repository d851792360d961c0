"""Everything on a lattice small enough to enumerate by hand.

On a 6 x 6 landscape every corner-to-corner path can be listed, so the
engine's recursions can be checked against literal sums over paths. The
demo prints the energy matrix, the zero-temperature optimal path, and the
thermal mean lag at falling temperatures, which collapses onto the hard
path as T approaches zero.
"""

import numpy as np

from toplag import (
    AlignedPair,
    backward_weights,
    brute_force_thermal,
    build_landscape,
    forward_weights,
    optimal_path,
    thermal_average,
)


def main():
    rng = np.random.default_rng(8)
    n = 6
    pair = AlignedPair(x=rng.integers(0, 6, size=n).astype(float),
                       y=rng.integers(0, 6, size=n).astype(float))
    landscape = build_landscape(pair)

    print("energy matrix e[i, j] = |x_i - y_j|:")
    print(landscape.full_matrix().astype(int))

    hard = optimal_path(landscape)
    print(f"\nzero-temperature path, total energy {hard.total_energy:.0f}:")
    print("  layer:", "  ".join(f"{t:>3d}" for t in hard.taus))
    print("  lag:  ", "  ".join(f"{x:>3d}" for x in hard.lags))

    print("\nthermal mean lag by layer (bridge, corner to corner):")
    hard_at = hard.lag_at_tau()
    rows = []
    for T in (2.0, 0.5, 0.05):
        f = forward_weights(landscape, (0, 0), T)
        b = backward_weights(landscape, (n - 1, n - 1), T)
        soft = thermal_average(landscape, f, b)
        rows.append((T, soft))
        ref = brute_force_thermal(landscape, (0, 0), end=(n - 1, n - 1),
                                  temperature=T)
        dev = float(np.max(np.abs(soft.mean_lag - ref["mean_lag"])))
        print(f"  T = {T:<5} matches path enumeration to {dev:.2e}")

    print("\n  layer " + " ".join(f"{t:>7d}" for t in rows[0][1].taus))
    for T, soft in rows:
        print(f"  T={T:<4} " + " ".join(f"{m:>7.3f}" for m in soft.mean_lag))
    marks = [hard_at.get(int(t), None) for t in rows[0][1].taus]
    print("  hard  " + " ".join("      ." if m is None else f"{m:>7d}"
                                for m in marks))
    print("\n(dots are layers the hard path skips with a diagonal step)")


if __name__ == "__main__":
    main()
