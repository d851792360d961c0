"""Choosing the distance mode when the coupling flips the sign.

If Y follows -X rather than X, the comonotonic cost |x - y| sees nothing:
its valley runs along matches, not mirrors. The antimonotonic cost |x + y|
recovers the lag, and the adaptive mode (pointwise minimum of the two)
works for either coupling at the price of a shallower valley.
"""

import numpy as np

from toplag import (
    LagScenario,
    build_landscape,
    generate,
    resample_lag_to_time,
    select_optimal,
)


def main():
    scenario = LagScenario(kind="anti", n=500, seed=2, k=4, noise_sigma=0.4)
    pair, _ = generate(scenario)
    print("pair: y_t = -x_{t-4} plus noise, 500 samples\n")

    print("mode    med lag   med|err|")
    for mode in ("minus", "plus", "mixed"):
        result = select_optimal(build_landscape(pair, mode=mode), temperature=2.0)
        t, lag = resample_lag_to_time(result.best.taus, result.best.mean_lag, pair.n)
        core = (t >= 100) & (t < 400)
        med = float(np.median(lag[core]))
        err = float(np.median(np.abs(lag[core] - 4.0)))
        print(f"{mode:<7} {med:>7.2f}   {err:>8.2f}")

    print("\n'minus' is blind to mirrored coupling; 'plus' nails it.")
    print("Use 'mixed' when the coupling sign is unknown or drifting.")


if __name__ == "__main__":
    main()
