"""Score a detected lag with the rolling-regression consistency test.

A lag trajectory is only a claim; the test asks whether Y_t actually
co-moves with X shifted by the detected lag, window by window. A genuinely
coupled pair lights up most windows. For independent series the picture
depends on their memory: iid series sit at the 5% false-positive floor,
while independent random walks trend together over short windows and light
up anyway (the classic spurious-regression trap), so difference or detrend
integrated data before trusting the screen.
"""

import numpy as np

from toplag import (
    AlignedPair,
    LagScenario,
    build_landscape,
    generate,
    resample_lag_to_time,
    run_consistency,
    select_optimal,
)


def detect_and_score(pair, label):
    result = select_optimal(build_landscape(pair), temperature=2.0, depth=20)
    t, lag = resample_lag_to_time(result.best.taus, result.best.mean_lag, pair.n)
    report = run_consistency(pair, t, lag, window=40)
    print(f"{label}:")
    print(f"  windows {report.n_windows}, significant at 5%: "
          f"{100 * report.frac_significant:.1f}%")
    print(f"  median slope {np.nanmedian(report.slope):.3f}, "
          f"median p {np.nanmedian(report.p_value):.2e}")


def main():
    coupled, _ = generate(
        LagScenario(kind="constant", n=800, seed=19, k=6, noise_sigma=0.8)
    )
    detect_and_score(coupled, "coupled pair (true lag 6, noisy)")

    rng = np.random.default_rng(19)
    iid = AlignedPair(x=rng.normal(size=800), y=rng.normal(size=800))
    detect_and_score(iid, "\nindependent iid series (no coupling)")

    walks = AlignedPair(
        x=np.cumsum(rng.normal(size=800)), y=np.cumsum(rng.normal(size=800))
    )
    detect_and_score(walks, "\nindependent random walks (no coupling, integrated)")

    print("\nThe scan always returns some trajectory. On iid data the screen")
    print("rejects about 5% of windows by construction; the inflated rate on")
    print("independent walks is spurious regression, not detected coupling,")
    print("so difference integrated series before reading the percentage.")


if __name__ == "__main__":
    main()
