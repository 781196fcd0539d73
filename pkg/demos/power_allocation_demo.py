"""Optimal transmit-power split on a symmetric crosstalk channel.

For a channel that treats both transmit modes identically, splitting the
modulation budget equally is optimal for joint processing. This script
verifies that numerically at several transmissivities and shows how much
the optimized allocation gains over a fixed default.
"""

from mimo_cvqkd import (
    NoiseModel,
    PowerBudget,
    covariance_from_noise_params,
    optimize_power,
    skr_full_mimo,
    uniform_crosstalk_channel,
)


def main():
    noise = NoiseModel(0.001, 0.001)
    budget = PowerBudget(9.4)

    print(f"{'T':>6} {'V_a1*':>8} {'V_a2*':>8} {'skr*':>10} {'skr(5.7,5.7)':>13}")
    for t in (0.5, 0.2, 0.1, 0.05):
        h = uniform_crosstalk_channel(t)
        v1, v2, bd = optimize_power(h, noise, 0.95, budget, "full_mimo")
        fixed = skr_full_mimo(
            covariance_from_noise_params(h, 5.7, 5.7, noise), 0.95
        ).skr
        print(f"{t:6.2f} {v1:8.4f} {v2:8.4f} {bd.skr:10.5f} {fixed:13.5f}")

    print()
    print("the optimal split is equal on a symmetric channel; the interior")
    print("optimum can sit below the budget cap when loss is high")


if __name__ == "__main__":
    main()
