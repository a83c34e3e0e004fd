#!/usr/bin/env python3
"""Removing receive antennas costs binary entropy, universally.

Strip a 4x2 MIMO system (4 receive, 2 transmit antennas) down to 2x2 and
watch the high-SNR mutual-information loss approach the closed form

    T * [ H(phi)/phi - (beta/phi) H(phi/beta) ]   bits,

here 4 H(1/2) = 4 bits in the large-system limit.  At finite size the
ergodic loss saturates lower (about 3.37 bits for complex Gaussian entries,
4.33 for real ones), which this script measures by paired Monte Carlo.
"""

from freemimo import (
    EnsembleSpec,
    ProjectorSpec,
    binary_entropy_loss,
    ergodic_loss,
    square_system_loss,
)

R, T, BETA = 4, 2, 0.5
PHI = T / R
TRIALS = 20_000
SEED = 1


def main():
    asymptotic_total = T * binary_entropy_loss(PHI, BETA)
    print(f"reference system: {R}x{T}, keep beta={BETA} of the receive side")
    print(f"large-system loss: {asymptotic_total:.4f} bits total "
          f"({square_system_loss(PHI):.3f} bits per receive antenna)\n")

    proj = ProjectorSpec("receive", BETA)
    print(f"{'SNR dB':>7} {'complex loss':>13} {'real loss':>11}   (bits total)")
    for gamma_db in (0, 10, 20, 30, 40):
        gamma = 10.0 ** (gamma_db / 10.0)
        row = []
        for kind in ("iid_complex_gaussian", "iid_real_gaussian"):
            # entry variance 4 pushes 30-40 dB close to the high-SNR limit
            est = ergodic_loss(EnsembleSpec(kind, R, T, 16.0), proj, gamma,
                               TRIALS, SEED)
            row.append(T * est.mean)
        print(f"{gamma_db:>7} {row[0]:>13.4f} {row[1]:>11.4f}")

    print("\nThe complex curve tends to ~3.37 bits and the real one to "
          "~4.33 bits;")
    print("the 4-bit closed form is the universal large-system ceiling.")


if __name__ == "__main__":
    main()
