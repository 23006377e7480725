"""How the carrier wavelength moves the scheme and tree orderings.

For each wavelength, prints paired z-scores (difference / stderr over shared
trials) of POS-SPT against each baseline, against POS-MST and against the
distance metric. Positive z means POS-SPT-ETX is ahead.
"""

import argparse

from crn_multicast.analysis import paired_difference, samples
from crn_multicast.channels import Scheme
from crn_multicast.params import NetworkParams
from crn_multicast.simulator import RunConfig, run_monte_carlo

RIVALS = {
    "MASA": RunConfig(Scheme.MASA),
    "MDR": RunConfig(Scheme.MDR),
    "RS": RunConfig(Scheme.RS),
    "MST": RunConfig(Scheme.POS, "MST"),
    "Distance": RunConfig(Scheme.POS, "SPT", "Distance"),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--wavelengths", type=float, nargs="+", default=[0.125, 0.25, 0.35, 0.5, 0.75, 1.0])
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--idle-prob", type=float, default=0.5)
    args = ap.parse_args()

    cols = [f"{name}:{m}" for name in RIVALS for m in ("thr", "pdr")]
    print("lambda  " + "  ".join(f"{c:>12}" for c in cols))
    for lam in args.wavelengths:
        p = NetworkParams(wavelength=lam, num_trials=args.trials, idle_prob=args.idle_prob)
        ref = run_monte_carlo(p, RunConfig())
        zs = []
        for config in RIVALS.values():
            other = run_monte_carlo(p, config)
            for metric in ("throughput", "pdr"):
                zs.append(paired_difference(samples(ref, metric), samples(other, metric)).z)
        print(f"{lam:<7} " + "  ".join(f"{z:>+12.1f}" for z in zs))


if __name__ == "__main__":
    main()
