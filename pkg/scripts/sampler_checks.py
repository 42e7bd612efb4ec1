"""Goodness-of-fit of the samplers against inverted CDFs, over several seeds."""

import argparse

from bddf import make_family
from bddf import simulate

CASES = (
    ("gamma", {"alpha": 2, "lambda": 1}, "shot-noise"),
    ("gamma", {"alpha": 2, "lambda": 1}, "exact"),
    ("hyperbolic-sine", {}, "ratio-identity"),
    ("hyperbolic-cosine", {}, "laplace-series"),
    ("fisher-z", {"alpha1": 1, "alpha2": 2}, "ratio-identity"),
    ("student-t", {"nu": 2}, "exact"),
    ("inverse-gaussian", {"lambda": 1, "mu": 1}, "exact"),
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-n", type=int, default=50_000)
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()
    print(f"{'family':<20}{'method':<16}{'seed':>6}{'KS':>9}{'95% bound':>11}")
    for fam, params, method in CASES:
        desc = make_family(fam, params)
        for seed in args.seeds:
            batch = simulate.sample(desc, method, args.n, seed)
            cdf = simulate.reference_cdf(desc, float(batch.values.min()), float(batch.values.max()))
            ks = simulate.ks_statistic(batch, cdf)
            print(f"{fam:<20}{method:<16}{seed:>6}{ks.statistic:>9.4f}{ks.threshold_095:>11.4f}")


if __name__ == "__main__":
    main()
