#!/usr/bin/env python3
"""Synthetic bang-for-the-buck experiment.

Prints explanation curves for the four ranking methods, the ratio of each to
the coefficient baseline, and the top-k Spearman matrix.

    python scripts/run_benchmark.py --seeds 0 1 2
"""

import argparse
import math

from sparse_explain.benchmark import METHODS, run_benchmark
from sparse_explain.errors import UndefinedCorrelationError
from sparse_explain.evaluation import SynthConfig
from sparse_explain.pipeline import ExplainSettings


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, nargs="+", default=[0])
    parser.add_argument("--num-instances", type=int, default=10_000)
    parser.add_argument("--num-features", type=int, default=5_000)
    parser.add_argument("--samples", type=int, default=10_000)
    parser.add_argument("--top-k", type=int, default=200)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    for seed in args.seeds:
        config = SynthConfig(num_instances=args.num_instances,
                             num_features=args.num_features, seed=seed)
        res = run_benchmark(config, ExplainSettings(samples=args.samples, seed=seed),
                            args.jobs)
        base = res.curves["beta"].baseline_positive_count
        print(f"\n== seed {seed}: {base} positives; timings "
              + ", ".join(f"{k} {v:.1f}s" for k, v in res.timings.items()))
        print(f"{'k':>6} " + " ".join(f"{m:>9}" for m in METHODS)
              + "   ec/beta  shap/beta")
        for row in res.report.rows:
            print(f"{row.k:>6} " + " ".join(f"{row.explained[m]:>9}" for m in METHODS)
                  + f"   {row.ratio_to_beta['ec']:>7.2f}  {row.ratio_to_beta['shapley']:>9.2f}")
        print(f"median-k ratio: ec {res.report.median_ratio('ec'):.2f}, "
              f"shapley {res.report.median_ratio('shapley'):.2f}")
        print(f"\nSpearman, top {args.top_k} of row method")
        print(" " * 9 + "".join(f"{m:>10}" for m in METHODS))
        for r in METHODS:
            cells = []
            for c in METHODS:
                try:
                    cells.append(res.correlation(r, c, args.top_k).rho)
                except UndefinedCorrelationError:
                    cells.append(math.nan)
            print(f"{r:>9}" + "".join(f"{v:>10.2f}" for v in cells))


if __name__ == "__main__":
    main()
