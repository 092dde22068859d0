#!/usr/bin/env python3
"""Run the multi-seed planted-sense benchmarks and print result tables.

Both experiments regenerate the synthetic corpus once per seed, run the
pipeline, and pool per-pair scores across seeds for the paired permutation
tests. Typical invocations:

    python3 scripts/run_synthetic_benchmark.py
    python3 scripts/run_synthetic_benchmark.py --task similarity --seeds 5
    python3 scripts/run_synthetic_benchmark.py --disjointness 0.5 --noise high
"""

import argparse
import time

from verbsense.benchmark import (
    SIMILARITY_MODELS,
    run_similarity_benchmark,
    run_supervised_benchmark,
)
from verbsense.synthetic import NOISE_LEVELS, SyntheticSpec


def noise_level(text: str) -> float:
    if text in NOISE_LEVELS:
        return NOISE_LEVELS[text]
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"noise must be one of {sorted(NOISE_LEVELS)} or a number")


def parse_args(argv=None) -> argparse.Namespace:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--task", choices=("supervised", "similarity", "both"),
                    default="both")
    ap.add_argument("--seeds", type=int, default=20,
                    help="number of generator seeds (default 20)")
    ap.add_argument("--first-seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--trainer", choices=("closed_form", "gd"),
                    default="closed_form")
    ap.add_argument("--folds", type=int, default=4,
                    help="cross-validation folds for the supervised task")
    ap.add_argument("--verbs", type=int, default=5)
    ap.add_argument("--senses", type=int, default=2)
    ap.add_argument("--objects-per-sense", type=int, default=16)
    ap.add_argument("--disjointness", type=float, default=1.0)
    ap.add_argument("--noise", type=noise_level, default=NOISE_LEVELS["mid"])
    ap.add_argument("--svd-dim", type=int, default=24)
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    spec = SyntheticSpec(n_verbs=args.verbs, senses_per_verb=args.senses,
                         objects_per_sense=args.objects_per_sense,
                         disjointness=args.disjointness, noise=args.noise)
    seeds = range(args.first_seed, args.first_seed + args.seeds)

    if args.task in ("supervised", "both"):
        start = time.perf_counter()
        bench = run_supervised_benchmark(spec, seeds, trainer=args.trainer,
                                         jobs=args.jobs, folds=args.folds,
                                         svd_dim=args.svd_dim)
        elapsed = time.perf_counter() - start
        print(f"== supervised ranking over {args.seeds} seeds "
              f"({elapsed:.1f}s) ==")
        print(f"{'model':<24} {'accuracy':>9} {'mrr':>9} {'avg_cosine':>11}")
        for model, block in sorted(bench.mean_overall.items()):
            print(f"{model:<24} {block['accuracy']:>9.4f} "
                  f"{block['mrr']:>9.4f} {block['avg_cosine']:>11.4f}")
        print("paired permutation p (avg_cosine, disambiguated vs ambiguous)"
              f" = {bench.pooled_p_avg_cosine:.6g}")
        print()

    if args.task in ("similarity", "both"):
        start = time.perf_counter()
        bench = run_similarity_benchmark(spec, seeds, trainer=args.trainer,
                                         jobs=args.jobs, svd_dim=args.svd_dim)
        elapsed = time.perf_counter() - start
        print(f"== phrase similarity over {args.seeds} seeds "
              f"({elapsed:.1f}s) ==")
        print(f"{'model':<24} {'mean_spearman_rho':>18}")
        for model in sorted(SIMILARITY_MODELS,
                            key=lambda m: -bench.mean_rho[m]):
            print(f"{model:<24} {bench.mean_rho[model]:>+18.4f}")
        for name, p in sorted(bench.pooled_p.items()):
            print(f"paired permutation p ({name}) = {p:.6g}")

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
