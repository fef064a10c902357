"""Coverage of the entry-game region and power against a too-narrow band."""

import argparse

from partial_id.mc import DgpSpec, McConfig, run_coverage, run_power


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=1000)
    ap.add_argument("--bootstrap", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=777)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--p", type=float, default=0.25)
    ap.add_argument("--s-model", type=float, default=0.05)
    args = ap.parse_args()

    cfg = McConfig(reps=args.reps, B=args.bootstrap, seed=args.seed, threads=args.threads)
    cov = run_coverage(cfg, p=args.p, n=1000)
    print(f"coverage at n=1000, p={args.p}")
    for row in cov.to_rows():
        print("  ".join(f"{v:>12}" if isinstance(v, str) else f"{v:12.3f}" for v in row))

    power = run_power(cfg, DgpSpec(0.15), args.s_model)
    print(f"\nrejection rate, data band 0.15, model band {args.s_model}")
    for row in power.to_rows():
        print("  ".join(f"{v:>8}" for v in row))


if __name__ == "__main__":
    main()
