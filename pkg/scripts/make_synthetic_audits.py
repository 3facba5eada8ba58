"""Write a synthetic audit CSV with known noise-to-signal ratio.

    python scripts/make_synthetic_audits.py --n 100000 --r 4 --out data/audits_r4.csv
"""

import argparse

from truthcoupling.estimation import decompose_variance, synthetic_audits, write_audit_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--r", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=12)
    ap.add_argument("--out", default="data/audits_r4.csv")
    args = ap.parse_args()

    records = synthetic_audits(args.n, args.r, args.seed)
    write_audit_csv(args.out, records)
    dec = decompose_variance(records)
    print(f"wrote {args.n} records to {args.out}; true r={args.r}, r_hat={dec.r:.4f}")


if __name__ == "__main__":
    main()
