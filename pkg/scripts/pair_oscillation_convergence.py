"""Ratio of the pair-oscillation estimate to half the essential modulus as N doubles."""
import argparse
from pathlib import Path

from medianosc.corpus import CorpusSpec, generate
from medianosc.fieldio import write_csv
from medianosc.oscillation import essential_modulus, omega_estimate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/pair_convergence.csv")
    ap.add_argument("--fields", default="step,lipschitz,piecewise")
    ap.add_argument("--sizes", default="128,256,512,1024,2048")
    ap.add_argument("--deltas", default="0.25,0.0625,0.015625")
    ap.add_argument("--s", type=float, default=0.75)
    args = ap.parse_args()
    rows = []
    for name in args.fields.split(","):
        for delta in (float(d) for d in args.deltas.split(",")):
            for n in (int(x) for x in args.sizes.split(",")):
                f = generate(CorpusSpec(name, n=n))
                est, mod = omega_estimate(f, args.s, delta), essential_modulus(f, delta)
                ratio = est / (mod / 2) if mod > 0 else 1.0
                rows.append((name, delta, n, est, mod, ratio))
                print(f"{name:10s} delta={delta:<9g} n={n:5d} ratio={ratio:.5f}")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_csv(args.out, ["field", "delta", "n", "omega_estimate", "modulus", "ratio"], rows)


if __name__ == "__main__":
    main()
