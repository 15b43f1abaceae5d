"""Print closed-form Funk-Hecke eigenvalues next to their disc-quadrature values."""
import argparse

from crsharp.cli import EIG_COLUMNS, _eig_rows
from crsharp.spectra import KernelSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--lambda", dest="lam", type=float, default=2.0)
    ap.add_argument("--cutoff", type=int, default=4)
    args = ap.parse_args()
    rows = _eig_rows(KernelSpec.cr(args.m, args.lam), args.cutoff, 4)
    print(" ".join(f"{c:>12}" for c in EIG_COLUMNS))
    for r in rows:
        print(f"{r[0]:>12d} {r[1]:>12d} " + " ".join(f"{v:12.6g}" for v in r[2:]))


if __name__ == "__main__":
    main()
