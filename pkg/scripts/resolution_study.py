"""Zonal-harmonic error of the discrete operator against grid size and angular oversampling."""
import argparse
import math
import time

import numpy as np

from crsharp.discretize import hopf_rule, inner, kernel_matrix
from crsharp.specfun import disc_poly
from crsharp.spectra import KernelSpec, eig_dist_kernel


def l2_error(op, idx, alpha):
    eta0 = np.array([0.6 + 0.3j, 0.2 - 0.7j]) / np.linalg.norm([0.6 + 0.3j, 0.2 - 0.7j])
    f = disc_poly(idx, 1, op.rule.points @ np.conj(eta0))
    E = eig_dist_kernel(alpha, 1, idx)
    d = op.apply(f) - E * f
    return math.sqrt(np.real(inner(d, d, op.rule)) / np.real(inner(E * f, E * f, op.rule)))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lam", type=float, default=2.0)
    ap.add_argument("--grids", type=int, nargs="+", default=[12, 16, 24, 32])
    ap.add_argument("--oversample", type=int, nargs="+", default=[1, 3, 6])
    args = ap.parse_args()
    spec = KernelSpec.cr(1, args.lam)
    idxs = [(1, 0), (1, 1), (2, 0), (2, 2)]
    rng = np.random.default_rng(0)
    print("grid  ov   " + "  ".join(f"{str(i):>9}" for i in idxs) + "   min <Af,f>/|f|^2   secs")
    for n in args.grids:
        rule = hopf_rule(n, n)
        for ov in args.oversample:
            t0 = time.perf_counter()
            op = kernel_matrix(spec, rule, oversample=ov)
            errs = [l2_error(op, i, args.lam / 4) for i in idxs]
            f = rng.normal(size=(len(rule), 8))
            ray = min(op.quadratic_form(f[:, c]) / float(np.real(inner(f[:, c], f[:, c], rule))) for c in range(8))
            print(f"{n:4d} {ov:3d}   " + "  ".join(f"{e:9.2e}" for e in errs)
                  + f"   {ray:16.4f}   {time.perf_counter() - t0:5.1f}")


if __name__ == "__main__":
    main()
