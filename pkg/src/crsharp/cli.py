"""Command-line entry point: ``python3 -m crsharp <command> [flags]``.

Every command prints one report. JSON reports have the layout
{"config", "results", "residuals", "pass", "wall_time_ms"}; tables (eigs,
continuation) can be emitted as CSV instead. The exit status is 0 exactly
when the report passes; bad parameters are usage errors (status 2).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import extremal_solver as es
from .discretize import hopf_rule, real_sphere_rule
from .heisenberg import HeisenbergPoint, SpherePoint, distance_identity_residual
from .mobius_sphere import (MobiusParams, cocycle_residual, flow_group_residual, fundamental_identity_residual,
                            inverse_factor_residual, kw_flow_identity_residual, measure_transport_residual)
from .specfun import DomainError, SpectralIndex
from .spectra import (Family, KernelSpec, eig_dist_kernel, eig_dist_kernel_weighted, oracle_eig, positivity_scan,
                      r2v_best_c, r2v_coefficients, r2v_mode_gap, re_kernel_eig, self_integral, sharp_constant,
                      sphere_area)

COMMANDS = ("constants", "eigs", "r2v", "verify", "solve", "continuation", "oracle")
SUITES = ("fid", "group", "cocycle", "inverse", "cayley", "kw", "positivity", "transport")


@dataclass
class RunConfig:
    command: str
    family: str = "cr"
    dim: int = 1
    lam: float = 2.0
    grid: list = field(default_factory=list)
    p: Optional[float] = None
    p_list: list = field(default_factory=list)
    tol_residual: float = 1e-10
    max_iter: int = 5000
    init: str = "perturbed:0.3"
    seed: int = 0
    out_format: str = "json"
    out_path: Optional[str] = None
    cutoff: int = 30
    refinement: int = 4
    suite: str = "all"
    samples: int = 1000
    idx: list = field(default_factory=lambda: [0, 0])
    timing: bool = True

    def spec(self) -> KernelSpec:
        return KernelSpec(Family(self.family), self.dim, self.lam)


class UsageError(Exception):
    pass


def _default_grid(spec: KernelSpec) -> list:
    if spec.family is Family.CR:
        return [24, 24]
    return [256] if spec.dim == 1 else [24, 48]


def _rule(spec: KernelSpec, grid):
    if spec.family is Family.CR:
        if spec.dim != 1:
            raise UsageError("grid-based commands support the CR sphere only for m = 1")
        return hopf_rule(int(grid[0]), int(grid[1]))
    if spec.dim == 1:
        return real_sphere_rule(1, int(grid[-1]))
    if spec.dim == 2:
        return real_sphere_rule(2, (int(grid[0]), int(grid[1])))
    raise UsageError("grid-based commands support the real sphere only for n = 1, 2")


# ---------------------------------------------------------------- commands


def cmd_constants(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    sharp = sharp_constant(spec)
    e00 = self_integral(spec)
    area = sphere_area(spec.family, spec.dim)
    Q = spec.Q
    predicted = e00 * area ** ((spec.lam - Q) / Q)
    resid = abs(sharp - predicted) / sharp
    return {
        "results": {"sharp_constant": sharp, "E00": e00, "p_crit": spec.p_crit, "sphere_area": area},
        "residuals": {"sharp_vs_constant_function": resid},
        "pass": resid <= 1e-12,
    }


def _eig_row(spec: KernelSpec, idx: SpectralIndex, refinement: int) -> list:
    m, a, half = spec.dim, spec.alpha, spec.lam / 2.0
    kernels = (lambda w: np.abs(1.0 - w) ** (-half),
               lambda w: np.abs(w) ** 2 * np.abs(1.0 - w) ** (-half),
               lambda w: np.real(w) * np.abs(1.0 - w) ** (-half))
    closed = (eig_dist_kernel(a, m, idx), eig_dist_kernel_weighted(a, m, idx), re_kernel_eig(a, m, idx))
    orc = tuple(oracle_eig(kern, m, idx, refinement, half) for kern in kernels)
    err = max(abs(c - o) / abs(c) for c, o in zip(closed, orc))
    return [idx.j, idx.k, *closed, *orc, err]


def _eig_rows(spec: KernelSpec, cutoff: int, refinement: int) -> list:
    return [_eig_row(spec, SpectralIndex(j, deg - j), refinement)
            for deg in range(cutoff + 1) for j in range(deg, -1, -1)]


EIG_COLUMNS = ["j", "k", "E", "E_weighted", "F", "oracle_E", "oracle_E_weighted", "oracle_F", "rel_err"]


def cmd_eigs(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    if spec.family is not Family.CR:
        raise UsageError("eigs tabulates the CR-sphere kernels")
    rows = _eig_rows(spec, cfg.cutoff, cfg.refinement)
    worst = max(r[-1] for r in rows)
    e00, f00 = rows[0][2], rows[0][4]
    eq = abs(f00 - r2v_coefficients(spec)[0] * e00) / abs(f00)
    return {
        "results": {"columns": EIG_COLUMNS, "rows": rows},
        "residuals": {"max_oracle_rel_err": worst, "r2v_equality_00": eq},
        "pass": worst <= 1e-6 and eq <= 1e-12,
        "table": (EIG_COLUMNS, rows),
    }


def cmd_r2v(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    if spec.family is not Family.CR:
        raise UsageError("r2v is defined for the CR sphere")
    c1 = r2v_best_c(spec, cfg.cutoff)
    c2 = r2v_best_c(spec, 2 * cfg.cutoff)
    argmin = min(((j, d - j) for d in range(1, cfg.cutoff + 1) for j in range(d + 1)),
                 key=lambda jk: r2v_mode_gap(spec, jk))
    a = r2v_coefficients(spec)[0]
    e00 = eig_dist_kernel(spec.alpha, spec.dim, (0, 0))
    eq = abs(re_kernel_eig(spec.alpha, spec.dim, (0, 0)) - a * e00) / e00
    stable = abs(c1 - c2)
    return {
        "results": {"best_c": c1, "best_c_double_cutoff": c2, "argmin_mode": list(argmin)},
        "residuals": {"equality_00": eq, "cutoff_stability": stable},
        "pass": c1 > 0 and eq <= 1e-12 and stable <= 1e-10,
    }


def _random_sphere(rng, n: int, m: int = 1) -> np.ndarray:
    v = rng.normal(size=(n, m + 1)) + 1j * rng.normal(size=(n, m + 1))
    return v / np.linalg.norm(v, axis=1)[:, None]


SUITE_THRESHOLDS = {"fid": 1e-12, "group": 1e-12, "cocycle": 1e-12, "inverse": 1e-12, "cayley": 1e-10,
                    "kw": 1e-6, "transport": 1e-8}


def _suite(name: str, cfg: RunConfig) -> tuple[float, bool]:
    """(reported value, pass) for one identity suite; the value is a max residual except for positivity."""
    value = _suite_value(name, cfg)
    if isinstance(value, tuple):
        return value
    return value, value <= SUITE_THRESHOLDS[name]


def _suite_value(name: str, cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    n = cfg.samples
    if name == "fid":
        worst = 0.0
        for _ in range(n):
            eta, xi, zeta = _random_sphere(rng, 3)
            p = MobiusParams(float(rng.uniform(0.0, 1.0)), SpherePoint(eta / np.linalg.norm(eta)))
            worst = max(worst, fundamental_identity_residual(p, xi, zeta))
        return worst
    if name in ("group", "cocycle", "inverse"):
        worst = 0.0
        for _ in range(n):
            eta, xi = _random_sphere(rng, 2)
            s, t = rng.uniform(-1.0, 1.0, 2)
            if name == "group":
                r = flow_group_residual(s, t, eta, xi[None, :])
            elif name == "cocycle":
                r = cocycle_residual(s, t, eta, xi[None, :])
            else:
                r = inverse_factor_residual(abs(t), eta, xi[None, :])
            worst = max(worst, r)
        return worst
    if name == "cayley":
        worst = 0.0
        for _ in range(n):
            x = rng.normal(size=6)
            u = HeisenbergPoint([x[0] + 1j * x[1]], x[2])
            v = HeisenbergPoint([x[3] + 1j * x[4]], x[5])
            worst = max(worst, distance_identity_residual(u, v))
        return worst
    if name == "kw":
        rule = hopf_rule(24, 24)
        worst = 0.0
        for _ in range(20):
            eta, a, c, d = _random_sphere(rng, 4)
            vals = 2.0 + np.real(rule.points @ np.conj(c)) + 0.5 * np.abs(rule.points @ np.conj(d)) ** 2
            worst = max(worst, kw_flow_identity_residual(eta, a, vals, rule, h=1e-3))
        return worst
    if name == "positivity":
        # reported value is the smallest eigenvalue; the suite passes when it is positive
        spec = cfg.spec() if cfg.family == "cr" else KernelSpec.cr(1, 2.0)
        low = min(eig_dist_kernel(spec.alpha, spec.dim, (j, d - j))
                  for d in range(cfg.cutoff + 1) for j in range(d + 1))
        return low, (positivity_scan(spec, cfg.cutoff) and low > 0.0)
    if name == "transport":
        rule = hopf_rule(32, 32)
        worst = 0.0
        for _ in range(10):
            eta, c = _random_sphere(rng, 2)
            p = MobiusParams(float(rng.uniform(0.0, 0.3)), SpherePoint(eta))
            g = lambda x, c=c: 1.0 + np.real(x @ np.conj(c)) ** 2 + np.real(x[:, 0] * x[:, 1])
            worst = max(worst, measure_transport_residual(p, g, rule))
        return worst
    raise UsageError(f"unknown suite {name!r}")


def cmd_verify(cfg: RunConfig) -> dict:
    names = SUITES if cfg.suite == "all" else tuple(cfg.suite.split(","))
    results, residuals, ok = {}, {}, True
    for name in names:
        if name not in SUITES:
            raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
        value, passed = _suite(name, cfg)
        results[name] = {"pass": bool(passed), "threshold": SUITE_THRESHOLDS.get(name)}
        residuals[name] = value
        ok = ok and passed
    return {"results": results, "residuals": residuals, "pass": ok}


def _solver_cfg(cfg: RunConfig, p: float) -> es.SolverConfig:
    try:
        return es.SolverConfig.parse_init(cfg.init, p=p, seed=cfg.seed, tol_residual=cfg.tol_residual, max_iter=cfg.max_iter)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _report_dict(rep: es.SolveReport, timing: bool) -> dict:
    d = rep.to_dict()
    if not timing:
        d["wall_time"] = 0.0
    return d


def cmd_solve(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    if cfg.p is None:
        raise UsageError("solve needs --p")
    if not cfg.p > spec.p_crit:
        raise UsageError(f"--p {cfg.p} is not above the critical exponent {spec.p_crit:.17g}")
    rule = _rule(spec, cfg.grid)
    u, rep = es.solve(spec, rule, _solver_cfg(cfg, cfg.p))
    ok = rep.converged and rep.moment_norm <= 1e-6
    return {
        "results": {"report": _report_dict(rep, cfg.timing), "functional_at_solution": es.functional(spec, u, cfg.p)},
        "residuals": {"residual": rep.residual, "moment_norm": rep.moment_norm},
        "pass": ok,
    }


def cmd_continuation(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    p_list = cfg.p_list
    if any(not p > spec.p_crit for p in p_list):
        raise UsageError("every p along the continuation must exceed the critical exponent")
    rule = _rule(spec, cfg.grid)
    reps = es.continuation(spec, rule, p_list, _solver_cfg(cfg, p_list[0]))
    if not cfg.timing:
        for r in reps:
            r.wall_time = 0.0
    sharp = sharp_constant(spec)
    final = reps[-1]
    Q = spec.Q if spec.family is Family.CR else float(spec.dim)
    lam = spec.lam
    exponents = {
        # ||u_p|| for the scaled solution, Lambda_p^{1/(p-2)}, next to the two candidate limits
        "lambda_hat_root": [r.lambda_p_hat ** (1.0 / (r.p - 2.0)) for r in reps],
        "sharp_power_stated": sharp ** (-2.0 * (Q - lam) / (2.0 * Q - lam)),
        "sharp_power_from_scaling": sharp ** (-(2.0 * Q - lam) / (2.0 * (Q - lam))),
    }
    dists = [r.dist_to_constant for r in reps]
    monotone = all(b <= 1.1 * a + 10 * cfg.tol_residual for a, b in zip(dists, dists[1:]))
    rel = abs(final.lambda_p_hat - sharp) / sharp
    rows = [[r.p, r.lambda_p_hat, r.residual, r.moment_norm, r.dist_to_constant, r.iterations, r.wall_time * 1e3]
            for r in reps]
    return {
        "results": {"reports": [_report_dict(r, cfg.timing) for r in reps], "sharp_constant": sharp,
                    "exponent_bookkeeping": exponents},
        "residuals": {"final_dist_to_constant": final.dist_to_constant, "final_lambda_rel_gap": rel,
                      "dist_monotone": monotone},
        "pass": all(r.converged for r in reps) and final.dist_to_constant <= 1e-3 and monotone and rel <= 0.02,
        "table": (es.CONTINUATION_COLUMNS, rows),
    }


def cmd_oracle(cfg: RunConfig) -> dict:
    spec = cfg.spec()
    if spec.family is not Family.CR:
        raise UsageError("oracle compares CR-sphere closed forms")
    j, k = cfg.idx
    row = _eig_row(spec, SpectralIndex(j, k), cfg.refinement)
    return {
        "results": dict(zip(EIG_COLUMNS, row)),
        "residuals": {"rel_err": row[-1]},
        "pass": row[-1] <= 1e-6,
    }


HANDLERS = {
    "constants": cmd_constants, "eigs": cmd_eigs, "r2v": cmd_r2v, "verify": cmd_verify,
    "solve": cmd_solve, "continuation": cmd_continuation, "oracle": cmd_oracle,
}

# ---------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crsharp", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--family", choices=("cr", "real"), default="cr")
    ap.add_argument("--m", type=int, default=None, help="CR sphere S^{2m+1}")
    ap.add_argument("--n", type=int, default=None, help="real sphere S^n")
    ap.add_argument("--lambda", dest="lam", type=float, default=2.0)
    ap.add_argument("--grid", type=int, nargs="+", default=None, help="rule resolution, e.g. 24 24")
    ap.add_argument("--p", type=float, default=None)
    ap.add_argument("--p-end-offset", type=float, default=0.01)
    ap.add_argument("--halvings", type=int, default=6)
    ap.add_argument("--init", default="perturbed:0.3", help="constant | perturbed[:amp] | random[:seed]")
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--max-iter", type=int, default=5000)
    ap.add_argument("--suite", default="all")
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cutoff", type=int, default=None)
    ap.add_argument("--refinement", type=int, default=4)
    ap.add_argument("--j", type=int, default=0)
    ap.add_argument("--k", type=int, default=0)
    ap.add_argument("--out-format", choices=("json", "csv"), default="json")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    ap.add_argument("--no-timing", action="store_true", help="report zero wall times (byte-stable output)")
    return ap


def config_from_args(args) -> RunConfig:
    dim = args.m if args.family == "cr" else args.n
    if dim is None:
        dim = 1 if args.family == "cr" else 2
    cutoff = args.cutoff
    if cutoff is None:
        cutoff = {"eigs": 8, "positivity": 50}.get(args.command, 30)
        if args.command == "verify":
            cutoff = 50
    cfg = RunConfig(command=args.command, family=args.family, dim=dim, lam=args.lam, p=args.p,
                    tol_residual=args.tol, max_iter=args.max_iter, init=args.init, seed=args.seed,
                    out_format=args.out_format, out_path=args.out, cutoff=cutoff, refinement=args.refinement,
                    suite=args.suite, samples=args.samples, idx=[args.j, args.k], timing=not args.no_timing)
    try:
        spec = cfg.spec()
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    if args.command in ("solve", "continuation"):
        cfg.grid = list(args.grid) if args.grid else _default_grid(spec)
    if args.command == "continuation":
        if args.p_end_offset <= 0 or args.halvings < 1:
            raise UsageError("need --p-end-offset > 0 and --halvings >= 1")
        cfg.p_list = es.offset_schedule(spec.p_crit, args.p_end_offset, args.halvings)
        cfg.p = cfg.p_list[0]
    return cfg


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(columns)
    for row in rows:
        wr.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def render(cfg: RunConfig, out: dict, wall_ms: float) -> str:
    table = out.pop("table", None)
    if cfg.out_format == "csv":
        if table is None:
            flat = [[k, v] for k, v in out["residuals"].items()] + [["pass", out["pass"]]]
            return _csv_text(["key", "value"], flat)
        return _csv_text(*table)
    report = {"config": asdict(cfg), "results": out["results"], "residuals": out["residuals"],
              "pass": bool(out["pass"]), "wall_time_ms": wall_ms if cfg.timing else 0}
    return json.dumps(report, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        start = time.perf_counter()
        out = HANDLERS[cfg.command](cfg)
        wall_ms = (time.perf_counter() - start) * 1e3
    except UsageError as exc:
        parser.error(str(exc))
    text = render(cfg, out, wall_ms)
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if out["pass"] else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
