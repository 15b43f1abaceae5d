"""Subcritical maximization of ||I f||_{p'} / ||f||_p by nonlinear power iteration.

The Euler-Lagrange equation I u = Lambda u^{p-1} is iterated literally:
u <- (I u)^{1/(p-1)}, renormalized to ||u||_p = 1. For a self-adjoint I this
map never decreases the quotient (Hoelder on <I u, u_next>), which is the
ascent invariant checked at every step.
"""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .discretize import DensityField, KernelOperator, QuadratureRule, ZonalKernel, integrate, kernel_matrix, lp_norm
from .specfun import DomainError
from .spectra import Family, KernelSpec, r2v_best_c, r2v_coefficients, re_kernel_eig

__all__ = [
    "SolverConfig",
    "SolveReport",
    "AscentViolation",
    "operator_for",
    "functional",
    "solve",
    "moment",
    "second_variation_check",
    "r2v_pointcheck",
    "continuation",
    "continuation_csv",
    "offset_schedule",
    "pair_collapse",
    "initial_field",
]

ASCENT_SLACK = 1e-10
CONTINUATION_COLUMNS = ["p", "lambda_hat", "residual", "moment_norm", "dist_to_constant", "iterations", "wall_time_ms"]


class AscentViolation(RuntimeError):
    """The quotient decreased by more than the slack even with damping."""


@dataclass(frozen=True)
class SolverConfig:
    """Exponent, initialization and stopping rule of one solve.

    ``init`` is "constant", "perturbed" (1 + amplitude * first real
    coordinate) or "random" (1 + amplitude * uniform noise from ``seed``).
    """

    p: float
    init: str = "perturbed"
    amplitude: float = 0.3
    seed: int = 0
    tol_residual: float = 1e-10
    max_iter: int = 5000
    damping: float = 1.0

    def __post_init__(self):
        if self.init not in ("constant", "perturbed", "random"):
            raise DomainError(f"unknown init {self.init!r}")
        if not 0 < self.damping <= 1:
            raise DomainError(f"damping must lie in (0, 1], got {self.damping!r}")
        if self.tol_residual <= 0 or self.max_iter < 1:
            raise DomainError("tol_residual must be positive and max_iter at least 1")
        if self.init != "constant" and not 0 <= self.amplitude < 1:
            raise DomainError("amplitude must lie in [0, 1) to keep the start positive")

    def check_subcritical(self, spec: KernelSpec):
        if not self.p > spec.p_crit:
            raise DomainError(f"p = {self.p} is not above the critical exponent {spec.p_crit}")

    @classmethod
    def parse_init(cls, text: str, **kw) -> "SolverConfig":
        """Build from a CLI-style init string such as "perturbed:0.3" or "random:7"."""
        name, _, arg = text.partition(":")
        if name == "perturbed" and arg:
            kw["amplitude"] = float(arg)
        elif name == "random" and arg:
            kw["seed"] = int(arg)
        return cls(init=name, **kw)


@dataclass
class SolveReport:
    lambda_p_hat: float
    iterations: int
    residual: float
    moment_norm: float
    dist_to_constant: float
    functional_trace: list = field(default_factory=list)
    wall_time: float = 0.0
    converged: bool = False
    p: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


@lru_cache(maxsize=8)
def operator_for(spec: KernelSpec, rule: QuadratureRule) -> KernelOperator:
    """Subtract-mode operator, cached per (spec, rule) pair."""
    return kernel_matrix(spec, rule)


def _conj_exp(p: float) -> float:
    return p / (p - 1.0)


def functional(spec: KernelSpec, f, p: float, op: KernelOperator | None = None) -> float:
    """||I f||_{p'} / ||f||_p under the field's rule."""
    if not isinstance(f, DensityField):
        raise DomainError("functional needs a DensityField")
    if p <= 1:
        raise DomainError(f"p must exceed 1, got {p!r}")
    op = op or operator_for(spec, f.rule)
    nf = lp_norm(f, p)
    if nf == 0:
        raise DomainError("functional of the zero field")
    return lp_norm(op.apply(f.values), _conj_exp(p), f.rule) / nf


def _first_coordinate(rule: QuadratureRule) -> np.ndarray:
    return np.real(rule.points[:, 0])


def initial_field(rule: QuadratureRule, cfg: SolverConfig) -> np.ndarray:
    if cfg.init == "constant":
        return np.ones(len(rule))
    if cfg.init == "perturbed":
        return 1.0 + cfg.amplitude * _first_coordinate(rule)
    rng = np.random.default_rng(cfg.seed)
    return 1.0 + cfg.amplitude * rng.uniform(-1.0, 1.0, len(rule))


def _normalize(u: np.ndarray, p: float, rule: QuadratureRule) -> np.ndarray:
    return u / lp_norm(u, p, rule)


def _residual(v: np.ndarray, u: np.ndarray, lam_hat: float, p: float) -> float:
    up = u ** (p - 1.0)
    return float(np.max(np.abs(v - lam_hat * up)) / (lam_hat * np.max(up)))


def moment(u, p: float, rule: QuadratureRule | None = None) -> np.ndarray:
    """int u^p xi d sigma, one entry per ambient coordinate."""
    rule = rule or u.rule
    vals = u.values if isinstance(u, DensityField) else np.asarray(u)
    if np.any(vals < 0):
        raise DomainError("moment needs a nonnegative field")
    return (rule.weights * vals ** p) @ rule.points


def _diagnostics(u: np.ndarray, p: float, rule: QuadratureRule) -> tuple[float, float]:
    mass = float(np.sum(rule.weights * u ** p))
    mnorm = float(np.linalg.norm(moment(u, p, rule))) / mass
    avg = integrate(u, rule) / rule.total_measure
    return mnorm, lp_norm(u - avg, p, rule)


def _update(v: np.ndarray, u: np.ndarray, p: float, rule: QuadratureRule, damping: float) -> np.ndarray:
    if np.min(v) < 0:
        raise DomainError("kernel applied to a nonnegative field went negative (kernel defect)")
    nxt = _normalize(v ** (1.0 / (p - 1.0)), p, rule)
    if damping < 1.0:
        nxt = _normalize((1.0 - damping) * u + damping * nxt, p, rule)
    return nxt


def solve(spec: KernelSpec, rule: QuadratureRule, cfg: SolverConfig, u0=None,
          op: KernelOperator | None = None) -> tuple[DensityField, SolveReport]:
    """Fixed-point iteration for I u = Lambda u^{p-1} with ||u||_p = 1.

    ``u0`` overrides the configured initialization (warm start). The report's
    ``converged`` flag is False when max_iter runs out first.
    """
    cfg.check_subcritical(spec)
    if rule.family is not spec.family or rule.dim != spec.dim:
        raise DomainError("rule and kernel live on different spheres")
    start = time.perf_counter()
    op = op or operator_for(spec, rule)
    p = cfg.p
    pp = _conj_exp(p)
    u = initial_field(rule, cfg) if u0 is None else np.asarray(u0.values if isinstance(u0, DensityField) else u0, float)
    if np.any(u < 0) or not np.any(u > 0):
        raise DomainError("initialization must be nonnegative and nonzero")
    u = _normalize(u, p, rule)
    damping = cfg.damping
    trace: list[float] = []
    converged = False
    v = op.apply(u)
    it = 1
    while True:
        lam_hat = lp_norm(v, pp, rule)
        trace.append(lam_hat)
        res = _residual(v, u, lam_hat, p)
        if res <= cfg.tol_residual:
            converged = True
            break
        if it >= cfg.max_iter:
            break
        nxt = _update(v, u, p, rule, damping)
        v_nxt = op.apply(nxt)
        it += 1
        if lp_norm(v_nxt, pp, rule) < lam_hat - ASCENT_SLACK:
            if damping == 0.5:
                raise AscentViolation(f"quotient fell below {lam_hat!r} at iteration {it} even with damping")
            damping = 0.5
            nxt = _update(v, u, p, rule, damping)
            v_nxt = op.apply(nxt)
            it += 1
            if lp_norm(v_nxt, pp, rule) < lam_hat - ASCENT_SLACK:
                raise AscentViolation(f"quotient fell below {lam_hat!r} at iteration {it} even with damping")
        u, v = nxt, v_nxt
    mnorm, dist = _diagnostics(u, p, rule)
    report = SolveReport(
        lambda_p_hat=trace[-1], iterations=it, residual=res, moment_norm=mnorm, dist_to_constant=dist,
        functional_trace=trace, wall_time=time.perf_counter() - start, converged=converged, p=p,
    )
    return DensityField(u, rule), report


def second_variation_check(spec: KernelSpec, u, p: float, f, op: KernelOperator | None = None,
                           slack: float = 1e-8) -> bool:
    """<I f, f> <= (p - 1) Lambda int u^{p-2} f^2 after projecting out u.

    Lambda is the multiplier of I u = Lambda u^{p-1}, i.e. <I u, u> / int u^p,
    so the test does not depend on how u is scaled. f is first replaced by
    f - (int u^{p-1} f / int u^p) u, which enforces int u^{p-1} f = 0.
    """
    rule = u.rule
    op = op or operator_for(spec, rule)
    uv = np.asarray(u.values, float)
    if np.any(uv < 1e-12 * np.max(uv)):
        raise DomainError("u must be strictly positive for the second-variation test")
    fv = np.real(f.values if isinstance(f, DensityField) else np.asarray(f))
    w = rule.weights
    mass = float(np.sum(w * uv ** p))
    fv = fv - float(np.sum(w * uv ** (p - 1) * fv)) / mass * uv
    lam = float(np.sum(w * uv * op.apply(uv))) / mass
    lhs = float(np.sum(w * fv * op.apply(fv)))
    rhs = (p - 1.0) * lam * float(np.sum(w * uv ** (p - 2) * fv ** 2))
    return lhs <= rhs + slack * abs(rhs)


@lru_cache(maxsize=8)
def _re_operator(spec: KernelSpec, rule: QuadratureRule) -> KernelOperator:
    half = spec.lam / 2.0
    kern = ZonalKernel(lambda w: np.real(w) * np.abs(1.0 - w) ** (-half), Family.CR, spec.dim,
                       re_kernel_eig(spec.alpha, spec.dim, (0, 0)), spec.lam)
    return kernel_matrix(kern, rule)


def r2v_pointcheck(spec: KernelSpec, u, cutoff: int = 30) -> tuple[float, float]:
    """(lhs, rhs) of the Re-kernel lower bound at the sampled field u.

    lhs = int int Re(xi.conj(eta)) K(xi, eta) u(xi) u(eta); rhs = a <I u, u> +
    C b <I (u - avg), u - avg> with (a, b) the mode-independent coefficients
    and C the best mode-by-mode constant up to ``cutoff``.
    """
    if spec.family is not Family.CR:
        raise DomainError("r2v_pointcheck is defined for the CR family")
    rule = u.rule
    uv = np.real(np.asarray(u.values))
    w = rule.weights
    lhs = float(np.sum(w * uv * _re_operator(spec, rule).apply(uv)))
    op = operator_for(spec, rule)
    a, b = r2v_coefficients(spec)
    dev = uv - integrate(uv, rule) / rule.total_measure
    c_hat = r2v_best_c(spec, cutoff)
    rhs = a * float(np.sum(w * uv * op.apply(uv))) + c_hat * b * float(np.sum(w * dev * op.apply(dev)))
    return lhs, rhs


def offset_schedule(p_crit: float, end_offset: float = 0.01, halvings: int = 6) -> list[float]:
    """p_crit + end_offset * 2^k for k = halvings-1, ..., 0 (decreasing)."""
    if end_offset <= 0 or halvings < 1:
        raise DomainError("need a positive end offset and at least one step")
    return [p_crit + end_offset * 2.0 ** k for k in range(halvings - 1, -1, -1)]


def continuation(spec: KernelSpec, rule: QuadratureRule, p_list, cfg: SolverConfig,
                 warm_start: bool = True) -> list[SolveReport]:
    """Solves along a strictly decreasing p_list, each warm-started from the last."""
    p_list = [float(p) for p in p_list]
    if any(b >= a for a, b in zip(p_list, p_list[1:])):
        raise DomainError("p_list must be strictly decreasing")
    reports = []
    u = None
    for p in p_list:
        c = SolverConfig(p, cfg.init, cfg.amplitude, cfg.seed, cfg.tol_residual, cfg.max_iter, cfg.damping)
        field_, rep = solve(spec, rule, c, u0=u if warm_start else None)
        reports.append(rep)
        u = field_
    return reports


def continuation_csv(reports) -> str:
    """CSV with the fixed continuation columns, reals to 17 significant digits."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CONTINUATION_COLUMNS)
    for r in reports:
        wr.writerow([f"{r.p:.17g}", f"{r.lambda_p_hat:.17g}", f"{r.residual:.17g}", f"{r.moment_norm:.17g}",
                     f"{r.dist_to_constant:.17g}", r.iterations, f"{r.wall_time * 1e3:.17g}"])
    return buf.getvalue()


def pair_collapse(spec: KernelSpec, rule: QuadratureRule, p: float, cfg: SolverConfig,
                  f0=None, g0=None) -> float:
    """Two-field iteration g <- (I f)^{1/(p-1)}, f <- (I g)^{1/(p-1)}, updated simultaneously.

    Both fields are kept at unit L^p norm. Defaults: f from ``cfg`` (a
    perturbed start) and g constant. Returns ||f - g||_p at the end.
    """
    SolverConfig(p, cfg.init, cfg.amplitude, cfg.seed, cfg.tol_residual, cfg.max_iter).check_subcritical(spec)
    op = operator_for(spec, rule)
    f = _normalize(initial_field(rule, cfg) if f0 is None else np.asarray(f0, float), p, rule)
    g = _normalize(np.ones(len(rule)) if g0 is None else np.asarray(g0, float), p, rule)
    pp = _conj_exp(p)
    for _ in range(cfg.max_iter):
        If, Ig = op.apply(f), op.apply(g)
        lam_f, lam_g = lp_norm(If, pp, rule), lp_norm(Ig, pp, rule)
        done = max(_residual(Ig, f, lam_g, p), _residual(If, g, lam_f, p)) <= cfg.tol_residual
        if done:
            break
        f, g = _normalize(Ig ** (1.0 / (p - 1.0)), p, rule), _normalize(If ** (1.0 / (p - 1.0)), p, rule)
    return lp_norm(f - g, p, rule)
