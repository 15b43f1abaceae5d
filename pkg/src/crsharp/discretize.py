"""Quadrature rules on S^3, S^1, S^2, sampled fields, and discrete kernel operators.

Every built-in rule is a stack of "rings": a Gauss-Legendre variable indexes
the ring and one or two uniform angles run around it. The zonal kernels used
here are invariant under those angle rotations, so a kernel operator is
block-circulant and is applied with FFTs over the angle axes; only the
ring-to-ring blocks are stored.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .spectra import Family, KernelSpec, self_integral
from .specfun import DomainError

__all__ = [
    "QuadratureRule",
    "DensityField",
    "ZonalKernel",
    "KernelOperator",
    "hopf_rule",
    "real_sphere_rule",
    "integrate",
    "inner",
    "lp_norm",
    "kernel_matrix",
    "schur_bound",
    "apply_kernel",
    "write_field_csv",
    "read_field_csv",
]

# angular refinement of the kernel sums relative to the field grid
DEFAULT_OVERSAMPLE = 6


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and positive weights approximating d sigma.

    ``points`` has shape (N, d): complex coordinates in C^{m+1} for the CR
    family, real coordinates in R^{n+1} otherwise. ``shape`` is the ring
    layout (n_rings, *angle_counts) in C order; ``ring_params`` holds the
    per-ring Legendre abscissae.
    """

    points: np.ndarray
    weights: np.ndarray
    family: Family
    dim: int
    shape: tuple
    ring_params: np.ndarray
    descriptor: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.weights)

    @property
    def n_angles(self) -> tuple:
        return tuple(self.shape[1:])

    @property
    def total_measure(self) -> float:
        return float(np.sum(self.weights))

    @property
    def rule_id(self) -> str:
        parts = ",".join(f"{k}={v}" for k, v in sorted(self.descriptor.items()))
        return f"{self.family.value}{self.dim}[{parts}]"

    def zonal_argument(self, oversample: int = 1) -> np.ndarray:
        """w = xi.conj(eta) (CR) or t = xi.eta (real) for every ring pair and angle shift.

        Shape (R, R, *angles): entry [a, b, d] pairs a node of ring a at angle
        index i with a node of ring b at angle index i - d. With ``oversample``
        > 1 the angle shifts run over a grid that many times finer.
        """
        return np.stack([self.ring_argument(a, oversample) for a in range(self.shape[0])])

    def ring_argument(self, a: int, oversample: int = 1) -> np.ndarray:
        """Row ``a`` of :meth:`zonal_argument`, shape (R, *angles)."""
        n_a = self.shape[1] * int(oversample)
        ph = 2 * np.pi * np.arange(n_a) / n_a
        if self.family is Family.CR:
            c, s = self.ring_params[:, 0], self.ring_params[:, 1]
            e = np.exp(1j * ph)
            return (c[a] * c)[:, None, None] * e[None, :, None] + (s[a] * s)[:, None, None] * e[None, None, :]
        if self.dim == 1:
            return np.cos(ph)[None, :]
        t = self.ring_params[:, 0]
        st = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
        return (t[a] * t)[:, None] + (st[a] * st)[:, None] * np.cos(ph)[None, :]

    def ring_weights(self) -> np.ndarray:
        """Weight of a single node on each ring (all nodes of a ring share it)."""
        return self.weights.reshape(self.shape[0], -1)[:, 0]


def hopf_rule(n_s: int, n_a: int) -> QuadratureRule:
    """Rule on S^3 in Hopf coordinates xi = (cos th e^{i p1}, sin th e^{i p2}).

    With s = cos 2 th the measure is d sigma = ds dp1 dp2 / 4, so the rule is
    Gauss-Legendre in s times the trapezoidal rule in each angle.
    """
    if n_s < 2 or n_a < 4:
        raise DomainError(f"hopf_rule needs n_s >= 2 and n_a >= 4, got ({n_s}, {n_a})")
    s, ws = np.polynomial.legendre.leggauss(n_s)
    c = np.sqrt(0.5 * (1.0 + s))
    sn = np.sqrt(0.5 * (1.0 - s))
    ang = 2 * np.pi * np.arange(n_a) / n_a
    e = np.exp(1j * ang)
    z1 = c[:, None, None] * e[None, :, None] * np.ones(n_a)[None, None, :]
    z2 = sn[:, None, None] * np.ones(n_a)[None, :, None] * e[None, None, :]
    pts = np.stack([z1, z2], axis=-1).reshape(-1, 2)
    wts = np.repeat(0.25 * ws * (2 * np.pi / n_a) ** 2, n_a * n_a)
    return QuadratureRule(pts, wts, Family.CR, 1, (n_s, n_a, n_a), np.stack([c, sn], axis=1),
                          {"kind": "hopf", "n_s": n_s, "n_a": n_a})


def real_sphere_rule(n: int, resolution) -> QuadratureRule:
    """Uniform grid on S^1, or Gauss-Legendre(cos polar) x uniform azimuth on S^2.

    ``resolution`` is the node count on S^1 and (n_t, n_a) on S^2.
    """
    if n == 1:
        n_a = int(resolution if np.isscalar(resolution) else resolution[-1])
        if n_a < 3:
            raise DomainError("real_sphere_rule: S^1 needs at least 3 nodes")
        ang = 2 * np.pi * np.arange(n_a) / n_a
        pts = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        wts = np.full(n_a, 2 * np.pi / n_a)
        return QuadratureRule(pts, wts, Family.REAL, 1, (1, n_a), np.zeros((1, 1)),
                              {"kind": "uniform", "n_a": n_a})
    if n == 2:
        n_t, n_a = (resolution, 2 * resolution) if np.isscalar(resolution) else resolution
        if n_t < 2 or n_a < 4:
            raise DomainError("real_sphere_rule: S^2 needs n_t >= 2 and n_a >= 4")
        t, wt = np.polynomial.legendre.leggauss(n_t)
        st = np.sqrt(1.0 - t * t)
        ang = 2 * np.pi * np.arange(n_a) / n_a
        pts = np.stack([st[:, None] * np.cos(ang)[None, :], st[:, None] * np.sin(ang)[None, :],
                        t[:, None] * np.ones(n_a)[None, :]], axis=-1).reshape(-1, 3)
        wts = np.repeat(wt * (2 * np.pi / n_a), n_a)
        return QuadratureRule(pts, wts, Family.REAL, 2, (n_t, n_a), t[:, None],
                              {"kind": "gauss-uniform", "n_t": n_t, "n_a": n_a})
    raise DomainError(f"real_sphere_rule supports n = 1 or 2, got {n!r}")


@dataclass
class DensityField:
    """Values of a function on the nodes of a rule, with an optional closed form."""

    values: np.ndarray
    rule: QuadratureRule
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (len(self.rule),):
            raise DomainError(f"field has {self.values.shape} values, rule has {len(self.rule)} nodes")

    @classmethod
    def from_function(cls, rule: QuadratureRule, fn) -> "DensityField":
        return cls(np.asarray(fn(rule.points)), rule, fn)

    @classmethod
    def constant(cls, rule: QuadratureRule, c: float = 1.0) -> "DensityField":
        return cls.from_function(rule, lambda x: np.full(len(x), c, dtype=float))

    @property
    def rule_id(self) -> str:
        return self.rule.rule_id

    def with_values(self, values) -> "DensityField":
        return DensityField(values, self.rule, None)


def _vals(f):
    return f.values if isinstance(f, DensityField) else np.asarray(f)


def integrate(f, rule: QuadratureRule):
    return np.sum(rule.weights * _vals(f))


def inner(f, g, rule: QuadratureRule):
    """Discrete L^2 pairing sum w_i conj(f_i) g_i."""
    return np.sum(rule.weights * np.conj(_vals(f)) * _vals(g))


def lp_norm(f, p: float, rule: QuadratureRule | None = None) -> float:
    """Discrete L^p norm (sum w_i |f_i|^p)^{1/p}."""
    if p < 1:
        raise DomainError(f"lp_norm requires p >= 1, got {p!r}")
    if rule is None:
        rule = f.rule
    return float(np.sum(rule.weights * np.abs(_vals(f)) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class ZonalKernel:
    """K(xi, eta) = profile(w), w = xi.conj(eta) (CR) or xi.eta (real).

    ``self_integral`` is int K(xi, eta) d sigma(eta), needed by the
    singularity-subtracted operator; ``lam`` is the exponent for truncation.
    """

    profile: Callable
    family: Family
    dim: int
    self_integral: Optional[float] = None
    lam: Optional[float] = None

    @classmethod
    def from_spec(cls, spec: KernelSpec) -> "ZonalKernel":
        return cls(spec.profile, spec.family, spec.dim, self_integral(spec), spec.lam)

    def distance(self, w):
        """|1 - w| (CR) or |xi - eta| = sqrt(2 - 2t) (real)."""
        if self.family is Family.CR:
            return np.abs(1.0 - w)
        return np.sqrt(np.clip(2.0 - 2.0 * w, 0.0, None))


class KernelOperator:
    """Discrete integral operator (A f)_i ~ int K(xi_i, eta) f(eta) d sigma(eta).

    mode "subtract": (Af)_i = sum_{r != i} K_ir w_r (f_r - f_i) + f_i * self_integral.
    mode "epsilon": K replaced by the truncation K^eps (= eps^{-lam/2} where the
    distance |1 - xi.conj(eta)| is <= eps), diagonal included.

    The ring-to-ring kernel sums are taken on an angle grid ``oversample``
    times finer than the rule's, with the field trigonometrically
    interpolated onto it. In Fourier variables this only keeps the kernel's
    angular coefficients inside the rule's band, so the operator stays
    block-circulant, self-adjoint and positive (it is the compression of the
    finer operator), while the angular error drops to that of the finer grid.
    """

    def __init__(self, kernel: ZonalKernel, rule: QuadratureRule, mode: str = "subtract",
                 eps: float | None = None, oversample: int = DEFAULT_OVERSAMPLE):
        if kernel.family is not rule.family or kernel.dim != rule.dim:
            raise DomainError("kernel and rule live on different spheres")
        if int(oversample) != oversample or oversample < 1:
            raise DomainError(f"oversample must be a positive integer, got {oversample!r}")
        if mode == "subtract" and kernel.self_integral is None:
            raise DomainError("subtract mode needs the kernel's exact self-integral")
        if mode == "epsilon" and (eps is None or eps <= 0 or kernel.lam is None):
            raise DomainError("epsilon mode needs eps > 0 and a kernel exponent")
        if mode not in ("subtract", "epsilon"):
            raise DomainError(f"unknown regularization mode {mode!r}")
        self.kernel = kernel
        self.rule = rule
        self.mode = mode
        self.eps = eps
        self.oversample = int(oversample)
        R = rule.shape[0]
        n_ang = rule.n_angles
        axes = tuple(range(1, 1 + len(n_ang)))
        self._axes = tuple(ax + 1 for ax in axes)
        M = n_ang[0] * self.oversample
        # fine-grid node weight of each source ring
        wr = rule.ring_weights() / self.oversample ** len(n_ang)
        wshape = (-1,) + (1,) * len(n_ang)
        band = np.ix_(*([np.arange(R)] + [np.fft.fftfreq(n, 1.0 / n).astype(int) % M for n in n_ang]))
        fk = np.empty((R, R) + tuple(n_ang), dtype=complex)
        origin = (0,) * len(n_ang)
        for a in range(R):
            arg = rule.ring_argument(a, self.oversample)
            with np.errstate(divide="ignore", invalid="ignore"):
                if mode == "subtract":
                    hole = np.zeros(arg.shape, dtype=bool)
                    hole[(a,) + origin] = True
                    row = np.where(hole, 0.0, kernel.profile(np.where(hole, 0.5, arg)))
                else:
                    near = kernel.distance(arg) <= eps
                    row = np.where(near, eps ** (-kernel.lam / 2.0), kernel.profile(np.where(near, 0.5, arg)))
            fk[a] = np.fft.fftn(np.real(row) * wr.reshape(wshape), axes=axes)[band]
        self._fk = fk
        # effective per-node weighted kernel on the rule's own grid
        self.weighted_blocks = np.real(np.fft.ifftn(fk, axes=self._axes))
        self.row_sums = np.real(fk[(slice(None), slice(None)) + origin].sum(axis=1))
        if mode == "subtract":
            self.diag_correction = kernel.self_integral - self.row_sums
        else:
            self.diag_correction = np.zeros(R)

    def __matmul__(self, f):
        return self.apply(f)

    def apply(self, f):
        """Apply to a field (or a raw value vector / stack of vectors as columns)."""
        if isinstance(f, DensityField):
            return DensityField(self.apply(f.values), f.rule)
        v = np.asarray(f)
        if v.ndim == 2:
            return np.stack([self.apply(v[:, c]) for c in range(v.shape[1])], axis=1)
        shape = self.rule.shape
        x = v.reshape(shape)
        fx = np.fft.fftn(x, axes=tuple(range(1, len(shape))))
        conv = np.einsum("ab...,b...->a...", self._fk, fx)
        out = np.fft.ifftn(conv, axes=tuple(range(1, len(shape))))
        if not np.iscomplexobj(v):
            out = out.real
        out = out + self.diag_correction.reshape((-1,) + (1,) * (len(shape) - 1)) * x
        return out.reshape(-1)

    def dense(self, max_nodes: int = 6000) -> np.ndarray:
        """Materialize A as an N x N matrix with A[i, r] = K_ir w_r (small rules only)."""
        N = len(self.rule)
        if N > max_nodes:
            raise DomainError(f"refusing to materialize a {N} x {N} kernel matrix")
        return np.stack([self.apply(np.eye(N, 1, -r).ravel()) for r in range(N)], axis=1)

    def quadratic_form(self, f, g=None) -> float:
        """<A f, g> under the discrete measure (real fields)."""
        g = f if g is None else g
        return float(np.real(inner(_vals(g), self.apply(_vals(f)), self.rule)))


def kernel_matrix(spec, rule: QuadratureRule, regularization="subtract", oversample: int = DEFAULT_OVERSAMPLE) -> KernelOperator:
    """Discrete operator for a KernelSpec (or ZonalKernel).

    ``regularization`` is "subtract", or ("epsilon", eps) / "epsilon:<eps>".
    """
    kernel = spec if isinstance(spec, ZonalKernel) else ZonalKernel.from_spec(spec)
    if isinstance(regularization, str) and regularization.startswith("epsilon:"):
        regularization = ("epsilon", float(regularization.split(":", 1)[1]))
    if isinstance(regularization, tuple):
        mode, eps = regularization
        return KernelOperator(kernel, rule, mode, eps, oversample=oversample)
    return KernelOperator(kernel, rule, regularization, oversample=oversample)


def apply_kernel(op: KernelOperator, f):
    return op.apply(f)


def schur_bound(spec, rule: QuadratureRule, regularization="subtract", oversample: int = DEFAULT_OVERSAMPLE) -> float:
    """max(sup_xi int |K| d sigma(eta), sup_eta int |K| d sigma(xi)), discretely.

    Every kernel here is positive, so |K| = K. In subtract mode the integral
    of each row and column is then the exact self-integral (the kernel is
    zonal). In epsilon mode K^eps is bounded and the row and column sums are
    plain weighted sums over the fine angular grid.
    """
    op = kernel_matrix(spec, rule, regularization, oversample)
    if op.mode == "subtract":
        return float(abs(op.kernel.self_integral))
    origin = (slice(None), slice(None)) + (0,) * len(op._axes)
    fine = np.real(op._fk[origin])  # [a, b] = w_b * sum over angle shifts of K
    wr = rule.ring_weights()
    rows = fine.sum(axis=1)
    cols = (fine * (wr[:, None] / wr[None, :])).sum(axis=0)
    return float(max(rows.max(), cols.max()))


def _real_columns(points: np.ndarray):
    if np.iscomplexobj(points):
        cols = np.empty((points.shape[0], 2 * points.shape[1]))
        cols[:, 0::2] = points.real
        cols[:, 1::2] = points.imag
        names = [f"{part}_z{i + 1}" for i in range(points.shape[1]) for part in ("re", "im")]
        return cols, names
    return points, [f"x{i + 1}" for i in range(points.shape[1])]


def write_field_csv(path, field: DensityField | None = None, rule: QuadratureRule | None = None):
    """One node per line: coordinates, weight, value (value_re/value_im if complex)."""
    rule = field.rule if field is not None else rule
    coords, names = _real_columns(rule.points)
    header = names + ["weight"]
    vals = None
    if field is not None:
        vals = field.values
        header += ["value_re", "value_im"] if np.iscomplexobj(vals) else ["value"]
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for i in range(len(rule)):
            row = [repr(float(x)) for x in coords[i]] + [repr(float(rule.weights[i]))]
            if vals is not None:
                if np.iscomplexobj(vals):
                    row += [repr(float(vals[i].real)), repr(float(vals[i].imag))]
                else:
                    row.append(repr(float(vals[i])))
            wr.writerow(row)


def read_field_csv(path):
    """Inverse of write_field_csv: (header, coordinate array, weights, values or None)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    iw = header.index("weight")
    coords, weights = body[:, :iw], body[:, iw]
    values = None
    if "value" in header:
        values = body[:, header.index("value")]
    elif "value_re" in header:
        values = body[:, header.index("value_re")] + 1j * body[:, header.index("value_im")]
    return header, coords, weights, values
