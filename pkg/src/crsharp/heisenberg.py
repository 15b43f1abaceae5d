"""Heisenberg group H^m and its Cayley correspondence with the CR sphere S^{2m+1}.

Group law (z, t)(z', t') = (z + z', t + t' + 2 Im z.conj(z')), parabolic
dilations (dz, d^2 t) and the homogeneous norm (|z|^4 + t^2)^{1/4}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import DomainError

__all__ = [
    "HeisenbergPoint",
    "SpherePoint",
    "group_mul",
    "inverse",
    "dilate",
    "homogeneous_norm",
    "extremal_H",
    "cayley",
    "cayley_inverse",
    "cayley_jacobian",
    "numerical_cayley_jacobian",
    "distance_identity_residual",
    "pullback_spot_integral",
]

UNIT_TOL = 1e-12


def _cvec(z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.ndim != 1:
        raise DomainError("expected a complex vector")
    return z


@dataclass(frozen=True, eq=False)
class HeisenbergPoint:
    """Group element (z, t) of H^m with z in C^m and t real."""

    z: np.ndarray
    t: float

    def __post_init__(self):
        z = _cvec(self.z)
        if not np.all(np.isfinite(z)) or not math.isfinite(float(self.t)):
            raise DomainError("HeisenbergPoint entries must be finite")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", float(self.t))

    @property
    def m(self) -> int:
        return len(self.z)

    @classmethod
    def origin(cls, m: int = 1) -> "HeisenbergPoint":
        return cls(np.zeros(m, dtype=complex), 0.0)

    def __eq__(self, other):
        return isinstance(other, HeisenbergPoint) and np.array_equal(self.z, other.z) and self.t == other.t

    def __repr__(self):
        return f"HeisenbergPoint(z={self.z.tolist()}, t={self.t})"


@dataclass(frozen=True, eq=False)
class SpherePoint:
    """Unit vector zeta in C^{m+1}."""

    zeta: np.ndarray

    def __post_init__(self):
        zeta = _cvec(self.zeta)
        if len(zeta) < 2:
            raise DomainError("a sphere point needs at least two complex coordinates")
        if abs(np.linalg.norm(zeta) - 1.0) > UNIT_TOL:
            raise DomainError(f"not a unit vector: |zeta| = {np.linalg.norm(zeta)!r}")
        object.__setattr__(self, "zeta", zeta)

    @classmethod
    def normalized(cls, v) -> "SpherePoint":
        v = _cvec(v)
        n = np.linalg.norm(v)
        if n == 0:
            raise DomainError("cannot normalize the zero vector")
        return cls(v / n)

    @property
    def m(self) -> int:
        return len(self.zeta) - 1

    def dot_conj(self, other: "SpherePoint") -> complex:
        """xi . conj(eta)."""
        return complex(np.dot(self.zeta, np.conj(other.zeta)))

    def __repr__(self):
        return f"SpherePoint({self.zeta.tolist()})"


def _same_m(u: HeisenbergPoint, v: HeisenbergPoint):
    if u.m != v.m:
        raise DomainError(f"dimension mismatch: H^{u.m} vs H^{v.m}")


def group_mul(u: HeisenbergPoint, v: HeisenbergPoint) -> HeisenbergPoint:
    _same_m(u, v)
    twist = 2.0 * float(np.imag(np.dot(u.z, np.conj(v.z))))
    return HeisenbergPoint(u.z + v.z, u.t + v.t + twist)


def inverse(u: HeisenbergPoint) -> HeisenbergPoint:
    return HeisenbergPoint(-u.z, -u.t)


def dilate(delta: float, u: HeisenbergPoint) -> HeisenbergPoint:
    if not delta > 0:
        raise DomainError(f"dilation factor must be positive, got {delta!r}")
    return HeisenbergPoint(delta * u.z, delta * delta * u.t)


def homogeneous_norm(u: HeisenbergPoint) -> float:
    r2 = float(np.sum(np.abs(u.z) ** 2))
    return math.hypot(r2, u.t) ** 0.5


def _size(u: HeisenbergPoint) -> float:
    """(1 + |z|^2)^2 + t^2 = |1 + |z|^2 - i t|^2."""
    return (1.0 + float(np.sum(np.abs(u.z) ** 2))) ** 2 + u.t ** 2


def extremal_H(u: HeisenbergPoint, lam: float) -> float:
    """H(z, t) = ((1 + |z|^2)^2 + t^2)^{-(2Q - lam)/4}."""
    Q = 2 * u.m + 2
    if not 0 < lam < Q:
        raise DomainError(f"lambda must lie in (0, {Q}), got {lam!r}")
    return _size(u) ** (-(2 * Q - lam) / 4.0)


def cayley(u: HeisenbergPoint) -> SpherePoint:
    """Cayley map H^m -> S^{2m+1} minus the south pole.

    zeta_j = 2 z_j / (1 + |z|^2 - i t), zeta_{m+1} = (1 - |z|^2 + i t) / (1 + |z|^2 - i t).
    The sign of t is tied to the group law: with it the chordal quantity
    |1 - zeta(u).conj(zeta(v))| is a function of v^{-1} u.
    """
    r2 = float(np.sum(np.abs(u.z) ** 2))
    d = complex(1.0 + r2, -u.t)
    zeta = np.concatenate([2.0 * u.z / d, [complex(1.0 - r2, u.t) / d]])
    # |zeta| = 1 holds algebraically; renormalize away the last ulp
    return SpherePoint(zeta / np.linalg.norm(zeta))


def cayley_inverse(xi: SpherePoint) -> HeisenbergPoint:
    """Inverse of :func:`cayley`; undefined at the south pole."""
    last = xi.zeta[-1]
    if abs(1.0 + last) < 1e-300:
        raise DomainError("the south pole has no Heisenberg preimage")
    # 1 + zeta_{m+1} = 2 / d, so d = 2 / (1 + zeta_{m+1})
    d = 2.0 / (1.0 + last)
    z = xi.zeta[:-1] * d / 2.0
    return HeisenbergPoint(z, -d.imag)


def cayley_jacobian(u: HeisenbergPoint) -> float:
    """Density of d sigma(cayley(u)) with respect to Lebesgue measure dz dt."""
    return 2.0 ** (2 * u.m + 1) * _size(u) ** (-(u.m + 1))


def numerical_cayley_jacobian(u: HeisenbergPoint, h: float = 1e-5) -> float:
    """sqrt(det(D^T D)) of the Cayley map by central differences in R^{2m+1}."""
    m = u.m
    x0 = np.concatenate([u.z.real, u.z.imag, [u.t]])

    def emb(x):
        p = HeisenbergPoint(x[:m] + 1j * x[m:2 * m], x[2 * m])
        zeta = cayley(p).zeta
        return np.concatenate([zeta.real, zeta.imag])

    cols = []
    for i in range(2 * m + 1):
        e = np.zeros(2 * m + 1)
        e[i] = h
        cols.append((emb(x0 + e) - emb(x0 - e)) / (2 * h))
    D = np.stack(cols, axis=1)
    return float(math.sqrt(np.linalg.det(D.T @ D)))


def distance_identity_residual(u: HeisenbergPoint, v: HeisenbergPoint) -> float:
    """| |1 - zeta(u).conj(zeta(v))| - 2 |v^{-1}u|^2 / sqrt(size(u) size(v)) |."""
    lhs = abs(1.0 - cayley(u).dot_conj(cayley(v)))
    rhs = 2.0 * homogeneous_norm(group_mul(inverse(v), u)) ** 2 / math.sqrt(_size(u) * _size(v))
    return abs(lhs - rhs)


def pullback_spot_integral(lam: float = 2.0, m: int = 1, box: float = 1.0, n_samples: int = 400,
                           seed: int = 0) -> tuple[float, float]:
    """Monte Carlo check that the Heisenberg double integral transports to the sphere.

    Returns (heisenberg_value, sphere_value). The first estimates
    int int H(u) H(v) |v^{-1}u|^{-lam} du dv over the box where every real
    coordinate of (z, t) lies in [-box, box]. The second estimates the double integral of the kernel
    |1 - xi.conj(eta)|^{-lam/2} against the constant extremal over the image
    region, importance-sampled by the same points pushed through the Cayley
    map; its density uses a finite-difference Jacobian of the map, so the two
    numbers agree only if distance identity, Jacobian and extremal all match.
    """
    Q = 2 * m + 2
    if not 0 < lam < Q:
        raise DomainError(f"lambda must lie in (0, {Q}), got {lam!r}")
    rng = np.random.default_rng(seed)
    dimr = 2 * m + 1
    x = rng.uniform(-box, box, size=(n_samples, dimr))
    vol = (2.0 * box) ** dimr
    pts = [HeisenbergPoint(r[:m] + 1j * r[m:2 * m], r[2 * m]) for r in x]
    Hv = np.array([extremal_H(p, lam) for p in pts])
    xi = np.array([cayley(p).zeta for p in pts])
    jac = np.array([numerical_cayley_jacobian(p) for p in pts])
    z = x[:, :m] + 1j * x[:, m:2 * m]
    t = x[:, 2 * m]
    # v^{-1} u for every ordered pair (u = row i, v = column j)
    dz = z[:, None, :] - z[None, :, :]
    dt = t[:, None] - t[None, :] - 2.0 * np.imag(np.einsum("jk,ik->ij", z, np.conj(z)))
    nrm4 = np.sum(np.abs(dz) ** 2, axis=-1) ** 2 + dt ** 2
    chord = np.abs(1.0 - xi @ np.conj(xi).T)
    off = ~np.eye(n_samples, dtype=bool)
    nrm4 = np.where(off, nrm4, 1.0)
    chord = np.where(off, chord, 1.0)
    heis = float(np.sum((np.outer(Hv, Hv) * nrm4 ** (-lam / 4.0))[off]))
    # the sphere-side extremal is constant: the pullback weight of H is 2^{lam/2 - 4m - 2}
    const = 2.0 ** (lam / 2.0 - 4 * m - 2)
    sph = float(np.sum((const * np.outer(jac, jac) * chord ** (-lam / 2.0))[off]))
    scale = vol * vol / (n_samples * (n_samples - 1))
    return heis * scale, sph * scale
