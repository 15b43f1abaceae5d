"""Closed-form Funk-Hecke spectra on S^{2m+1} and S^n, sharp constants, and
the independent disc-quadrature oracle used to certify them.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .specfun import DomainError, SpectralIndex, as_index, disc_poly, gamma_ratio, jacobi_p, log_gamma

__all__ = [
    "Family",
    "KernelSpec",
    "sphere_area",
    "eig_dist_kernel",
    "eig_dist_kernel_weighted",
    "re_kernel_eig",
    "r2v_mode_gap",
    "r2v_best_c",
    "sublaplacian_eig",
    "sharp_constant",
    "critical_exponent",
    "positivity_scan",
    "oracle_eig",
    "real_oracle_eig",
    "self_integral",
    "r2v_coefficients",
    "gegenbauer_zonal",
    "real_eig",
]


class Family(str, enum.Enum):
    CR = "cr"
    REAL = "real"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel |1 - xi.conj(eta)|^{-lambda/2} on S^{2m+1} (CR) or |xi - eta|^{-lambda} on S^n (real)."""

    family: Family
    dim: int
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.dim!r}")
        if not (0.0 < self.lam < self.Q):
            bound = "Q = 2m+2" if self.family is Family.CR else "n"
            raise DomainError(f"lambda must lie in (0, {bound}) = (0, {self.Q:g}), got {self.lam!r}")

    @classmethod
    def cr(cls, m: int, lam: float) -> "KernelSpec":
        return cls(Family.CR, m, lam)

    @classmethod
    def real(cls, n: int, lam: float) -> "KernelSpec":
        return cls(Family.REAL, n, lam)

    @property
    def Q(self) -> float:
        """Homogeneous dimension 2m+2 (CR) or n (real)."""
        return 2.0 * self.dim + 2.0 if self.family is Family.CR else float(self.dim)

    @property
    def alpha(self) -> float:
        return self.lam / 4.0

    @property
    def p_crit(self) -> float:
        return critical_exponent(self)

    def profile(self, w):
        """Kernel as a function of w = xi.conj(eta) (CR) or t = xi.eta (real)."""
        if self.family is Family.CR:
            return np.abs(1.0 - np.asarray(w)) ** (-self.lam / 2.0)
        return (2.0 - 2.0 * np.asarray(w, dtype=float)) ** (-self.lam / 2.0)


def sphere_area(family: Family, dim: int) -> float:
    """|S^{2m+1}| = 2 pi^{m+1}/m! for CR, |S^n| = 2 pi^{(n+1)/2}/Gamma((n+1)/2) for real."""
    if Family(family) is Family.CR:
        return 2.0 * math.pi ** (dim + 1) / math.factorial(dim)
    return 2.0 * math.pi ** ((dim + 1) / 2.0) / math.exp(log_gamma((dim + 1) / 2.0))


def critical_exponent(spec: KernelSpec) -> float:
    return 2.0 * spec.Q / (2.0 * spec.Q - spec.lam)


def _check_alpha(alpha: float, m: int):
    if not (-1.0 < alpha < (m + 1) / 2.0):
        raise DomainError(f"alpha must lie in (-1, (m+1)/2) = (-1, {(m + 1) / 2}), got {alpha!r}")


def eig_dist_kernel(alpha: float, m: int, idx) -> float:
    """Eigenvalue E_{j,k} of the kernel |1 - xi.conj(eta)|^{-2 alpha} on H_{j,k}.

    alpha = 0 is evaluated as its limit (the constant kernel): |S^{2m+1}| on
    H_{0,0}, zero elsewhere.
    """
    idx = as_index(idx)
    _check_alpha(alpha, m)
    if alpha == 0.0:
        return sphere_area(Family.CR, m) if idx.j == idx.k == 0 else 0.0
    # Gamma(j+alpha)/Gamma(alpha) is a finite product, so 1/Gamma(alpha)^2 never
    # has to be formed; every other Gamma argument is positive in range.
    val = 2.0 * math.pi ** (m + 1)
    val *= gamma_ratio(m + 1 - 2 * alpha, idx.j + m + 1 - alpha)
    val *= gamma_ratio(idx.j + alpha, alpha) * gamma_ratio(idx.k + alpha, alpha)
    return val * math.exp(-log_gamma(idx.k + m + 1 - alpha))


def _weighted_correction(alpha: float, m: int, idx: SpectralIndex, n_symbol: float) -> float:
    j, k = idx.j, idx.k
    dj = j - 1 + alpha
    dk = k - 1 + alpha
    ej = j + m + 1 - alpha
    ek = k + m + 1 - alpha
    if j == 0 or k == 0:
        # 2jk + n(j+k-1+alpha) = n(k-1+alpha) (or n(j-1+alpha)) cancels one
        # factor of the denominator and (alpha-1) cancels the other
        return (m + 1 - 2 * alpha) * n_symbol / (ej * ek)
    for name, v in (("(j-1+alpha)", dj), ("(k-1+alpha)", dk)):
        if v == 0.0:
            _raise_factor(name)
    num = (alpha - 1) * (m + 1 - 2 * alpha) * (2 * j * k + n_symbol * (j + k - 1 + alpha))
    return num / (dj * ej * dk * ek)


def _raise_factor(name: str):
    raise DomainError(f"eig_dist_kernel_weighted: denominator factor {name} vanishes")


def eig_dist_kernel_weighted(alpha: float, m: int, idx, n_symbol: float | None = None) -> float:
    """Eigenvalue of |xi.conj(eta)|^2 |1 - xi.conj(eta)|^{-2 alpha} on H_{j,k}.

    ``n_symbol`` defaults to m. For j = 0 or k = 0 the (alpha - 1) factor is
    cancelled analytically, so alpha = 1 is evaluated exactly.
    """
    idx = as_index(idx)
    if n_symbol is None:
        n_symbol = m
    return eig_dist_kernel(alpha, m, idx) * (1.0 - _weighted_correction(alpha, m, idx, n_symbol))


@lru_cache(maxsize=64)
def _gauss_jacobi(n: int, a: float, b: float):
    x, w = roots_jacobi(n, a, b)
    return x, w


def oracle_eig(kernel, m: int, idx, refinement: int = 4, singular_exponent: float = 0.0) -> float:
    """Funk-Hecke eigenvalue of a zonal kernel K(w) by quadrature on the unit disc.

    Computes c_m * int_D K(w) conj(R_{j,k}(w)) (1-|w|^2)^{m-1} dA(w), with
    c_m = 2 pi^m/(m-1)!. Polar coordinates are centred at the boundary point
    w = 1, w = 1 - rho e^{i phi}, rho = 2 cos(phi) s. The kernel is assumed to
    behave like |1-w|^{-singular_exponent} times a smooth factor there; that
    power, the disc weight and the Jacobians are absorbed into Gauss-Jacobi
    weights in s and phi, so only a smooth remainder is sampled.

    ``refinement`` scales the node counts (16 * refinement per direction).
    """
    idx = as_index(idx)
    if int(refinement) != refinement or refinement < 1:
        raise DomainError(f"oracle_eig: refinement must be a positive integer, got {refinement!r}")
    beta = float(singular_exponent)
    if not beta < m + 1:
        raise DomainError("oracle_eig: kernel singularity is not integrable against the disc weight")
    n = 16 * int(refinement)
    # s in (0, 1) with weight s^{m-beta} (1-s)^{m-1}
    xs, ws = _gauss_jacobi(n, m - 1.0, m - beta)
    s = 0.5 * (1.0 + xs)
    ws = ws * 0.5 ** (2 * m - beta)
    # phi = pi x / 2 with weight (2 cos phi)^{2m-beta} = (1-x^2)^g (2h(x))^g
    g = 2.0 * m - beta
    xp, wp = _gauss_jacobi(n, g, g)
    h = np.cos(0.5 * np.pi * xp) / (1.0 - xp * xp)
    wp = wp * (2.0 * h) ** g * (0.5 * np.pi)
    phi = 0.5 * np.pi * xp
    rho = 2.0 * np.cos(phi)[:, None] * s[None, :]
    w = 1.0 - rho * np.exp(1j * phi)[:, None]
    w_disc = np.where(np.abs(w) > 1.0, w / np.abs(w), w)
    smooth = np.asarray(kernel(w), dtype=complex) * rho ** beta
    vals = smooth * np.conj(disc_poly(idx, m, w_disc))
    c_m = 2.0 * math.pi ** m / math.factorial(m - 1)
    total = c_m * np.einsum("i,ij,j->", wp, vals, ws)
    return float(total.real) if abs(total.imag) <= 1e-12 * max(1.0, abs(total.real)) else complex(total)


def re_kernel_eig(alpha: float, m: int, idx) -> float:
    """Eigenvalue F_{j,k} of Re(w) |1-w|^{-2 alpha}, w = xi.conj(eta).

    Uses Re w = (1 + |w|^2 - |1-w|^2)/2, which splits the kernel into the two
    families above plus the distance kernel at alpha - 1.
    """
    if not alpha > 0.0:
        raise DomainError(f"re_kernel_eig requires alpha > 0, got {alpha!r}")
    idx = as_index(idx)
    return 0.5 * (eig_dist_kernel(alpha, m, idx) + eig_dist_kernel_weighted(alpha, m, idx)
                  - eig_dist_kernel(alpha - 1.0, m, idx))


def _require_cr(spec: KernelSpec, what: str):
    if spec.family is not Family.CR:
        raise DomainError(f"{what} is defined for the CR sphere only")


def r2v_coefficients(spec: KernelSpec) -> tuple[float, float]:
    """(lambda/(4(m+1)-lambda), (2(m+1)-lambda)/(4(m+1)-lambda))."""
    m, lam = spec.dim, spec.lam
    d = 4.0 * (m + 1) - lam
    return lam / d, (2.0 * (m + 1) - lam) / d


def _re_over_dist(spec: KernelSpec, j, k):
    """F_{j,k} / E_{j,k} as a rational function of (j, k); broadcasts over arrays.

    E(alpha-1)/E(alpha) telescopes to
    (m+2-2a)(m+1-2a)(a-1)^2 / ((j+m+1-a)(k+m+1-a)(j+a-1)(k+a-1)),
    with (a-1)/(j+a-1) read as 1 at j = 0 (likewise for k).
    """
    m, a = spec.dim, spec.alpha
    j = np.asarray(j, dtype=float)
    k = np.asarray(k, dtype=float)
    ej, ek = j + m + 1 - a, k + m + 1 - a
    with np.errstate(divide="ignore", invalid="ignore"):
        cj = np.where(j == 0, 1.0, (a - 1) / (j + a - 1))
        ck = np.where(k == 0, 1.0, (a - 1) / (k + a - 1))
        lower = (m + 2 - 2 * a) * (m + 1 - 2 * a) * cj * ck / (ej * ek)
        # weighted correction, same case split as _weighted_correction
        n = m
        general = (a - 1) * (m + 1 - 2 * a) * (2 * j * k + n * (j + k - 1 + a)) / ((j - 1 + a) * ej * (k - 1 + a) * ek)
        corr = np.where((j == 0) | (k == 0), (m + 1 - 2 * a) * n / (ej * ek), general)
    return 0.5 * (2.0 - corr - lower)


def r2v_mode_gap(spec: KernelSpec, idx) -> float:
    """Largest C for which the Re-kernel inequality holds on the single mode H_{j,k}."""
    _require_cr(spec, "r2v_mode_gap")
    idx = as_index(idx)
    a, b = r2v_coefficients(spec)
    return float((_re_over_dist(spec, idx.j, idx.k) - a) / b)


def r2v_best_c(spec: KernelSpec, cutoff: int = 30) -> float:
    """min over 1 <= j+k <= cutoff of the per-mode gap."""
    _require_cr(spec, "r2v_best_c")
    if cutoff < 1:
        raise DomainError("r2v_best_c: cutoff must be >= 1")
    j, k = np.array([(j, d - j) for d in range(1, cutoff + 1) for j in range(d + 1)]).T
    a, b = r2v_coefficients(spec)
    return float(np.min((_re_over_dist(spec, j, k) - a) / b))


def sublaplacian_eig(m: int, idx) -> float:
    """Eigenvalue (j + m/2)(k + m/2) of -Delta_b + m^2/4 on H_{j,k}."""
    idx = as_index(idx)
    return (idx.j + m / 2.0) * (idx.k + m / 2.0)


def sharp_constant(spec: KernelSpec) -> float:
    lam = spec.lam
    if spec.family is Family.CR:
        m, Q = spec.dim, spec.Q
        area = sphere_area(Family.CR, m)
        log_c = (lam / Q) * math.log(area) + math.log(math.factorial(m)) \
            + log_gamma((Q - lam) / 2.0) - 2.0 * log_gamma((2.0 * Q - lam) / 4.0)
        return math.exp(log_c)
    n = spec.dim
    log_c = (lam / 2.0) * math.log(math.pi) + log_gamma((n - lam) / 2.0) - log_gamma(n - lam / 2.0) \
        + (1.0 - lam / n) * (log_gamma(n) - log_gamma(n / 2.0))
    return math.exp(log_c)


def positivity_scan(spec: KernelSpec, cutoff: int = 50) -> bool:
    """True iff E_{j,k}(lambda/4) > 0 for every j + k <= cutoff."""
    _require_cr(spec, "positivity_scan")
    if cutoff < 0:
        raise DomainError("positivity_scan: cutoff must be >= 0")
    return all(eig_dist_kernel(spec.alpha, spec.dim, (j, d - j)) > 0.0
               for d in range(cutoff + 1) for j in range(d + 1))


def gegenbauer_zonal(n: int, degree: int, t):
    """Degree-l zonal harmonic on S^n as a function of t = xi.eta, normalized to 1 at t = 1."""
    a = (n - 2) / 2.0
    return jacobi_p(degree, a, a, t) / jacobi_p(degree, a, a, 1.0)


def real_oracle_eig(kernel, n: int, degree: int, refinement: int = 4, singular_exponent: float = 0.0) -> float:
    """Funk-Hecke eigenvalue on S^n of a zonal kernel K(t), t = xi.eta.

    |S^{n-1}| int_{-1}^{1} K(t) P_l(t) (1-t^2)^{(n-2)/2} dt, where K(t) is
    (1-t)^{-singular_exponent} times a smooth factor; the singular power goes
    into the Gauss-Jacobi weight.
    """
    if int(refinement) != refinement or refinement < 1:
        raise DomainError(f"real_oracle_eig: refinement must be a positive integer, got {refinement!r}")
    beta = float(singular_exponent)
    a = (n - 2) / 2.0
    if not a - beta > -1.0:
        raise DomainError("real_oracle_eig: kernel singularity is not integrable")
    t, w = _gauss_jacobi(16 * int(refinement), a - beta, a)
    smooth = np.asarray(kernel(t), dtype=float) * (1.0 - t) ** beta
    area = 2.0 * math.pi ** (n / 2.0) / math.exp(log_gamma(n / 2.0))
    return float(area * np.sum(w * smooth * gegenbauer_zonal(n, degree, t)))


def real_eig(spec: KernelSpec, degree: int, refinement: int = 4) -> float:
    """Eigenvalue of |xi - eta|^{-lambda} on degree-l harmonics of S^n (quadrature)."""
    if spec.family is not Family.REAL:
        raise DomainError("real_eig is defined for the real sphere only")
    return real_oracle_eig(spec.profile, spec.dim, degree, refinement, spec.lam / 2.0)


def self_integral(spec: KernelSpec) -> float:
    """int K(xi, eta) d sigma(eta): the eigenvalue on constants."""
    if spec.family is Family.CR:
        return eig_dist_kernel(spec.alpha, spec.dim, (0, 0))
    return real_eig(spec, 0)
