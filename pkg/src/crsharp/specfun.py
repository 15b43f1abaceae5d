"""Scalar special functions: log-gamma, gamma ratios, Jacobi and disc polynomials.

Everything here is implemented in-repo (no scipy.special) so the closed-form
constants downstream are reproducible bit-for-bit across platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "DomainError",
    "SpectralIndex",
    "as_index",
    "log_gamma",
    "gamma_ratio",
    "jacobi_p",
    "jacobi_p_at_one",
    "disc_poly",
]

EULER_GAMMA = 0.57721566490153286060651209008240243


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of a function."""


@dataclass(frozen=True, order=True)
class SpectralIndex:
    """Bidegree (j, k) labelling the space H_{j,k} of harmonics on S^{2m+1}."""

    j: int
    k: int

    def __post_init__(self):
        if int(self.j) != self.j or int(self.k) != self.k or self.j < 0 or self.k < 0:
            raise DomainError(f"spectral index must be nonnegative integers, got ({self.j}, {self.k})")

    @property
    def degree(self) -> int:
        return self.j + self.k

    def swapped(self) -> "SpectralIndex":
        return SpectralIndex(self.k, self.j)


def as_index(idx) -> SpectralIndex:
    if isinstance(idx, SpectralIndex):
        return idx
    j, k = idx
    return SpectralIndex(int(j), int(k))


# Bernoulli numbers B_2, B_4, ..., B_20
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
    Fraction(-174611, 330),
]

# Stirling tail coefficients B_{2k} / (2k (2k-1))
_STIRLING = [float(b / ((2 * k) * (2 * k - 1))) for k, b in enumerate(_BERNOULLI, start=1)]

_HALF_LOG_2PI = 0.91893853320467274178032973640561764


def _zeta_minus_one(s: int, n_direct: int = 12) -> float:
    """zeta(s) - 1 for integer s >= 2 via Euler-Maclaurin with cutoff n_direct."""
    N = n_direct
    total = 0.0
    for n in range(N - 1, 1, -1):
        total += float(n) ** (-s)
    tail = N ** (1 - s) / (s - 1) + 0.5 * N ** (-s)
    rising = float(s)  # s (s+1) ... (s+2j-2)
    fact = 2.0  # (2j)!
    for j, b in enumerate(_BERNOULLI, start=1):
        if j > 1:
            rising *= (s + 2 * j - 3) * (s + 2 * j - 2)
            fact *= (2 * j - 1) * (2 * j)
        tail += float(b) / fact * rising * N ** (-s - 2 * j + 1)
    return total + tail


_N_SERIES = 48
_ZETA_M1 = [0.0, 0.0] + [_zeta_minus_one(s) for s in range(2, _N_SERIES + 1)]


def _series_tail(z: float) -> float:
    # sum_{k>=2} (-1)^k (zeta(k)-1) z^k / k, Horner from the top
    acc = 0.0
    for k in range(_N_SERIES, 1, -1):
        acc = acc * (-z) + _ZETA_M1[k] / k
    return acc * z * z


def _lgamma_1pz(z: float) -> float:
    return -math.log1p(z) + z * (1.0 - EULER_GAMMA) + _series_tail(z)


def _lgamma_2pz(z: float) -> float:
    return z * (1.0 - EULER_GAMMA) + _series_tail(z)


def _lgamma_stirling(x: float) -> float:
    inv = 1.0 / x
    inv2 = inv * inv
    corr = 0.0
    for c in reversed(_STIRLING):
        corr = corr * inv2 + c
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + corr * inv


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for finite x > 0.

    Uses a zeta-series about 1 and 2 on [0.5, 2.5] (so the zeros of lnGamma
    at x = 1, 2 keep full relative accuracy), upward/downward recurrence to
    that window below 10, and the Stirling series from 10 on.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires finite x > 0, got {x!r}")
    if x >= 10.0:
        return _lgamma_stirling(x)
    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)
    if x < 1.5:
        return _lgamma_1pz(x - 1.0)
    if x < 2.5:
        return _lgamma_2pz(x - 2.0)
    n = int(math.floor(x - 1.5))
    y = x - n
    prod = 1.0
    for i in range(n):
        prod *= y + i
    return _lgamma_2pz(y - 2.0) + math.log(prod)


def _is_pole(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _log_abs_gamma(x: float) -> tuple[float, float]:
    """(log|Gamma(x)|, sign Gamma(x)) for x not a pole; reflection below 1/2."""
    if x >= 0.5:
        return log_gamma(x), 1.0
    n = round(x)
    s = math.sin(math.pi * (x - n))
    if n % 2:
        s = -s
    return math.log(math.pi) - math.log(abs(s)) - log_gamma(1.0 - x), math.copysign(1.0, s)


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b), allowing negative non-integer arguments."""
    a = float(a)
    b = float(b)
    for name, v in (("a", a), ("b", b)):
        if not math.isfinite(v):
            raise DomainError(f"gamma_ratio: argument {name}={v!r} is not finite")
        if _is_pole(v):
            raise DomainError(f"gamma_ratio: argument {name}={v!r} is a pole of Gamma")
    d = a - b
    if d == round(d) and abs(d) <= 64:
        # Pochhammer product, exact up to rounding of each factor
        n = int(round(d))
        prod = 1.0
        if n >= 0:
            for i in range(n):
                prod *= b + i
            return prod
        for i in range(-n):
            prod *= a + i
        return 1.0 / prod
    la, sa = _log_abs_gamma(a)
    lb, sb = _log_abs_gamma(b)
    return sa * sb * math.exp(la - lb)


def jacobi_p(n: int, a: float, b: float, x):
    """Jacobi polynomial P_n^{(a,b)}(x) by forward three-term recurrence.

    ``x`` may be a scalar or an array; the return type follows it.
    """
    if int(n) != n or n < 0:
        raise DomainError(f"jacobi_p: degree must be a nonnegative integer, got {n!r}")
    if a <= -1 or b <= -1:
        raise DomainError(f"jacobi_p: need a, b > -1, got a={a}, b={b}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise DomainError("jacobi_p: x must lie in [-1, 1]")
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0)
    ab = a + b
    for k in range(2, n + 1):
        c = 2 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b)
        a3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        p_prev, p = p, (a2 * p - a3 * p_prev) / a1
    return p if p.ndim else float(p)


def jacobi_p_at_one(n: int, a: float) -> float:
    """P_n^{(a,b)}(1) = binom(n + a, n), independent of b."""
    val = 1.0
    for i in range(1, n + 1):
        val *= (i + a) / i
    return val


def disc_poly(idx, m: int, w):
    """Disc polynomial R_{j,k}(w): the zonal function of H_{j,k} on S^{2m+1}.

    For j >= k this is w^{j-k} P_k^{(m-1, j-k)}(2|w|^2 - 1) / P_k^{(m-1, j-k)}(1);
    for j < k it is the complex conjugate of R_{k,j}(w). Normalized so R(1) = 1.
    """
    idx = as_index(idx)
    if int(m) != m or m < 1:
        raise DomainError(f"disc_poly: m must be a positive integer, got {m!r}")
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(w) > 1.0 + 1e-12):
        raise DomainError("disc_poly: |w| must not exceed 1")
    hi, lo = max(idx.j, idx.k), min(idx.j, idx.k)
    d = hi - lo
    r2 = np.minimum((w * w.conj()).real, 1.0)
    radial = jacobi_p(lo, m - 1.0, float(d), 2.0 * r2 - 1.0) / jacobi_p_at_one(lo, m - 1.0)
    base = w if idx.j >= idx.k else w.conj()
    val = base ** d * radial
    return complex(val) if val.ndim == 0 else val
