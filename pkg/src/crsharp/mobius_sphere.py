"""CR automorphisms Phi_{t,eta} of S^{2m+1}, their conformal factors, and flow identities.

Phi_{t,eta}(xi) = (xi - w eta) / (cosh t + w sinh t) + (sinh t + w cosh t) / (cosh t + w sinh t) eta,
with w = xi.conj(eta); the contact form pulls back to phi_{t,eta} = |cosh t + w sinh t|^{-2}
times itself. All array routines take points as rows of an (N, m+1) complex array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .discretize import DensityField, QuadratureRule, integrate
from .heisenberg import SpherePoint
from .specfun import DomainError
from .spectra import Family

__all__ = [
    "MobiusParams",
    "flow",
    "flow_factor",
    "phi_map",
    "conformal_factor",
    "fundamental_identity_residual",
    "pushforward",
    "psi_eta",
    "t_psi_eta",
    "kw_flow_identity_residual",
    "flow_group_residual",
    "cocycle_residual",
    "inverse_factor_residual",
    "measure_transport_residual",
]


def _point(x) -> np.ndarray:
    return x.zeta if isinstance(x, SpherePoint) else np.asarray(x, dtype=complex)


@dataclass(frozen=True, eq=False)
class MobiusParams:
    """Flow time t >= 0 and unit direction eta of Phi_{t,eta}."""

    t: float
    eta: SpherePoint

    def __post_init__(self):
        if not math.isfinite(self.t) or self.t < 0:
            raise DomainError(f"flow parameter must be finite and >= 0, got {self.t!r}")
        eta = self.eta if isinstance(self.eta, SpherePoint) else SpherePoint(self.eta)
        object.__setattr__(self, "eta", eta)

    def reversed(self) -> "MobiusParams":
        """Parameters of the inverse map: Phi_{t,eta}^{-1} = Phi_{t,-eta}."""
        return MobiusParams(self.t, SpherePoint(-self.eta.zeta))


def flow(t: float, eta, xi) -> np.ndarray:
    """Phi_{t,eta} applied to the rows of ``xi``; any real t (Phi_{-t,eta} = Phi_{t,-eta})."""
    eta = _point(eta)
    X = np.atleast_2d(np.asarray(xi, dtype=complex))
    w = X @ np.conj(eta)
    ch, sh = math.cosh(t), math.sinh(t)
    den = ch + sh * w
    out = (X - w[:, None] * eta[None, :]) / den[:, None] + ((sh + ch * w) / den)[:, None] * eta[None, :]
    return out.reshape(np.shape(xi)) if np.ndim(xi) == 1 else out


def flow_factor(t: float, eta, xi) -> np.ndarray:
    """phi_{t,eta} = |cosh t + sinh t xi.conj(eta)|^{-2} on the rows of ``xi``."""
    eta = _point(eta)
    w = np.asarray(xi, dtype=complex) @ np.conj(eta)
    return np.abs(math.cosh(t) + math.sinh(t) * w) ** -2


def phi_map(p: MobiusParams, xi) -> SpherePoint:
    out = flow(p.t, p.eta, _point(xi))
    return SpherePoint(out / np.linalg.norm(out))


def conformal_factor(p: MobiusParams, xi) -> float:
    return float(flow_factor(p.t, p.eta, _point(xi)))


def fundamental_identity_residual(p: MobiusParams, xi, zeta) -> float:
    """| |1 - Phi(xi).conj(Phi(zeta))|^2 - |1 - xi.conj(zeta)|^2 phi(xi) phi(zeta) |."""
    a, b = _point(xi), _point(zeta)
    fa, fb = flow(p.t, p.eta, a), flow(p.t, p.eta, b)
    lhs = abs(1.0 - np.dot(fa, np.conj(fb))) ** 2
    rhs = abs(1.0 - np.dot(a, np.conj(b))) ** 2 * conformal_factor(p, a) * conformal_factor(p, b)
    return abs(lhs - rhs)


def pushforward(p: MobiusParams, f: DensityField, exponent_power: float) -> DensityField:
    """f_{t,eta} = f o Phi_{t,eta} * phi_{t,eta}^power, sampled on f's rule.

    Needs a closed-form evaluator: composing with Phi leaves the grid, and
    grid-only fields are not interpolated.
    """
    if f.evaluator is None:
        raise DomainError("pushforward needs a field with a closed-form evaluator")
    fn = f.evaluator
    t, eta = p.t, p.eta.zeta

    def moved(x):
        x = np.asarray(x, dtype=complex)
        return fn(flow(t, eta, x)) * flow_factor(t, eta, x) ** exponent_power

    return DensityField.from_function(f.rule, moved)


def psi_eta(eta, xi):
    """psi_eta(xi) = Re(xi.conj(eta)); ``xi`` may be a point or rows of points."""
    return np.real(np.asarray(_point(xi)) @ np.conj(_point(eta)))


def t_psi_eta(eta, xi):
    """Derivative of psi_eta along the Reeb flow e^{is} xi: -Im(xi.conj(eta))."""
    return -np.imag(np.asarray(_point(xi)) @ np.conj(_point(eta)))


def _weighted_flow_integral(t, eta, a, weight, X, w_rule):
    # int psi_a o Phi_{t,eta}^{-1} * weight d sigma, with Phi^{-1}_t = Phi_{-t}
    return float(np.sum(w_rule * psi_eta(a, flow(-t, eta, X)) * weight))


def kw_flow_identity_residual(eta, a, f, rule: QuadratureRule, h: float = 1e-3) -> float:
    """Residual of the flow-derivative identity behind the Kazdan-Warner relation.

    With K = psi_a, q = 2(m+1)/m and X = d/dt Phi_{t,eta} at t = 0,

        d/dt|_0 int K o Phi_{t,eta}^{-1} f^q d sigma = -int [<grad K, grad psi_eta> + TK T psi_eta] f^q d sigma,

    because d/dt K(Phi_t^{-1}(xi)) = -dK(X) and X = grad psi_eta + (T psi_eta) T.
    The derivative is a five-point central difference with step h on the
    rule's nodes and the right side is the same rule's sum, so the residual
    |LHS + integral| measures the O(h^4) difference error only.
    """
    if rule.family is not Family.CR:
        raise DomainError("the flow identity lives on the CR sphere")
    eta, a = _point(eta), _point(a)
    vals = f.values if isinstance(f, DensityField) else np.asarray(f)
    if np.iscomplexobj(vals) or np.any(vals <= 0):
        raise DomainError("kw_flow_identity_residual needs a strictly positive real f")
    m = rule.dim
    q = 2.0 * (m + 1) / m
    X = rule.points
    w = rule.weights
    weight = vals ** q
    G = lambda t: _weighted_flow_integral(t, eta, a, weight, X, w)
    lhs = (-G(2 * h) + 8 * G(h) - 8 * G(-h) + G(-2 * h)) / (12 * h)
    re = lambda x, y: np.real(x @ np.conj(y))
    grad = re(a, eta) - re(X, a) * re(X, eta)
    reeb = t_psi_eta(a, X) * t_psi_eta(eta, X)
    rhs = float(np.sum(w * (grad + reeb) * weight))
    return abs(lhs + rhs)


def flow_group_residual(s: float, t: float, eta, xi) -> float:
    """max |Phi_s(Phi_t(xi)) - Phi_{s+t}(xi)| over the rows of xi."""
    return float(np.max(np.abs(flow(s, eta, flow(t, eta, xi)) - flow(s + t, eta, xi))))


def cocycle_residual(s: float, t: float, eta, xi) -> float:
    """max |phi_{s+t}(xi) - phi_s(xi) phi_t(Phi_s(xi))|."""
    lhs = flow_factor(s + t, eta, xi)
    rhs = flow_factor(s, eta, xi) * flow_factor(t, eta, flow(s, eta, xi))
    return float(np.max(np.abs(lhs - rhs) / rhs))


def inverse_factor_residual(t: float, eta, zeta) -> float:
    """max |phi_{t,eta}(Phi_{t,eta}^{-1}(zeta)) - 1/phi_{t,-eta}(zeta)|, relative."""
    eta = _point(eta)
    lhs = flow_factor(t, eta, flow(-t, eta, zeta))
    rhs = 1.0 / flow_factor(t, -eta, zeta)
    return float(np.max(np.abs(lhs - rhs) / rhs))


def measure_transport_residual(p: MobiusParams, g, rule: QuadratureRule) -> float:
    """|int g o Phi phi^{m+1} d sigma - int g d sigma| on ``rule`` for a callable g."""
    X = rule.points
    moved = g(flow(p.t, p.eta.zeta, X)) * flow_factor(p.t, p.eta.zeta, X) ** (rule.dim + 1)
    return float(abs(integrate(moved, rule) - integrate(g(X), rule)))
