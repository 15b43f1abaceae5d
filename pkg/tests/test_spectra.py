import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crsharp.specfun import DomainError
from crsharp.spectra import (Family, KernelSpec, critical_exponent, eig_dist_kernel, eig_dist_kernel_weighted,
                             oracle_eig, positivity_scan, r2v_best_c, r2v_coefficients, r2v_mode_gap, re_kernel_eig,
                             real_eig, real_oracle_eig, self_integral, sharp_constant, sphere_area, sublaplacian_eig)

PI = math.pi
index = st.tuples(st.integers(0, 12), st.integers(0, 12))


def test_eig_examples():
    assert eig_dist_kernel(0.5, 1, (0, 0)) == pytest.approx(8 * PI, rel=1e-14)
    assert eig_dist_kernel(0.5, 1, (1, 0)) == pytest.approx(8 * PI / 3, rel=1e-14)
    assert eig_dist_kernel_weighted(0.5, 1, (0, 0), n_symbol=1) == pytest.approx(40 * PI / 9, rel=1e-14)
    assert eig_dist_kernel(-0.5, 1, (0, 0)) == pytest.approx(64 * PI / 9, rel=1e-14)
    assert re_kernel_eig(0.5, 1, (0, 0)) == pytest.approx(8 * PI / 3, rel=1e-14)


def test_e00_against_mpmath_quadrature():
    # independent of the disc-polynomial machinery: plain polar integral of |1-w|^{-2 alpha} over the disc
    with mpmath.workdps(20):
        for alpha in (0.25, 0.75):
            f = lambda r, th: r * abs(1 - r * mpmath.expj(th)) ** (-2 * alpha)
            ref = float(4 * mpmath.pi * mpmath.quad(f, [0, 1], [0, mpmath.pi / 8, mpmath.pi]))
            assert eig_dist_kernel(alpha, 1, (0, 0)) == pytest.approx(ref, rel=1e-9)


@given(index, st.floats(0.05, 1.9), st.integers(1, 3))
def test_eigs_symmetric_in_j_k(idx, lam, m):
    a = lam / 4
    j, k = idx
    assert eig_dist_kernel(a, m, (j, k)) == pytest.approx(eig_dist_kernel(a, m, (k, j)), rel=1e-14)
    assert re_kernel_eig(a, m, (j, k)) == pytest.approx(re_kernel_eig(a, m, (k, j)), rel=1e-12)


def test_weighted_factor_at_alpha_one():
    # the (alpha - 1) prefactor kills the correction when j, k >= 1; for jk = 0 it meets a Gamma pole
    for m in (2, 3):
        for idx in [(2, 1), (3, 3), (1, 4)]:
            for a in (1.0 - 1e-9, 1.0):
                ratio = eig_dist_kernel_weighted(a, m, idx) / eig_dist_kernel(a, m, idx)
                assert ratio == pytest.approx(1.0, abs=1e-7)
        kern = lambda w: np.abs(w) ** 2 * np.abs(1 - w) ** -2.0
        ref = oracle_eig(kern, m, (0, 0), 4, 2.0) / eig_dist_kernel(1.0, m, (0, 0))
        assert ref == pytest.approx(1.0 / m, rel=1e-10)
        assert eig_dist_kernel_weighted(1.0, m, (0, 0)) / eig_dist_kernel(1.0, m, (0, 0)) == pytest.approx(ref)


@pytest.mark.parametrize("m, lam, idx", [(1, 1.0, (3, 1)), (1, 3.0, (0, 4)), (2, 2.0, (2, 2)), (2, 4.0, (5, 0)),
                                         (3, 5.5, (1, 2))])
def test_closed_forms_match_oracle(m, lam, idx):
    a, s = lam / 4, lam / 2
    kernels = {
        "E": (lambda w: np.abs(1 - w) ** -s, eig_dist_kernel(a, m, idx)),
        "Ew": (lambda w: np.abs(w) ** 2 * np.abs(1 - w) ** -s, eig_dist_kernel_weighted(a, m, idx)),
        "F": (lambda w: np.real(w) * np.abs(1 - w) ** -s, re_kernel_eig(a, m, idx)),
    }
    for kern, closed in kernels.values():
        assert oracle_eig(kern, m, idx, 4, s) == pytest.approx(closed, rel=1e-6)


def test_oracle_examples():
    one = lambda w: np.ones_like(w, dtype=float)
    assert oracle_eig(one, 1, (0, 0)) == pytest.approx(2 * PI ** 2, rel=1e-12)
    assert abs(oracle_eig(one, 1, (1, 1))) <= 1e-10
    assert oracle_eig(lambda w: np.abs(1 - w) ** -1.0, 1, (0, 0), 4, 1.0) == pytest.approx(8 * PI, rel=1e-6)
    with pytest.raises(DomainError):
        oracle_eig(one, 1, (0, 0), refinement=0)


def test_n_symbol_plus_one_disagrees_with_oracle():
    kern = lambda w: np.abs(w) ** 2 * np.abs(1 - w) ** -1.0
    ref = oracle_eig(kern, 2, (2, 1), 4, 1.0)
    assert eig_dist_kernel_weighted(0.5, 2, (2, 1)) == pytest.approx(ref, rel=1e-8)
    assert abs(eig_dist_kernel_weighted(0.5, 2, (2, 1), n_symbol=3) - ref) > 1e-3 * ref


@pytest.mark.parametrize("m", [1, 2, 3])
def test_r2v_equality_case(m):
    Q = 2 * m + 2
    for lam in np.linspace(0, Q, 22)[1:-1]:
        spec = KernelSpec.cr(m, lam)
        a, _ = r2v_coefficients(spec)
        E = eig_dist_kernel(lam / 4, m, (0, 0))
        assert abs(re_kernel_eig(lam / 4, m, (0, 0)) - a * E) <= 1e-12 * E
        assert r2v_mode_gap(spec, (0, 0)) == pytest.approx(0.0, abs=1e-12)
        assert r2v_best_c(spec, 30) > 0


@pytest.mark.parametrize("lam", [1.0, 2.0, 3.0])
def test_r2v_cutoff_stable(lam):
    spec = KernelSpec.cr(1, lam)
    assert abs(r2v_best_c(spec, 30) - r2v_best_c(spec, 60)) <= 1e-10


def test_sublaplacian():
    assert sublaplacian_eig(3, (0, 0)) == pytest.approx(9 / 4)
    assert sublaplacian_eig(1, (1, 0)) == pytest.approx(3 / 4)
    for m in (1, 2, 3):
        prods = [sublaplacian_eig(m, (j, d - j)) * eig_dist_kernel(m / 2, m, (j, d - j))
                 for d in range(11) for j in range(d + 1)]
        assert np.ptp(prods) <= 1e-10 * prods[0]


def test_sharp_constant_examples():
    assert sharp_constant(KernelSpec.cr(1, 2.0)) == pytest.approx(4 * math.sqrt(2), rel=1e-14)
    assert sharp_constant(KernelSpec.real(2, 1.0)) == pytest.approx(2 * math.sqrt(PI), rel=1e-14)


@pytest.mark.parametrize("m", [1, 2])
def test_sharp_constant_identity(m):
    Q = 2 * m + 2
    area = 2 * PI ** (m + 1) / math.factorial(m)
    assert sphere_area(Family.CR, m) == pytest.approx(area, rel=1e-15)
    for lam in np.linspace(0, Q, 12)[1:-1]:
        spec = KernelSpec.cr(m, lam)
        expected = eig_dist_kernel(lam / 4, m, (0, 0)) * area ** ((lam - Q) / Q)
        assert abs(sharp_constant(spec) - expected) <= 1e-12 * expected


def test_critical_exponent():
    assert critical_exponent(KernelSpec.cr(1, 2.0)) == pytest.approx(4 / 3)
    assert critical_exponent(KernelSpec.real(2, 1.0)) == pytest.approx(4 / 3)


def test_positivity_scan():
    assert positivity_scan(KernelSpec.cr(1, 2.0), 50)
    assert positivity_scan(KernelSpec.cr(2, 5.9), 50)
    with pytest.raises(DomainError):
        positivity_scan(KernelSpec.real(2, 1.0))


def test_monotone_in_j():
    for m, lam in [(1, 2.0), (2, 1.0), (3, 7.0)]:
        for k in (0, 2, 5):
            vals = [eig_dist_kernel(lam / 4, m, (j, k)) for j in range(21)]
            assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("bad", [(1, 0.0), (1, 4.0), (2, 6.5)])
def test_kernel_spec_rejects_lambda(bad):
    with pytest.raises(DomainError):
        KernelSpec.cr(*bad)
    with pytest.raises(DomainError):
        KernelSpec.real(2, 2.0)


def test_real_sphere_eigs_against_mpmath():
    spec = KernelSpec.real(2, 1.0)
    # Funk-Hecke on S^2: 2 pi int_{-1}^{1} (2 - 2t)^{-1/2} P_l(t) dt, with t = 1 - u^2
    for l in range(4):
        ref = float(2 * mpmath.pi * mpmath.quad(lambda u: mpmath.sqrt(2) * mpmath.legendre(l, 1 - u * u),
                                                 [0, mpmath.sqrt(2)]))
        assert real_eig(spec, l) == pytest.approx(ref, rel=1e-12)
    assert self_integral(spec) == pytest.approx(4 * PI, rel=1e-13)
    assert real_oracle_eig(lambda t: np.ones_like(t), 1, 0) == pytest.approx(2 * PI)


@given(st.integers(1, 3), st.floats(0.05, 0.95), index)
def test_mode_gap_matches_gamma_route(m, frac, idx):
    lam = frac * (2 * m + 2)
    spec = KernelSpec.cr(m, lam)
    a, b = r2v_coefficients(spec)
    direct = (re_kernel_eig(lam / 4, m, idx) / eig_dist_kernel(lam / 4, m, idx) - a) / b
    assert r2v_mode_gap(spec, idx) == pytest.approx(direct, abs=1e-11, rel=1e-11)
