import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from crsharp.specfun import DomainError, SpectralIndex, disc_poly, gamma_ratio, jacobi_p, log_gamma
from crsharp.spectra import oracle_eig


@pytest.mark.parametrize("x, expected", [(1.0, 0.0), (0.5, math.log(math.sqrt(math.pi))), (5.0, math.log(24.0))])
def test_log_gamma_known_values(x, expected):
    assert log_gamma(x) == pytest.approx(expected, abs=1e-15, rel=1e-14)


@given(st.floats(min_value=1e-6, max_value=300.0))
def test_log_gamma_matches_mpmath(x):
    ref = float(mpmath.loggamma(x))
    assert abs(log_gamma(x) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_log_gamma_near_its_zeros():
    for x in (1.0 + 1e-9, 2.0 - 1e-9, 0.999):
        ref = float(mpmath.loggamma(x))
        assert log_gamma(x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("inf"), float("nan")])
def test_log_gamma_rejects(bad):
    with pytest.raises(DomainError):
        log_gamma(bad)


@pytest.mark.parametrize("a, b, expected", [(0.5, 1.5, 2.0), (3.0, 1.0, 2.0), (-0.5, 2.5, -8.0 / 3.0)])
def test_gamma_ratio_examples(a, b, expected):
    assert gamma_ratio(a, b) == pytest.approx(expected, rel=1e-14)


@given(st.floats(min_value=-5.0, max_value=5.0))
def test_gamma_ratio_shift(a):
    assume(min(abs(a - round(a)), abs(a + 1 - round(a + 1))) > 1e-6 or a > 0)
    assume(abs(a) > 1e-6)
    assert gamma_ratio(a + 1.0, a) == pytest.approx(a, rel=1e-13)


@given(st.floats(min_value=-6.5, max_value=8.0), st.floats(min_value=-6.5, max_value=8.0))
def test_gamma_ratio_matches_mpmath(a, b):
    for v in (a, b):
        assume(v > 0 or abs(v - round(v)) > 1e-3)
    ref = float(mpmath.gamma(a) / mpmath.gamma(b))
    assert gamma_ratio(a, b) == pytest.approx(ref, rel=1e-12)


def test_gamma_ratio_poles():
    with pytest.raises(DomainError):
        gamma_ratio(-2.0, 1.0)


def test_jacobi_examples():
    assert jacobi_p(0, 0.3, 2.0, -0.7) == 1.0
    assert jacobi_p(1, 0.0, 0.0, 0.3) == pytest.approx(0.3)
    # (a + b + 2) x / 2 + (a - b) / 2 at a=0, b=1, x=1
    assert jacobi_p(1, 0.0, 1.0, 1.0) == pytest.approx(1.0, rel=1e-15)
    assert jacobi_p(1, 0.0, 1.0, 0.5) == pytest.approx(0.25, rel=1e-15)


def _jacobi_ref(n, a, b, x):
    with mpmath.workdps(40):
        x = mpmath.mpf(x)
        return float(sum(mpmath.binomial(n + a, n - s) * mpmath.binomial(n + b, s)
                         * ((x - 1) / 2) ** s * ((x + 1) / 2) ** (n - s) for s in range(n + 1)))


@given(st.integers(0, 25), st.floats(-0.9, 4.0), st.floats(-0.9, 4.0), st.floats(-1.0, 1.0))
def test_jacobi_matches_mpmath(n, a, b, x):
    ref = _jacobi_ref(n, a, b, x)
    scale = _jacobi_ref(n, a, b, 1.0) + abs(_jacobi_ref(n, b, a, 1.0))
    assert abs(jacobi_p(n, a, b, x) - ref) <= 1e-12 * scale


@given(st.integers(2, 20), st.floats(-0.9, 3.0), st.floats(-0.9, 3.0), st.floats(-1.0, 1.0))
def test_jacobi_three_term_recurrence(n, a, b, x):
    c = 2 * n + a + b
    lhs = 2 * n * (n + a + b) * (c - 2) * jacobi_p(n, a, b, x)
    rhs = (c - 1) * (c * (c - 2) * x + a * a - b * b) * jacobi_p(n - 1, a, b, x) \
        - 2 * (n + a - 1) * (n + b - 1) * c * jacobi_p(n - 2, a, b, x)
    scale = abs(2 * n * (n + a + b) * (c - 2)) * (_jacobi_ref(n, a, b, 1.0) + abs(_jacobi_ref(n, b, a, 1.0)))
    assert abs(lhs - rhs) <= 1e-12 * scale


def test_disc_poly_examples():
    w = 0.3 + 0.4j
    assert disc_poly((0, 0), 2, w) == 1.0
    assert disc_poly((1, 0), 3, w) == pytest.approx(w)
    assert disc_poly((1, 1), 1, w) == pytest.approx(2 * abs(w) ** 2 - 1)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_disc_poly_normalized_at_one(m):
    for d in range(21):
        for j in range(d + 1):
            assert abs(disc_poly((j, d - j), m, 1.0) - 1.0) <= 1e-12


def test_disc_poly_conjugation():
    rng = np.random.default_rng(3)
    r = np.sqrt(rng.uniform(size=100))
    w = r * np.exp(2j * np.pi * rng.uniform(size=100))
    for idx in [(2, 1), (0, 3), (4, 4), (5, 2)]:
        for m in (1, 2):
            assert np.max(np.abs(disc_poly(idx, m, np.conj(w)) - np.conj(disc_poly(idx, m, w)))) <= 1e-13
            swapped = disc_poly(idx[::-1], m, w)
            assert np.max(np.abs(swapped - np.conj(disc_poly(idx, m, w)))) <= 1e-13


def test_disc_poly_orthogonal_on_s3():
    idxs = [(j, d - j) for d in range(7) for j in range(d + 1)]
    for a in idxs:
        for b in idxs:
            if a == b:
                continue
            val = oracle_eig(lambda w, a=a: disc_poly(a, 1, np.where(np.abs(w) > 1, w / np.abs(w), w)), 1, b)
            assert abs(val) <= 1e-8


def test_spectral_index_validation():
    with pytest.raises(DomainError):
        SpectralIndex(-1, 0)
    assert SpectralIndex(2, 1).swapped() == SpectralIndex(1, 2)
    assert SpectralIndex(2, 3).degree == 5
