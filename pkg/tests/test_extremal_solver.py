import functools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crsharp import extremal_solver as es
from crsharp.discretize import DensityField, integrate
from crsharp.specfun import DomainError, disc_poly
from crsharp.spectra import KernelSpec

from conftest import cached_hopf, cached_s2

PI = math.pi
CR12 = KernelSpec.cr(1, 2.0)


@functools.lru_cache(maxsize=None)
def solved(init="perturbed", p=1.5, seed=0):
    rule = cached_hopf(24, 24)
    return es.solve(CR12, rule, es.SolverConfig(p, init=init, seed=seed))


def test_functional_examples(rule24):
    one = DensityField.constant(rule24)
    assert es.functional(CR12, one, 4 / 3) == pytest.approx(4 * math.sqrt(2), rel=1e-12)
    assert es.functional(CR12, one, 1.5) == pytest.approx(8 * PI * (2 * PI ** 2) ** (1 - 2 / 1.5), rel=1e-12)


@given(st.floats(0.1, 10.0) | st.floats(-10.0, -0.1))
def test_functional_scale_invariant(c):
    rule = cached_hopf(24, 24)
    f = DensityField.from_function(rule, lambda x: 1.2 + np.real(x[:, 1]))
    assert es.functional(CR12, f.with_values(c * f.values), 1.5) == pytest.approx(es.functional(CR12, f, 1.5),
                                                                                    rel=1e-12)


@pytest.mark.parametrize("p", [1.34, 1.5, 2.0, 3.0])
def test_constant_is_a_fixed_point(p, rule24):
    u, rep = es.solve(CR12, rule24, es.SolverConfig(p, init="constant"))
    assert rep.converged and rep.iterations == 1
    assert np.allclose(u.values, (2 * PI ** 2) ** (-1 / p), rtol=1e-13)
    assert rep.lambda_p_hat == pytest.approx(es.functional(CR12, DensityField.constant(rule24), p), rel=1e-13)


@pytest.mark.parametrize("init", ["perturbed", "random"])
def test_solve_converges(init):
    u, rep = solved(init)
    assert rep.converged and rep.residual <= 1e-8
    assert rep.moment_norm <= 1e-6
    assert np.all(u.values >= 0)
    assert all(b >= a - 1e-10 for a, b in zip(rep.functional_trace, rep.functional_trace[1:]))
    assert rep.lambda_p_hat >= es.functional(CR12, DensityField.constant(u.rule), 1.5) - 1e-12
    assert es.functional(CR12, u, 1.5) == pytest.approx(rep.lambda_p_hat, rel=1e-12)


def test_subcritical_precondition(rule24):
    with pytest.raises(DomainError):
        es.solve(CR12, rule24, es.SolverConfig(1.3))
    with pytest.raises(DomainError):
        es.SolverConfig(1.5, init="zero")


def test_parse_init():
    cfg = es.SolverConfig.parse_init("perturbed:0.2", p=1.5)
    assert (cfg.init, cfg.amplitude) == ("perturbed", 0.2)
    assert es.SolverConfig.parse_init("random:7", p=1.5).seed == 7


def test_moment_examples(rule24):
    assert np.max(np.abs(es.moment(np.full(len(rule24), 2.0), 1.5, rule24))) <= 1e-13
    u = 1.0 + np.real(rule24.points[:, 0])
    M = es.moment(u, 2.0, rule24)
    assert M[0] == pytest.approx(PI ** 2, rel=1e-12)
    assert abs(M[1]) <= 1e-13


def test_second_variation():
    u, _ = solved()
    X = u.rule.points
    assert es.second_variation_check(CR12, u, 1.5, u.values)
    for i in range(2):
        for part in (np.real, np.imag):
            assert es.second_variation_check(CR12, u, 1.5, u.values * part(X[:, i]))
    rng = np.random.default_rng(5)
    for _ in range(100):
        c = rng.normal(size=6)
        f = c[0] + c[1] * np.real(X[:, 0]) + c[2] * np.imag(X[:, 1]) + c[3] * np.abs(X[:, 0]) ** 2 \
            + c[4] * np.real(X[:, 0] * X[:, 1]) + c[5] * np.imag(X[:, 0] ** 2)
        assert es.second_variation_check(CR12, u, 1.5, f)


def test_second_variation_threshold_at_constant():
    # at u = const the (1,0) mode gives E_10 <= (p - 1) E_00, i.e. p >= 4/3
    rule = cached_hopf(24, 24)
    one = DensityField.constant(rule)
    f = np.real(rule.points[:, 0])
    assert es.second_variation_check(CR12, one, 1.5, f)
    assert not es.second_variation_check(CR12, one, 1.2, f)


def test_r2v_pointcheck(rule24):
    one = DensityField.constant(rule24)
    lhs, rhs = es.r2v_pointcheck(CR12, one)
    assert lhs == pytest.approx(rhs, rel=1e-12)
    bumped = one.with_values(1.0 + 0.1 * np.real(disc_poly((1, 0), 1, rule24.points @ np.array([1.0, 0.0]))))
    lhs, rhs = es.r2v_pointcheck(CR12, bumped)
    assert lhs > rhs
    u, _ = solved()
    lhs, rhs = es.r2v_pointcheck(CR12, u)
    assert lhs >= rhs - 1e-12 * abs(rhs)


def test_offset_schedule():
    ps = es.offset_schedule(4 / 3, 0.01, 6)
    assert np.allclose(np.array(ps) - 4 / 3, [0.32, 0.16, 0.08, 0.04, 0.02, 0.01])


def test_continuation_init_independence(rule24):
    ps = es.offset_schedule(4 / 3, 0.04, 3)
    a = es.continuation(CR12, rule24, ps, es.SolverConfig(ps[0], init="perturbed"))
    b = es.continuation(CR12, rule24, ps, es.SolverConfig(ps[0], init="random", seed=3))
    for ra, rb in zip(a, b):
        assert ra.lambda_p_hat == pytest.approx(rb.lambda_p_hat, rel=1e-6)
    csv_text = es.continuation_csv(a)
    assert csv_text.splitlines()[0] == ",".join(es.CONTINUATION_COLUMNS)
    assert len(csv_text.splitlines()) == 4
    with pytest.raises(DomainError):
        es.continuation(CR12, rule24, ps[::-1], es.SolverConfig(ps[0]))


def test_pair_collapse(rule24):
    cfg = es.SolverConfig(1.5, init="perturbed", amplitude=0.3)
    assert es.pair_collapse(CR12, rule24, 1.5, cfg) <= 1e-6
    f0 = 1.0 + 0.2 * np.real(rule24.points[:, 1])
    assert es.pair_collapse(CR12, rule24, 1.5, cfg, f0=f0, g0=f0) <= 1e-6


def test_pair_collapse_real_sphere():
    rule = cached_s2(24, 48)
    spec = KernelSpec.real(2, 1.0)
    assert es.pair_collapse(spec, rule, 1.5, es.SolverConfig(1.5)) <= 1e-6


def test_report_json_roundtrip():
    _, rep = solved()
    d = json.loads(rep.to_json())
    assert d["iterations"] == rep.iterations and d["converged"] is True


def test_real_sphere_constant_functional():
    rule = cached_s2(24, 48)
    spec = KernelSpec.real(2, 1.0)
    val = es.functional(spec, DensityField.constant(rule), spec.p_crit)
    assert val == pytest.approx(2 * math.sqrt(PI), rel=1e-6)
    u, rep = es.solve(spec, rule, es.SolverConfig(1.5))
    assert rep.converged and rep.moment_norm <= 1e-6
    assert integrate(u.values, rule) > 0
