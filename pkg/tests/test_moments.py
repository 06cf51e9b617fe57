import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ra_bergman.exceptions import EvaluationError, InvalidCurveError, InvalidParameterError, NotAMemberError
from ra_bergman.generator import triple_lattice
from ra_bergman.moments import (
    FunctionHandle,
    TransverseCurve,
    circle_moments,
    cr_lift,
    holder_constant,
    holo_extension,
    leaf_point,
    membership_test,
    moment_functional,
    named_function,
    slice_ratio,
    transverse_curve_ratio,
)
from ra_bergman.quadrature import Annulus, norm_p

coef = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


@given(st.lists(coef, min_size=9, max_size=9), st.floats(0.3, 3.0), coef)
def test_moments_exact_on_laurent_polynomials(cs, r, a):
    # f(a + r e^{it}) = sum_k c_k e^{ikt} for f(z) = sum_k c_k ((z - a)/r)^k
    f = FunctionHandle(lambda z: sum(c * ((z - a) / r) ** (k - 4) for k, c in enumerate(cs)))
    spec = circle_moments(f, a, r)
    got = np.array([spec.c(k - 4) for k in range(9)])
    assert np.max(np.abs(got - np.array(cs))) < 1e-12 * (1 + max(map(abs, cs))) * 10


@given(coef, st.floats(0.2, 4.0))
def test_zbar_oracle(a, r):
    spec = circle_moments(named_function("zbar"), a, r)
    assert abs(spec.c(-1) - r) < 1e-12 * (1 + r)
    assert abs(spec.c(0) - np.conj(a)) < 1e-12 * (1 + abs(a))
    assert not spec.is_member()


def test_membership_on_lattice(g):
    X = triple_lattice(math.pi, 4)
    rep = membership_test(named_function("zbar_g", g), X, [0.5, 1.0, 2.0])
    assert rep.passed and rep.worst < 1e-12
    assert not membership_test(named_function("zbar"), X, [1.0]).passed
    assert membership_test(named_function("z^3"), X, [1.0]).passed
    assert rep.to_csv().splitlines()[0] == "center_re,center_im,radius,max_neg_coeff,sup_norm,verdict"


def test_zbar_g_fails_off_lattice(g):
    spec = circle_moments(named_function("zbar_g", g), 0.7 + 0.2j, 0.5)
    assert spec.relative_negative_mass > 1e-3


def test_holo_extension_oracle(g):
    # on |z| = r, zbar g = r^2 g(z)/z, which is holomorphic because g(0) = 0
    r = 1.3
    spec = circle_moments(named_function("zbar_g", g), 0, r)
    z = np.array([0.2 + 0.1j, -0.5j, 0.9])
    assert np.max(np.abs(holo_extension(spec, z) - r**2 * g(z) / z)) < 1e-12


def test_holo_extension_refuses_non_member():
    spec = circle_moments(named_function("zbar"), 0, 1.0)
    with pytest.raises(NotAMemberError) as info:
        holo_extension(spec, 0.1)
    assert info.value.mass > 0.5


def test_cr_lift_oracle(g):
    # on the leaf w = t/z the lift of zbar g is w g(z) = t g(z)/z
    t = 0.8
    z = np.array([0.3 + 0.2j, -0.4, 0.1j])
    assert np.max(np.abs(cr_lift(named_function("zbar_g", g), 0, t, z) - t * g(z) / z)) < 1e-12
    _, w = leaf_point(0, t, z[0])
    assert abs(w - t / z[0]) < 1e-15


def test_slice_ratio_holomorphic_is_one():
    assert abs(slice_ratio(named_function("z^2"), 0.0, 1.0, 1.0) - 1.0) < 1e-9


def test_lp_norm_of_constant():
    spec = circle_moments(named_function("one"), 0.3, 2.0)
    for p in (1, 2, 3.5):
        assert abs(spec.lp_norm(p) - 1.0) < 1e-14


def test_transverse_ratio_for_constant():
    curve = TransverseCurve.radial(1.0, 0.5)
    p = 3.0
    expected = 0.5 / norm_p(named_function("one"), Annulus(0j, 1.0, 1.5), None, p)
    assert abs(transverse_curve_ratio(named_function("one"), 0, curve, p) - expected) < 1e-9 * expected


def test_transverse_curve_validation():
    bad = TransverseCurve(0.5, lambda t: 1.0 + 0 * t, lambda t: (1.0 - 0.01 * t) + 0j, 0.4)
    with pytest.raises(InvalidCurveError):
        bad.validate()
    with pytest.raises(InvalidParameterError):
        TransverseCurve(0.5, lambda t: t, lambda t: t, 1.5)


def test_moment_functional_oracle_and_holder_bound():
    r1, r2, p = 0.5, 1.5, 3.0
    val = moment_functional(named_function("zbar"), 0, 1, r1, r2)
    assert abs(val - (r2**3 - r1**3) / 3) < 1e-12
    bound = holder_constant(r1, r2, p) * norm_p(named_function("zbar"), Annulus(0j, r1, r2), None, p)
    assert abs(val) <= bound


def test_parameter_validation():
    with pytest.raises(InvalidParameterError):
        circle_moments(named_function("one"), 0, -1.0)
    with pytest.raises(InvalidParameterError):
        circle_moments(named_function("one"), 0, 1.0, n_theta=64, n_f=32)
    with pytest.raises(InvalidParameterError):
        named_function("sin")
    with pytest.raises(InvalidParameterError):
        named_function("zbar_g")


def test_non_finite_evaluator_reports_index():
    f = FunctionHandle(lambda z: np.where(np.abs(z.imag) < 1e-9, np.nan, 1.0))
    with pytest.raises(EvaluationError) as info:
        circle_moments(f, 0, 1.0)
    assert info.value.index == 0


def test_moment_values_converge_along_lp_sequences(g):
    # f_n = conj(z) g + conj(z)/n -> conj(z) g in L^p(annulus); the moment values at a
    # lattice point converge, with the Hoelder bound controlling the distance.
    r1, r2, p = 0.5, 1.5, 3.0
    zbar = named_function("zbar")
    limit = moment_functional(named_function("zbar_g", g), 0, 1, r1, r2)
    assert abs(limit) < 1e-13
    C = holder_constant(r1, r2, p)
    for n in (1, 10, 100):
        fn = FunctionHandle(lambda z, n=n: np.conj(z) * g(z) + np.conj(z) / n)
        gap = abs(moment_functional(fn, 0, 1, r1, r2) - limit)
        assert gap <= C * norm_p(zbar, Annulus(0j, r1, r2), None, p) / n * (1 + 1e-12)
        assert abs(gap - (r2**3 - r1**3) / 3 / n) < 1e-12
