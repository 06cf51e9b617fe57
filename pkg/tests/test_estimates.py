import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ra_bergman.exceptions import InvalidParameterError, NotAMemberError
from ra_bergman.estimates import annulus_bound_ratio, fit_order, growth_profile, hardy_growth_check
from ra_bergman.generator import ZeroSet
from ra_bergman.moments import FunctionHandle, circle_moments, named_function

PENTAGON = ZeroSet(0.5 * np.exp(2j * math.pi * np.arange(5) / 5))


def test_hardy_growth_constant_function():
    spec = circle_moments(named_function("one"), 0, 2.0)
    z = np.array([0.0, 0.5, 1.0j, -1.5])
    assert abs(hardy_growth_check(spec, z, 3.0) - 1.0) < 1e-14


@given(st.floats(2.1, 8.0), st.floats(0.2, 1.0), st.floats(0.1, 2.0))
def test_annulus_ratio_constant_oracle(p, r1, dr):
    r2 = r1 + dr
    got = annulus_bound_ratio(named_function("one"), PENTAGON, p, r1, r2, n_r=32, n_theta=32)
    assert abs(got - (math.pi * (r2**2 - r1**2)) ** (-1 / p)) < 1e-10 * got


def test_annulus_ratio_scale_invariant():
    f = FunctionHandle(lambda z: 1 + z**2)
    h = FunctionHandle(lambda z: -4.0j * (1 + z**2))
    assert abs(annulus_bound_ratio(f, PENTAGON, 3, 1, 2) - annulus_bound_ratio(h, PENTAGON, 3, 1, 2)) < 1e-12


def test_annulus_ratio_rejects_non_members_and_bad_p():
    with pytest.raises(NotAMemberError):
        annulus_bound_ratio(named_function("zbar"), PENTAGON, 3, 1, 2)
    with pytest.raises(InvalidParameterError):
        annulus_bound_ratio(named_function("one"), PENTAGON, 2.0, 1, 2)
    with pytest.raises(InvalidParameterError):
        annulus_bound_ratio(named_function("one"), PENTAGON, 3, 2, 1)


def test_growth_of_exponential():
    rep = growth_profile(FunctionHandle(np.exp), np.linspace(2, 20, 37), t=0.5)
    assert abs(rep.order - 1) < 1e-3 and abs(rep.type - 1) < 1e-3
    assert rep.weighted_decreasing


def test_growth_of_polynomial():
    rep = growth_profile(named_function("z^3"), np.linspace(2, 20, 19))
    assert rep.order == 0.0 and abs(rep.log_coefficient - 3) < 1e-10


def test_growth_of_generator(g):
    rep = growth_profile(named_function("g", g), np.linspace(2, 20, 37))
    assert abs(rep.order - 1) < 0.05
    assert rep.to_csv().startswith("radius,M_r,log_M_r\n")
    assert set(rep.to_dict()) >= {"order", "type", "residual"}


def test_fit_order_recovers_synthetic():
    r = np.linspace(2, 30, 40)
    rho, tau, alpha, res = fit_order(r, 0.7 * r**1.5 - 2 * np.log(r) + 0.3)
    assert abs(rho - 1.5) < 1e-6 and abs(tau - 0.7) < 1e-6 and abs(alpha + 2) < 1e-5


def test_growth_input_validation():
    with pytest.raises(InvalidParameterError):
        growth_profile(named_function("one"), [1.0, 0.5, 2.0, 3.0])
    with pytest.raises(InvalidParameterError):
        fit_order([1, 2, 3], [0, 0, 0])
