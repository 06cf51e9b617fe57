import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ra_bergman.exceptions import InvalidParameterError
from ra_bergman.generator import triple_lattice
from ra_bergman.pde import evolve_membership_check, pde_residual, transport_solve

coef = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


def _grid(R=2.0, n=9):
    x = np.linspace(-R, R, n)
    z = (x[:, None] + 1j * x[None, :]).ravel()
    return z[np.abs(z) <= R]


def test_initial_data_recovered(g, rng):
    U = [0.5, -1.0, 2.0]
    st_ = transport_solve(U, g)
    z = _grid()
    zg = np.conj(z) * g(z)
    assert np.max(np.abs(st_(0.0, z) - (0.5 - zg + 2 * zg**2))) < 1e-12


def test_closed_form_linear_case(g):
    # u = U0 + U1 (zbar g) evolves to U0 - t U1 g + U1 (zbar g)
    st_ = transport_solve([1.0, 2.0], g)
    z = _grid()
    t = 0.37
    expected = 1.0 - t * 2.0 * g(z) + 2.0 * np.conj(z) * g(z)
    assert np.max(np.abs(st_(t, z) - expected)) < 1e-12


@given(st.lists(coef, min_size=1, max_size=4))
def test_residual_small(U):
    from ra_bergman.generator import TripleSineGenerator

    st_ = transport_solve(U, TripleSineGenerator())
    scale = 1 + max(abs(u) for u in U)
    assert pde_residual(st_, _grid(1.5, 5), [0.0, 0.7]) < 1e-7 * scale


def test_fourth_order_beats_second_order(g):
    st_ = transport_solve([0.5, -1.0, 2.0, 0.25], g)
    z = _grid()
    r2 = pde_residual(st_, z, [0.0, 1.0], order=2)
    r4 = pde_residual(st_, z, [0.0, 1.0], order=4)
    assert r4 < 1e-7 < r2
    with pytest.raises(InvalidParameterError):
        pde_residual(st_, z, [0.0], order=3)


def test_degree_in_t(g):
    st_ = transport_solve([0.5, -1.0, 2.0, 0.25], g)
    assert [st_.degree_in_t(k) for k in range(4)] == [3, 2, 1, 0]
    with pytest.raises(InvalidParameterError):
        st_.coefficient(5, 0.0, np.array([0j]))


def test_semigroup(g):
    st_ = transport_solve([0.5, -1.0, 2.0], g)
    z = _grid()
    assert np.max(np.abs(st_.advance(0.25)(0.5, z) - st_(0.75, z))) < 1e-10


def test_evolution_preserves_membership(g):
    st_ = transport_solve([0.5, -1.0, 2.0], g)
    res = evolve_membership_check(st_, triple_lattice(math.pi, 4), [0.0, 0.5, 1.0], [0.5, 1.0])
    assert res["passed"] and len(res["reports"]) == 3


def test_holomorphic_coefficients(g):
    st_ = transport_solve([lambda z: z**2, lambda z: 1 + 0 * z], g)
    z = _grid()
    expected = z**2 - 0.4 * g(z) + np.conj(z) * g(z)
    assert np.max(np.abs(st_(0.4, z) - expected)) < 1e-12


def test_empty_data_rejected(g):
    with pytest.raises(InvalidParameterError):
        transport_solve([], g)
