import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ra_bergman.exceptions import DomainError, InvalidInputError, InvalidParameterError, SearchFailureError
from ra_bergman.discs import (
    T_HALF_DISC,
    LensMap,
    cauchy_eval,
    fiber_directions,
    five_point_predicate,
    make_disc,
    phi,
    phi_ab,
    psi,
    select_separated_disc,
    wedge_chart,
)

radius = st.floats(0.0, 0.98)
angle = st.floats(0.0, 2 * math.pi)
unit_pt = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)), radius, angle)


def test_phi_normalisation():
    assert abs(phi(-1.0) + 1) < 1e-15
    assert abs(phi(1.0) - 1) < 1e-15
    assert abs(phi(-1j)) < 1e-15
    assert abs(phi(0.0) - 1j * T_HALF_DISC) < 1e-15


@given(unit_pt)
def test_phi_lands_in_half_disc_and_inverts(z):
    w = phi(z)
    assert abs(w) <= 1 + 1e-12 and w.imag >= -1e-12
    assert abs(psi(w) - z) < 1e-9


@given(unit_pt)
def test_phi_reflection_symmetry(z):
    assert abs(phi(-np.conj(z)) + np.conj(phi(z))) < 1e-12


def test_phi_boundary_pieces():
    th = np.linspace(0.01, math.pi - 0.01, 50)
    upper = phi(np.exp(1j * th))
    lower = phi(np.exp(-1j * th))
    assert np.max(np.abs(np.abs(upper) - 1)) < 1e-12
    assert np.max(np.abs(lower.imag)) < 1e-12 and np.max(np.abs(lower.real)) <= 1


def test_domain_errors():
    with pytest.raises(DomainError):
        phi(1.5)
    with pytest.raises(DomainError):
        psi(0.5 - 0.5j)
    with pytest.raises(InvalidParameterError):
        phi_ab(0, -1, 0.0)


@given(st.floats(-3, 3), st.floats(0.05, 3), st.floats(-3, 3), st.floats(0.05, 3))
def test_make_disc_centre_and_boundary(a, b, c, d):
    D = make_disc(a, b, c, d)
    z0, w0 = D.center
    assert abs(z0 - complex(a, b)) < 1e-12 * (1 + abs(a) + b)
    assert abs(w0 - complex(c, d)) < 1e-12 * (1 + abs(c) + d)
    assert D.report["max_violation"] < 1e-10


@pytest.mark.parametrize("F,name", [
    (lambda z, w: 1 + 0 * z, "1"),
    (lambda z, w: z, "z"),
    (lambda z, w: w, "w"),
    (lambda z, w: z * w, "zw"),
    (lambda z, w: np.exp(0.3 * z - 0.2j * w), "exp"),
])
def test_cauchy_eval_oracle(F, name):
    D = make_disc(0.2, 0.7, -0.4, 1.1)
    z0, w0 = D.center
    val, change = cauchy_eval(F, D, report=True)
    assert abs(val - F(z0, w0)) < 1e-9 * (1 + abs(F(z0, w0)))
    assert change < 1e-6


def test_lens_map_centre_and_chord():
    L = LensMap(0.5, 3.0, 2.0, 0.7)
    th = np.linspace(math.pi + 0.05, 2 * math.pi - 0.05, 40)
    chord = L.boundary(th)
    assert np.max(np.abs(chord.imag)) < 1e-12
    assert np.all((chord.real >= 0.5 - 1e-12) & (chord.real <= 3.0 + 1e-12))
    assert L.chord_margin() == 0.5
    assert LensMap(-1.0, 1.0).chord_margin() == 0.0
    with pytest.raises(InvalidParameterError):
        LensMap(1.0, 0.0)


@pytest.mark.parametrize("p", [(1 + 1j, 1 + 1j), (1 + 1j, -1 + 0.5j), (0.5 + 0.2j, -0.5 + 0.3j)])
def test_select_separated_disc(p):
    eps = 0.1
    D = select_separated_disc(p, eps, 10.0)
    z0, w0 = D.center
    assert abs(z0 - p[0]) < 1e-9 and abs(w0 - p[1]) < 1e-9
    th = np.linspace(0, 2 * math.pi, 2049)
    z, w = D.boundary(th)
    up = th <= math.pi
    C = D.report["C"]
    assert np.min(np.abs(z.real[~up])) > C * eps and np.min(np.abs(w.real[up])) > C * eps
    assert np.max(np.hypot(np.abs(z), np.abs(w))) < D.report["R2"] < 10.0


def test_select_refuses_and_reports():
    with pytest.raises(InvalidParameterError):
        select_separated_disc((0.05 + 1j, 1 + 1j), 0.1, 10.0)
    with pytest.raises(InvalidParameterError):
        select_separated_disc((8 + 8j, 1 + 1j), 0.1, 10.0)
    # tall points need lenses too large for R1 = 10
    with pytest.raises(SearchFailureError) as info:
        select_separated_disc((1 + 2j, 1 + 2j), 0.1, 10.0)
    assert info.value.best["sup_modulus"] > 10.0


def test_wedge_chart():
    zeta, tau, jac = wedge_chart(2 + 1j, 1 - 1j)
    assert zeta == (2 + 1j) * (1 - 1j) and tau == zeta - 3 and jac == 1 + 2j


def test_five_point_predicate():
    pent = 0.5 * np.exp(2j * math.pi * np.arange(5) / 5)
    ok, d = five_point_predicate(pent, 0.0)
    assert ok and len(d) == 5
    ok, _ = five_point_predicate(pent, 3.0)
    assert not ok
    with pytest.raises(InvalidInputError):
        five_point_predicate(pent[:4], 0.0)
    with pytest.raises(InvalidInputError):
        fiber_directions(pent, pent[0])


@given(st.lists(angle, min_size=5, max_size=12))
def test_predicate_rotation_invariant(angles):
    pts = np.exp(1j * np.array(angles)) * 0.5
    if len(np.unique(np.round(pts, 12))) < len(pts):
        return
    a, _ = five_point_predicate(pts, 0.0)
    b, _ = five_point_predicate(pts * np.exp(0.7j), 0.0)
    d = np.sort(np.mod(np.array(angles) + math.pi, 2 * math.pi))
    gaps = np.diff(np.concatenate([d, [d[0] + 2 * math.pi]]))
    if abs(np.max(gaps) - math.pi) > 1e-9:
        assert a == b == bool(np.max(gaps) < math.pi)
