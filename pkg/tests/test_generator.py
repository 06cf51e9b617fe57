import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ra_bergman.exceptions import InvalidInputError, InvalidParameterError
from ra_bergman.generator import (
    OMEGA,
    ProductGenerator,
    TripleSineGenerator,
    ZeroSet,
    blaschke_sum,
    disc_zero_set,
    dyadic_level,
    eval_g,
    generator_for,
    triple_lattice,
)

coord = st.floats(-6, 6, allow_nan=False)
points = st.builds(complex, coord, coord)


def test_triple_lattice_counts_and_symmetry():
    X = triple_lattice(math.pi, 3 * math.pi + 0.1)
    assert len(X) == 1 + 6 * 3
    rotated = X.points * OMEGA
    assert np.all(X.contains(rotated, tol=1e-12))


def test_g_vanishes_on_lattice(g):
    # representing a lattice point in floating point moves it by ~eps|a|,
    # so |g(a)| is only small relative to |g'(a)| |a|
    X = triple_lattice(math.pi, 4 * math.pi + 0.1)
    a = X.points[1:]
    assert np.max(np.abs(g(a)) / (np.abs(g.derivative(a)) * np.abs(a))) < 1e-14


def test_g_normalised_at_origin(g):
    assert abs(g(np.array([0j]))[0]) == 0.0
    assert abs(g.derivative(np.array([0j]))[0] - 1.0) < 1e-12


def test_derivative_matches_finite_difference(g, rng):
    z = rng.normal(size=16) * 2 + 1j * rng.normal(size=16) * 2
    h = 1e-6
    fd = (g(z + h) - g(z - h)) / (2 * h)
    assert np.max(np.abs(fd - g.derivative(z)) / (1 + np.abs(fd))) < 1e-6


@given(points)
def test_rotation_covariance(z):
    # G(omega u) = omega G(u), hence g(omega z) = omega g(z)
    g = TripleSineGenerator()
    a, b = g(np.array([OMEGA * z]))[0], OMEGA * g(np.array([z]))[0]
    assert abs(a - b) <= 1e-9 * (1 + abs(b))


@given(points)
def test_conjugation_symmetry(z):
    g = TripleSineGenerator()
    a, b = g(np.array([np.conj(z)]))[0], np.conj(g(np.array([z]))[0])
    assert abs(a - b) <= 1e-10 * (1 + abs(b))


@given(points)
def test_log_polar_consistent(z):
    g = TripleSineGenerator()
    v = g(np.array([z]))[0]
    lg, ag = g.log_polar(np.array([z]))
    if abs(v) > 1e-8:
        assert abs(math.exp(lg[0]) - abs(v)) <= 1e-9 * abs(v)
        assert abs(np.exp(1j * ag[0]) - v / abs(v)) < 1e-8


def test_log_polar_finite_far_out(g):
    z = np.array([400 + 300j, -1000j])
    lg, _ = g.log_polar(z)
    assert np.all(np.isfinite(lg)) and np.all(lg > 100)


def test_spacing_scaling():
    g1, g2 = TripleSineGenerator(math.pi), TripleSineGenerator(2 * math.pi)
    z = np.array([0.3 + 0.2j, 1.5 - 0.7j])
    # g_s(z) = (s/pi) G(pi z / s), so g_{2pi}(2z) = 2 g_pi(z)
    assert np.allclose(g2(2 * z), 2 * g1(z), rtol=1e-12)


def test_scaled_generator_zeros(g):
    pts = triple_lattice(math.pi, 10).points / 3
    assert np.max(np.abs(g.scaled(3)(pts))) < 1e-10


def test_product_generator_vanishes_on_its_points():
    X = disc_zero_set(2, 1)
    P = ProductGenerator(X)
    assert np.max(np.abs(P(X.points))) < 1e-12
    assert np.min(np.abs(P(np.array([0.05j, -0.1 + 0.0j])))) > 0


def test_generator_for_dispatch():
    assert isinstance(generator_for(triple_lattice(math.pi, 4)), TripleSineGenerator)
    assert isinstance(generator_for(disc_zero_set(1, 1)), ProductGenerator)


def test_eval_g_log_flag(g):
    z = np.array([0.5 + 0.5j])
    v, d = eval_g(g, z)
    assert v.shape == d.shape == (1,)


@pytest.mark.parametrize("n_max,k", [(1, 1), (3, 1), (2, 3)])
def test_disc_zero_set_structure(n_max, k):
    X = disc_zero_set(n_max, k)
    assert len(X) == sum(5 * k * 2**n for n in range(1, n_max + 1))
    assert np.all(np.abs(X.points) < 1)
    levels = [dyadic_level(abs(a)) for a in X.points]
    assert sorted(set(levels)) == list(range(1, n_max + 1))


def test_blaschke_level_ratios_match_power_law():
    # level n has 5k 2^n points at distance ~ 3*2^-(n+2) from the circle: ratio 2^(1-t)
    for t in (1.5, 2.0, 3.0):
        ratios = blaschke_sum(disc_zero_set(8, 1), t).level_ratios()
        assert all(abs(r - 2.0 ** (1 - t)) < 0.05 * 2.0 ** (1 - t) for r in ratios.values())


def test_blaschke_divergent_at_t1():
    sums = blaschke_sum(disc_zero_set(8, 1), 1.0)
    assert all(abs(r - 1.0) < 0.05 for r in sums.level_ratios().values())
    assert np.all(np.diff(sums.partial_sums) > 0)


def test_zero_set_roundtrip(tmp_path):
    X = triple_lattice(math.pi, 7)
    path = tmp_path / "x.json"
    X.save(path)
    Y = ZeroSet.load(path)
    assert np.array_equal(X.points, Y.points) and Y.kind == X.kind and Y.params == X.params


def test_zero_set_rejects_duplicates_and_nan():
    with pytest.raises(InvalidInputError):
        ZeroSet(np.array([1 + 1j, 1 + 1j]))
    with pytest.raises((InvalidInputError, InvalidParameterError)):
        ZeroSet(np.array([np.nan + 0j]))


@pytest.mark.parametrize("bad", [0, -1.0])
def test_invalid_spacing(bad):
    with pytest.raises(InvalidParameterError):
        triple_lattice(bad, 3)


def test_blaschke_rejects_points_outside_disc():
    with pytest.raises(InvalidInputError):
        blaschke_sum(np.array([0.5, 1.2]), 2.0)
