import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyperbolic import (
    DiskPoint,
    FiniteBlaschke,
    Jet,
    blaschke_factor,
    depth_distance,
    depth_of,
    evaluate_jet,
    gap_at_depth,
    log_tanh,
    point_at_depth,
    pseudo_distance,
    reflect_polynomial,
    rho_split,
)
from lib.utils import BoundaryGuardError, InputError

disk_values = st.builds(
    lambda r, theta: r * np.exp(1j * theta),
    st.floats(0.0, 0.95),
    st.floats(0.0, 2 * np.pi),
)


def test_blaschke_factor_examples():
    assert blaschke_factor(0.5, 0.5) == pytest.approx(0.0)
    assert blaschke_factor(0.0, 0.3 + 0.4j) == pytest.approx(-(0.3 + 0.4j))
    assert blaschke_factor(0.5, blaschke_factor(0.5, 0.2)) == pytest.approx(0.2)


@given(disk_values, disk_values)
def test_blaschke_factor_is_an_involution(tau, z):
    assert abs(blaschke_factor(tau, blaschke_factor(tau, z)) - z) < 1e-9


def test_blaschke_factor_is_unimodular_on_the_circle():
    circle = np.exp(2j * np.pi * np.linspace(0, 1, 64, endpoint=False))
    np.testing.assert_allclose(np.abs(blaschke_factor(0.3 - 0.6j, circle)), 1.0, atol=1e-12)


def test_points_beyond_the_guard_are_rejected():
    with pytest.raises(BoundaryGuardError):
        DiskPoint(1.0)
    with pytest.raises(InputError):
        DiskPoint(float('nan'))
    with pytest.raises(InputError):
        blaschke_factor(0.2, 1.5)


def test_pseudo_distance_examples():
    assert pseudo_distance(0, 0.5) == pytest.approx(0.5)
    assert pseudo_distance(0.3j, 0.3j) == 0.0
    assert pseudo_distance(0.25, 0.5) == pytest.approx(0.25 / 0.875, abs=1e-12)


@given(disk_values, disk_values, disk_values)
def test_pseudo_distance_is_moebius_invariant(a, b, tau):
    moved = pseudo_distance(blaschke_factor(tau, a), blaschke_factor(tau, b))
    assert moved == pytest.approx(pseudo_distance(a, b), abs=1e-9)


def test_evaluate_jet_examples():
    b0 = FiniteBlaschke.from_zeros([0.0])
    np.testing.assert_allclose(evaluate_jet(b0, 0.3, 1).as_array(), [-0.3, -1.0], atol=1e-15)
    square = FiniteBlaschke.from_zeros([0.0], [2])
    np.testing.assert_allclose(evaluate_jet(square, 0.0, 2).as_array(), [0.0, 0.0, 1.0], atol=1e-15)
    pair = FiniteBlaschke.from_zeros([0.5, -0.5])
    np.testing.assert_allclose(evaluate_jet(pair, 0.0, 0).as_array(), [-0.25], atol=1e-15)


def test_evaluate_jet_matches_finite_differences():
    B = FiniteBlaschke.from_zeros([0.3 + 0.2j, -0.5j, 0.1], [2, 1, 3])
    z0, h = 0.2 - 0.1j, 1e-4
    jet = evaluate_jet(B, z0, 2).as_array()
    first = (B(z0 + h) - B(z0 - h)) / (2 * h)
    second = (B(z0 + h) - 2 * B(z0) + B(z0 - h)) / h ** 2
    assert jet[0] == pytest.approx(B(z0), abs=1e-14)
    assert jet[1] == pytest.approx(first, abs=1e-6)
    assert jet[2] == pytest.approx(second / 2, abs=1e-4)


def test_long_products_use_the_log_form_consistently():
    rng = np.random.default_rng(3)
    zeros = 0.9 * np.sqrt(rng.random(80)) * np.exp(2j * np.pi * rng.random(80))
    B = FiniteBlaschke.from_zeros(list(zeros))
    z = 0.4 + 0.3j
    direct = np.prod((zeros - z) / (1 - np.conj(zeros) * z))
    assert B(z) == pytest.approx(direct, rel=1e-10)
    assert evaluate_jet(B, z, 1).as_array()[0] == pytest.approx(direct, rel=1e-10)
    assert B.modulus(z) == pytest.approx(abs(direct), rel=1e-10)


def test_product_of_blaschke_products_merges_zeros():
    first = FiniteBlaschke.from_zeros([0.0, 0.5])
    second = FiniteBlaschke.from_zeros([0.0])
    product = first * second
    assert product.degree == 3
    assert dict((p.value, m) for p, m in product.zeros) == {0j: 2, 0.5 + 0j: 1}


def test_reflect_polynomial_examples():
    assert reflect_polynomial([-0.3, 1.0]) == [1.0, -0.3]
    assert reflect_polynomial([0.0, 0.0, 1.0]) == [1.0, 0.0, 0.0]
    with pytest.raises(InputError):
        reflect_polynomial([])


def test_minimal_polynomial_ratio_is_the_blaschke_product():
    p = np.polynomial.Polynomial([0.25, -1.0, 1.0])
    reflected = np.polynomial.Polynomial(reflect_polynomial(p.coef))
    rng = np.random.default_rng(5)
    z = 0.9 * np.sqrt(rng.random(20)) * np.exp(2j * np.pi * rng.random(20))
    np.testing.assert_allclose(p(z) / reflected(z), blaschke_factor(0.5, z) ** 2, atol=1e-12)


def test_rho_split_example():
    gamma, s = rho_split(0.0, 0.5, 0.5)
    assert gamma == pytest.approx(0.25)
    assert s * 0.5 == pytest.approx(pseudo_distance(0.25, 0.5), abs=1e-12)


def test_rho_split_identity_on_random_samples():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(10_000):
        lam1, lam2 = np.sort(rng.random(2) * 0.99)
        if lam2 - lam1 < 1e-6:
            continue
        t = rng.uniform(1e-6, 1 - 1e-6)
        gamma, s = rho_split(lam1, lam2, t)
        rho = pseudo_distance(lam1, lam2)
        worst = max(worst, abs(pseudo_distance(gamma, lam2) - s * rho), abs(pseudo_distance(lam1, gamma) - t * rho))
    assert worst <= 1e-10


def test_rho_split_rejects_bad_parameters():
    with pytest.raises(InputError):
        rho_split(0.5, 0.2, 0.3)
    with pytest.raises(InputError):
        rho_split(0.1, 0.2, 1.0)


def test_depth_coordinates():
    assert point_at_depth(depth_of(0.5)) == pytest.approx(0.5)
    assert gap_at_depth(30.0) == pytest.approx(2 * np.exp(-60.0), rel=1e-12)
    assert gap_at_depth(0.4) == pytest.approx(1 - np.tanh(0.4), rel=1e-12)
    assert depth_distance(depth_of(0.25), depth_of(0.5)) == pytest.approx(pseudo_distance(0.25, 0.5), abs=1e-12)
    assert float(log_tanh(40.0)) == pytest.approx(-2 * np.exp(-80.0), rel=1e-9)
    assert float(log_tanh(0.3)) == pytest.approx(np.log(np.tanh(0.3)))


def test_jet_arithmetic():
    a = Jet(0.1, (1.0, 2.0, 3.0))
    b = Jet(0.1, (0.5, -1.0))
    assert (a * b).as_array().tolist() == [0.5, 0.0]
    assert (a + b).length == 2
    assert a.power(2).as_array().tolist() == [1.0, 4.0, 10.0]
    np.testing.assert_allclose(a.derivatives(), [1.0, 2.0, 6.0])
    with pytest.raises(InputError):
        a + Jet(0.2, (1.0,))
