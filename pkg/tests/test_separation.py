import numpy as np
import pytest

from hyperbolic import FiniteBlaschke, blaschke_factor, log_tanh
from lib.utils import InputError
from separation import (
    carleson_weights,
    landscape,
    leave_one_out_product,
    nikolski_pairwise,
    strong_separation,
    strong_separation_on_geodesic,
    uniform_strong_separation,
    uniform_strong_separation_on_geodesic,
    weak_separation,
)

GOLDEN_SPLIT = 2.0 - np.sqrt(3.0)


def single_zero_factors(points, multiplicities=None):
    multiplicities = multiplicities or [1] * len(points)
    return [FiniteBlaschke.from_zeros([p], [m]) for p, m in zip(points, multiplicities)]


def test_pointwise_separation_examples():
    assert strong_separation([(0.0, 1), (0.5, 1)]) == pytest.approx(0.5)
    assert strong_separation([(0.0, 1), (0.5, 2)]) == pytest.approx(0.25)
    assert nikolski_pairwise([(0.0, 2), (0.5, 3)]) == pytest.approx(0.5 ** 6)
    assert weak_separation([0.0, 0.5, -0.5]) == pytest.approx(0.5)
    assert carleson_weights([0.6]) == [pytest.approx(0.64)]


def test_pointwise_separation_edge_cases():
    assert strong_separation([0.3]) == 1.0
    assert strong_separation([0.3, 0.3]) == 0.0
    with pytest.raises(InputError):
        weak_separation([0.3])
    with pytest.raises(InputError):
        strong_separation([(0.3, 0)])


def test_strong_separation_on_geodesic_matches_the_disk_version():
    points = [0.1, 0.55, 0.8]
    depths = np.arctanh(points)
    assert strong_separation_on_geodesic(depths, [1, 2, 1]) == pytest.approx(
        strong_separation(list(zip(points, [1, 2, 1]))), rel=1e-12
    )


def test_uniform_strong_separation_of_two_simple_factors():
    report = uniform_strong_separation(single_zero_factors([0.0, 0.5]))
    assert report.value == pytest.approx(GOLDEN_SPLIT, abs=1e-9)
    assert report.argmin_point.real == pytest.approx(GOLDEN_SPLIT, abs=1e-9)
    assert report.converged
    assert report.lower_bound <= report.value


def test_uniform_strong_separation_of_repeated_factors_is_zero():
    report = uniform_strong_separation(single_zero_factors([0.3, 0.3, 0.3]))
    assert report.value == 0.0


def test_uniform_strong_separation_of_a_single_factor_is_one():
    report = uniform_strong_separation(single_zero_factors([0.3 + 0.2j]))
    assert report.value == 1.0
    assert report.method == 'trivial'
    with pytest.raises(InputError):
        uniform_strong_separation([])


def test_rotated_geodesic_gives_the_same_value():
    real = uniform_strong_separation(single_zero_factors([0.3, 0.6], [1, 2]))
    rotated = uniform_strong_separation(single_zero_factors([0.3j, 0.6j], [1, 2]))
    assert rotated.value == pytest.approx(real.value, abs=1e-12)
    assert abs(rotated.argmin_point) == pytest.approx(abs(real.argmin_point), abs=1e-9)


def test_geodesic_branch_and_bound_brackets_a_dense_grid():
    depths, multiplicities = [0.2, 0.9, 1.7], [1, 2, 1]
    report = uniform_strong_separation_on_geodesic([([d], [m]) for d, m in zip(depths, multiplicities)], tol=1e-6)
    edges = np.linspace(min(depths), max(depths), 200_001)
    grid = 0.5 * (edges[1:] + edges[:-1])
    logs = np.array([m * log_tanh(np.abs(grid - d)) for d, m in zip(depths, multiplicities)])
    brute = float(np.exp(logs.sum(axis=0) - logs.min(axis=0)).min())
    assert report.converged
    assert report.lower_bound <= brute + 1e-12
    assert report.value <= brute + 1e-6


def test_uniform_separation_never_exceeds_strong_separation(rng):
    for _ in range(5):
        points = np.sort(rng.uniform(-0.9, 0.9, size=4))
        multiplicities = rng.integers(1, 4, size=4).tolist()
        report = uniform_strong_separation(single_zero_factors(points.tolist(), multiplicities), tol=1e-4)
        strong = strong_separation(list(zip(points.tolist(), multiplicities)))
        assert report.value <= strong + 1e-4


def test_polar_scan_is_moebius_covariant():
    zeros = [0.3, 0.4j, -0.5 + 0.1j]
    tau = 0.2 - 0.1j
    tol = 1e-3
    base = uniform_strong_separation(single_zero_factors(zeros), tol=tol)
    moved = uniform_strong_separation(single_zero_factors([blaschke_factor(tau, z) for z in zeros]), tol=tol)
    assert base.method == 'polar'
    assert base.converged and moved.converged
    assert moved.value == pytest.approx(base.value, abs=2 * tol)
    assert base.lower_bound <= base.value
    strong = strong_separation(zeros)
    assert base.value <= strong + tol


def test_bounded_multiplicities_keep_a_positive_uniform_floor(rng, disk_points):
    delta, m_max, tol = 0.6, 3, 1e-3
    # at most one zero lies within this distance of any z
    reach = (1.0 - np.sqrt(1.0 - delta ** 2)) / delta
    for _ in range(8):
        points = disk_points(rng, 3, radius=0.7, min_distance=delta)
        multiplicities = rng.integers(1, m_max + 1, size=3).tolist()
        assert strong_separation(list(zip(points, multiplicities))) >= delta ** (m_max * 2) - 1e-12
        report = uniform_strong_separation(single_zero_factors(points, multiplicities), tol=tol)
        assert report.converged
        assert report.value >= reach ** (m_max * 2)
        assert report.lower_bound >= report.value - tol > 0.0


def test_appending_a_factor_never_raises_the_separation(rng, disk_points):
    grid = 0.95 * np.sqrt(rng.random(20_000)) * np.exp(2j * np.pi * rng.random(20_000))
    tol = 1e-3
    for _ in range(4):
        points = disk_points(rng, 5, radius=0.7, min_distance=0.3)
        multiplicities = rng.integers(1, 3, size=5).tolist()
        factors = [
            FiniteBlaschke.from_zeros(points[:2], multiplicities[:2]),
            FiniteBlaschke.from_zeros(points[2:4], multiplicities[2:4]),
        ]
        extended = factors + [FiniteBlaschke.from_zeros(points[4:], multiplicities[4:])]
        assert np.all(leave_one_out_product(extended, grid) <= leave_one_out_product(factors, grid) + 1e-12)
        base = uniform_strong_separation(factors, tol=tol)
        more = uniform_strong_separation(extended, tol=tol)
        assert more.lower_bound <= base.value + 1e-12
        assert more.value <= base.value + tol


def test_polar_scan_with_repeated_zeros_brackets_a_dense_grid(rng, disk_points):
    radii = np.tanh(np.linspace(0.0, np.arctanh(0.95), 600))
    angles = np.exp(2j * np.pi * np.arange(1200) / 1200)
    grid = (radii[:, None] * angles[None, :]).ravel()
    tol = 1e-3
    for _ in range(4):
        points = disk_points(rng, 6, radius=0.7, min_distance=0.2)
        multiplicities = rng.integers(1, 3, size=6).tolist()
        factors = [FiniteBlaschke.from_zeros(points[k:k + 2], multiplicities[k:k + 2]) for k in (0, 2, 4)]
        report = uniform_strong_separation(factors, tol=tol)
        brute = float(leave_one_out_product(factors, grid).min())
        assert report.method == 'polar'
        assert report.converged
        assert report.lower_bound <= brute + 1e-12
        assert report.value <= brute + tol
        assert float(leave_one_out_product(factors, report.argmin_point)[0]) == pytest.approx(report.value, rel=1e-9)


def test_leave_one_out_product_vanishes_only_where_two_factors_vanish():
    factors = single_zero_factors([0.0, 0.5])
    values = leave_one_out_product(factors, np.array([0.0, 0.5, 0.25]))
    assert values[0] == pytest.approx(0.5)
    assert values[1] == pytest.approx(0.5)
    assert values[2] == pytest.approx(max(0.25, abs(blaschke_factor(0.5, 0.25))))


def test_landscape_table_shape():
    factors = single_zero_factors([0.0, 0.5])
    table = landscape(factors, radial=8, angular=16)
    assert list(table.columns) == ['re', 'im', 'value']
    assert len(table) == 8 * 16 + 1
    assert table['value'].between(0.0, 1.0).all()


def test_report_serializes():
    payload = uniform_strong_separation(single_zero_factors([0.0, 0.5])).as_dict()
    assert set(payload) >= {'value', 'lower_bound', 'argmin_point', 'converged', 'method'}
    assert payload['argmin_point']['im'] == pytest.approx(0.0, abs=1e-12)
