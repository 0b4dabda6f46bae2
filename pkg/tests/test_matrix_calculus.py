import numpy as np
import pytest

from hyperbolic import FiniteBlaschke, Jet, evaluate_jet
from lib.utils import BoundaryGuardError, InputError
from matrix_calculus import (
    DenseMatrix,
    SpectralData,
    apply_function,
    apply_power_series,
    blaschke_jets,
    blaschke_of_matrix,
    constant_jets,
    ingest_dense,
    jordan_apply,
    jordan_form,
    load_sequence,
    minimal_polynomial,
    polynomial_jets,
    product_jets,
    sequence_to_payload,
)


def random_spectral_data(rng, points_factory, max_points=4, max_order=3, radius=0.9):
    count = int(rng.integers(1, max_points + 1))
    points = points_factory(rng, count, radius=radius, min_distance=0.05)
    orders = rng.integers(1, max_order + 1, size=count)
    return SpectralData.from_pairs(list(zip(points, orders.tolist())))


def geometric_jets(scale):
    """Jets of ``1 / (1 - z / scale)``."""
    def provider(node, length):
        base = 1.0 / (1.0 - node / scale)
        return Jet(node, tuple(base ** (k + 1) / scale ** k for k in range(length)))

    return provider


def test_jordan_apply_examples():
    identity = polynomial_jets([0.0, 1.0])
    np.testing.assert_allclose(jordan_apply(identity(0.3, 2)).entries, [[0.3, 1.0], [0.0, 0.3]])
    lam = 0.2 + 0.1j
    square = polynomial_jets([0.0, 0.0, 1.0])
    np.testing.assert_allclose(jordan_apply(square(lam, 2)).entries, [[lam ** 2, 2 * lam], [0.0, lam ** 2]])


def test_blaschke_factor_on_a_two_by_two_block_is_nilpotent():
    lam = 0.4 - 0.2j
    B = FiniteBlaschke.from_zeros([lam])
    block = SpectralData.from_pairs([(lam, 2)])
    result = apply_function(blaschke_jets(B), block).entries
    derivative = evaluate_jet(B, lam, 1).as_array()[1]
    assert derivative == pytest.approx(-1.0 / (1.0 - abs(lam) ** 2))
    np.testing.assert_allclose(result, [[0.0, derivative], [0.0, 0.0]], atol=1e-15)


def test_apply_function_examples():
    A = SpectralData.from_pairs([(0.5, 1), (-0.2, 3)])
    np.testing.assert_allclose(apply_function(constant_jets(1.0), A).entries, np.eye(4))
    diagonal = SpectralData.from_pairs([(0.5, 1), (-0.2, 1)])
    np.testing.assert_allclose(apply_function(polynomial_jets([0.0, 1.0]), diagonal).entries, np.diag([0.5, -0.2]))


def test_blaschke_product_annihilates_its_matrix(rng, disk_points):
    worst = 0.0
    for _ in range(200):
        A = random_spectral_data(rng, disk_points)
        annihilated = apply_function(blaschke_jets(blaschke_of_matrix(A)), A).entries
        worst = max(worst, float(np.max(np.abs(annihilated))))
    assert worst <= 1e-10


def test_blaschke_of_matrix_examples():
    single = blaschke_of_matrix(SpectralData.from_pairs([(0.3, 1)]))
    assert single.degree == 1
    block = blaschke_of_matrix(SpectralData.from_pairs([(0.3, 2)]))
    z = 0.1 + 0.6j
    assert block(z) == pytest.approx(single(z) ** 2)
    mixed = blaschke_of_matrix(SpectralData.from_pairs([(0.5, 1), (-0.2, 3)]))
    assert mixed.degree == 4


def test_minimal_polynomial_over_its_reflection_matches_the_product():
    A = SpectralData.from_pairs([(0.5, 1), (-0.2 + 0.3j, 2)])
    coefficients = np.asarray(minimal_polynomial(A))
    numerator = np.polynomial.Polynomial(coefficients)
    reflected = np.polynomial.Polynomial(np.conj(coefficients[::-1]))
    B = blaschke_of_matrix(A)
    grid = 0.8 * np.exp(2j * np.pi * np.arange(50) / 50)
    # numerator / reflection equals the product up to the unimodular sign of the leading factors
    ratio = numerator(grid) / reflected(grid)
    np.testing.assert_allclose(np.abs(ratio), np.abs(B(grid)), atol=1e-10)
    phase = ratio[0] / B(grid[0])
    np.testing.assert_allclose(ratio, phase * B(grid), atol=1e-10)


def test_power_series_examples():
    M = np.array([[0.3, 1.0], [0.0, 0.3]])
    np.testing.assert_allclose(apply_power_series([0.0, 1.0], M, 1e-12).entries, M)
    geometric = apply_power_series(np.ones(400), M / 0.9, 1e-12).entries
    expected = jordan_apply(Jet(0.3, (1.0 / (1.0 - 0.3 / 0.9), (1.0 / 0.9) / (1.0 - 0.3 / 0.9) ** 2))).entries
    np.testing.assert_allclose(geometric, expected, atol=1e-9)


def test_power_series_agrees_with_the_jordan_route(rng, disk_points):
    for _ in range(20):
        A = random_spectral_data(rng, disk_points, max_points=3, max_order=2, radius=0.6)
        J = jordan_form(A)
        coefficients = rng.normal(size=5) + 1j * rng.normal(size=5)
        np.testing.assert_allclose(
            apply_power_series(coefficients, J, 1e-12).entries,
            apply_function(polynomial_jets(coefficients), A).entries,
            atol=1e-8,
        )
        series = apply_power_series(0.5 ** np.arange(2000), J, 1e-12).entries
        np.testing.assert_allclose(series, apply_function(geometric_jets(2.0), A).entries, atol=1e-8)


def test_power_series_commutes_with_similarity(rng):
    A = SpectralData.from_pairs([(0.4, 2), (-0.3j, 1), (0.1, 1)])
    J = jordan_form(A).entries
    P = np.eye(4) + 0.3 * rng.normal(size=(4, 4))
    P_inv = np.linalg.inv(P)
    coefficients = 0.7 ** np.arange(300)
    similar = apply_power_series(coefficients, P @ J @ P_inv, 1e-12).entries
    expected = P @ apply_function(geometric_jets(1 / 0.7), A).entries @ P_inv
    np.testing.assert_allclose(similar, expected, atol=1e-8 * np.linalg.cond(P))


def test_power_series_rejects_spectrum_on_the_circle():
    with pytest.raises(BoundaryGuardError):
        apply_power_series([1.0, 1.0], np.diag([1.0, 0.2]), 1e-8)
    with pytest.raises(InputError):
        apply_power_series([1.0], np.eye(2) * 0.1, 0.0)


def test_functional_calculus_is_multiplicative():
    A = SpectralData.from_pairs([(0.5, 2), (-0.2 + 0.1j, 3), (0.0, 1)])
    f = polynomial_jets([0.2, 1.0, 0.5])
    g = blaschke_jets(FiniteBlaschke.from_zeros([0.3j, -0.6], [2, 1]))
    product = apply_function(product_jets(f, g), A).entries
    separate = apply_function(f, A).entries @ apply_function(g, A).entries
    np.testing.assert_allclose(product, separate, atol=1e-10)


def test_ingest_dense_examples():
    diagonal = ingest_dense(np.diag([0.5, -0.2]))
    assert sorted((point.value.real, order) for point, order in diagonal.entries) == [(-0.2, 1), (0.5, 1)]
    assert diagonal.reliable

    block = ingest_dense(np.array([[0.3, 1.0], [0.0, 0.3]]))
    assert [(point.value, order) for point, order in block.entries] == [(0.3, 2)]

    absorbed = ingest_dense(np.array([[0.3, 1.0, 0.0], [0.0, 0.3, 0.0], [0.0, 0.0, 0.3]]))
    assert [(point.value, order) for point, order in absorbed.entries] == [(0.3, 2)]


def test_ingest_dense_recovers_the_jordan_form():
    A = SpectralData.from_pairs([(0.5, 1), (-0.2, 3), (0.1 + 0.4j, 2)])
    recovered = ingest_dense(jordan_form(A))
    key = lambda entry: (entry[0].real, entry[0].imag)
    got = sorted(((point.value, order) for point, order in recovered.entries), key=key)
    want = sorted(((point.value, order) for point, order in A.entries), key=key)
    assert [order for _, order in got] == [order for _, order in want]
    np.testing.assert_allclose([value for value, _ in got], [value for value, _ in want], atol=1e-12)
    assert recovered.reliable


def test_ingest_dense_flags_nearly_merged_clusters():
    data = ingest_dense(np.diag([0.3, 0.3 + 5e-8]))
    assert not data.reliable
    assert any('apart' in message for message in data.diagnostics)


def test_ingest_dense_rejects_boundary_spectrum():
    with pytest.raises(BoundaryGuardError):
        ingest_dense(np.diag([0.2, 1.0]))


def test_spectral_data_validation():
    with pytest.raises(InputError):
        SpectralData.from_pairs([])
    with pytest.raises(InputError):
        SpectralData.from_pairs([(0.2, 0)])
    with pytest.raises(InputError):
        SpectralData.from_pairs([(0.2, 1), (0.2, 2)])
    with pytest.raises(InputError):
        DenseMatrix(np.zeros((2, 3)))


def test_load_sequence_reads_both_forms():
    sequence = load_sequence({
        'matrices': [
            {'eigenvalues': [{'re': 0.3, 'order': 2}, [0.0, -0.5]]},
            {'label': 'block', 'dense': [[0.1, 1.0], [0.0, 0.1]]},
        ]
    })
    assert [matrix.label for matrix in sequence] == ['A1', 'block']
    assert sequence[0].degree == 3
    assert sequence[1].orders == [2]
    payload = sequence_to_payload(sequence)
    assert payload[0]['eigenvalues'][0] == {'re': 0.3, 'im': 0.0, 'order': 2}


@pytest.mark.parametrize('payload', [
    [],
    {'matrices': []},
    [{'foo': 1}],
    ['not an object'],
    [{'eigenvalues': []}],
    [{'eigenvalues': [{'re': 0.2, 'order': 0}]}],
    [{'eigenvalues': [{'im': 0.2}]}],
    [{'dense': [1, 2]}],
])
def test_load_sequence_rejects_malformed_input(payload):
    with pytest.raises(InputError):
        load_sequence(payload)


def test_load_sequence_rejects_points_on_the_circle():
    with pytest.raises(BoundaryGuardError):
        load_sequence([{'eigenvalues': [1.0]}])
