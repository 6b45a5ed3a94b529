import numpy as np
import pytest

from cplab import OperatorBasis, standard_basis, validate_basis
from cplab.errors import InvalidDimension, ShapeMismatch

from helpers import random_hermitian

SQ2 = np.sqrt(2.0)
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.diag([1.0, -1.0]).astype(complex),
)


def _gram(elements):
    return np.einsum("aji,bji->ab", np.conj(elements), elements)


def test_d2_is_normalized_pauli():
    basis = standard_basis(2)
    for got, pauli in zip(basis.elements, PAULI):
        np.testing.assert_allclose(got, pauli / SQ2, atol=1e-15)


@pytest.mark.parametrize("d,count", [(3, 8), (4, 15)])
def test_gram_matrix_is_identity(d, count):
    basis = standard_basis(d)
    assert basis.size == count
    gram = _gram(basis.elements)
    assert np.max(np.abs(gram - np.eye(count))) <= 1e-12
    assert np.max(np.abs(np.einsum("aii->a", basis.elements))) <= 1e-12


def test_deterministic_output():
    np.testing.assert_array_equal(standard_basis(3).elements, standard_basis(3).elements)


def test_invalid_dimension():
    with pytest.raises(InvalidDimension):
        standard_basis(1)


class TestValidateBasis:
    def test_standard_passes(self):
        report = validate_basis(standard_basis(2))
        assert report.passed
        assert report.max_trace_deviation <= 1e-15
        assert report.max_gram_deviation <= 1e-15

    def test_doubled_element_fails(self):
        elements = standard_basis(2).elements.copy()
        elements[0] *= 2.0
        # Tr((2F)^dagger (2F)) = 4, so the Gram deviation is 3.
        report = validate_basis(elements)
        assert not report.passed
        assert report.max_gram_deviation == pytest.approx(3.0, abs=1e-12)

    def test_identity_element_fails_trace(self):
        d = 3
        elements = standard_basis(d).elements.copy()
        elements[0] = np.eye(d) / np.sqrt(d)
        report = validate_basis(elements)
        assert not report.passed
        assert report.max_trace_deviation == pytest.approx(np.sqrt(d), abs=1e-12)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            validate_basis(np.zeros((3, 2, 3)))


class TestOperatorBasis:
    def test_rejects_wrong_count(self):
        with pytest.raises(ShapeMismatch):
            OperatorBasis(dim=2, elements=standard_basis(2).elements[:2])

    def test_rejects_invalid_elements(self):
        elements = standard_basis(2).elements.copy()
        elements[1] *= 0.5
        with pytest.raises(ShapeMismatch):
            OperatorBasis(dim=2, elements=elements)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_expansion_completeness(self, d):
        rng = np.random.default_rng(100 + d)
        basis = standard_basis(d)
        for _ in range(20):
            k = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            coeffs = basis.expansion_coefficients(k)
            rebuilt = basis.reconstruct(complex(np.trace(k)), coeffs)
            assert np.max(np.abs(rebuilt - k)) <= 1e-12 * max(1.0, np.abs(k).max())

    def test_expansion_of_hermitian_traceless_is_real_on_hermitian_basis(self):
        rng = np.random.default_rng(105)
        basis = standard_basis(3)
        h = random_hermitian(3, rng)
        h -= np.trace(h) / 3 * np.eye(3)
        coeffs = basis.expansion_coefficients(h)
        assert np.max(np.abs(coeffs.imag)) <= 1e-12
