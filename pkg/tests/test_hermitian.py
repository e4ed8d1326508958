import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qig.errors import NumericError, ValidationError
from qig.hermitian import (
    HermitianOperator,
    eigenbasis_elements,
    gibbs_weights,
    jacobi_eigh,
    spectral_decompose,
)
from qig.verify import random_hermitian


def test_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        HermitianOperator(np.array([[0, 1], [0, 0]]))


def test_rejects_non_square():
    with pytest.raises(ValidationError):
        HermitianOperator(np.zeros((2, 3)))


def test_symmetrises_within_tolerance():
    a = np.array([[1.0, 2.0 + 1e-14], [2.0, -1.0]])
    op = HermitianOperator(a)
    assert np.array_equal(op.entries, op.entries.conj().T)
    assert not op.entries.flags.writeable


@pytest.mark.parametrize("dim", [1, 2, 3, 8, 17, 64])
def test_jacobi_reconstructs(dim):
    a = random_hermitian(np.random.default_rng(dim), dim)
    w, v = jacobi_eigh(a)
    assert np.allclose(v.conj().T @ v, np.eye(dim), atol=1e-13)
    assert np.allclose((v * w) @ v.conj().T, a, atol=1e-12 * max(1, np.abs(a).max()))
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(a), atol=1e-12)


def test_jacobi_reports_non_convergence():
    a = random_hermitian(np.random.default_rng(0), 10)
    with pytest.raises(NumericError) as info:
        jacobi_eigh(a, max_sweeps=1)
    assert info.value.iterations == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=10 ** 6))
def test_decomposition_properties(dim, seed):
    a = random_hermitian(np.random.default_rng(seed), dim)
    d = spectral_decompose(HermitianOperator(a))
    assert np.all(np.diff(d.eigenvalues) <= 0)
    u = d.eigenvectors
    assert np.allclose(u @ np.diag(d.eigenvalues) @ u.conj().T, a, atol=1e-11)
    # phase convention: largest-magnitude component real and positive
    idx = np.argmax(np.abs(u), axis=0)
    lead = u[idx, np.arange(dim)]
    assert np.allclose(lead.imag, 0, atol=1e-14) and np.all(lead.real > 0)


def test_large_dimension_uses_library_solver():
    a = random_hermitian(np.random.default_rng(3), 80)
    d = spectral_decompose(HermitianOperator(a))
    assert d.source.dim == 80
    assert np.allclose(d.eigenvalues[::-1], np.linalg.eigvalsh(a), atol=1e-10)


def test_degeneracy_detection():
    d = spectral_decompose(HermitianOperator(np.diag([1.0, 1.0, -2.0])))
    assert d.degenerate
    assert d.is_degenerate_pair(0, 1) and not d.is_degenerate_pair(1, 2)
    assert d.degeneracy_mask().sum() == 5


def test_gibbs_weights_no_overflow():
    d = spectral_decompose(HermitianOperator(np.diag([800.0, 0.0, -800.0])))
    w = gibbs_weights(d)
    assert np.isclose(w.probabilities.sum(), 1.0)
    assert np.isclose(w.logZ, 800.0)


def test_eigenbasis_elements_diagonalise_source():
    a = HermitianOperator(random_hermitian(np.random.default_rng(7), 5))
    d = spectral_decompose(a)
    e = eigenbasis_elements(a, d)
    assert np.allclose(e, np.diag(d.eigenvalues), atol=1e-12)
