import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.errors import DimensionError, InvalidInputError, NegativityError, NotHermitianError
from app.utils import linalg, sampling
from app.utils.linalg import Subsystem


def test_multiply_rejects_mismatched_shapes():
    with pytest.raises(DimensionError, match="2x3 by 2x2"):
        linalg.multiply(np.ones((2, 3)), np.ones((2, 2)))


def test_results_are_read_only():
    m = linalg.multiply(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        m[0, 0] = 5.0


def test_adjoint_conjugates_and_transposes():
    a = np.array([[1, 2j], [3, 4 - 1j]])
    assert np.allclose(linalg.adjoint(a), [[1, 3], [-2j, 4 + 1j]])


def test_as_matrix_rejects_non_finite_and_empty():
    with pytest.raises(InvalidInputError):
        linalg.as_matrix([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(DimensionError):
        linalg.as_matrix([[]])


def test_partial_trace_of_product(rng):
    a = sampling.random_density(rng, 2)
    b = sampling.random_density(rng, 3)
    ab = linalg.kron(a, b)
    assert np.allclose(linalg.partial_trace(ab, (2, 3), Subsystem.FIRST), b, atol=1e-12)
    assert np.allclose(linalg.partial_trace(ab, (2, 3), Subsystem.SECOND), a, atol=1e-12)


def test_partial_trace_is_linear(rng):
    a = sampling.complex_normal(rng, (6, 6))
    b = sampling.complex_normal(rng, (6, 6))
    combined = linalg.partial_trace(2.0 * a - 0.5j * b, (3, 2), Subsystem.SECOND)
    separate = 2.0 * linalg.partial_trace(a, (3, 2), Subsystem.SECOND) - 0.5j * linalg.partial_trace(
        b, (3, 2), Subsystem.SECOND
    )
    assert np.max(np.abs(combined - separate)) <= 1e-12


def test_partial_trace_rejects_wrong_dims():
    with pytest.raises(DimensionError):
        linalg.partial_trace(np.eye(4), (3, 2), Subsystem.FIRST)


def test_kron_is_associative(rng):
    a, b, c = (sampling.complex_normal(rng, (2, 2)) for _ in range(3))
    left = linalg.kron(linalg.kron(a, b), c)
    right = linalg.kron(a, linalg.kron(b, c))
    assert np.max(np.abs(left - right)) <= 1e-12


def test_hermitian_eig_reconstructs(rng):
    h = sampling.random_hermitian(rng, 5)
    values, vectors = linalg.hermitian_eig(h)
    assert np.all(np.diff(values) >= 0)
    assert np.allclose(vectors @ np.diag(values) @ np.conj(vectors).T, h, atol=1e-10)
    assert np.allclose(np.conj(vectors).T @ vectors, np.eye(5), atol=1e-10)


def test_hermitian_eig_unitarily_invariant(rng):
    h = sampling.random_hermitian(rng, 4)
    u = sampling.haar_unitary(rng, 4)
    rotated = u @ h @ np.conj(u).T
    assert np.allclose(linalg.eigvalsh(h), linalg.eigvalsh(rotated), atol=1e-9)


def test_non_hermitian_input_is_rejected():
    with pytest.raises(NotHermitianError) as info:
        linalg.hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert info.value.deviation > 0


def test_log_on_support_zero_on_kernel():
    log = linalg.log_on_support(np.diag([0.5, 0.5, 0.0]))
    assert np.allclose(log, np.diag([-1.0, -1.0, 0.0]))


def test_log_on_support_rejects_negative_eigenvalue():
    with pytest.raises(NegativityError) as info:
        linalg.log_on_support(np.diag([1.0, -0.5]))
    assert info.value.eigenvalue == pytest.approx(-0.5)


def test_support_projector():
    p = linalg.support_projector(np.diag([0.3, 0.0, 0.7]))
    assert np.allclose(p, np.diag([1.0, 0.0, 1.0]))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=5))
def test_log_trace_matches_log_eigenvalues(seed, d):
    rho = sampling.random_density(sampling.rng_for(seed), d)
    values = linalg.eigvalsh(rho)
    support = values > 1e-12
    assert abs(np.trace(linalg.log_on_support(rho)).real - np.sum(np.log2(values[support]))) <= 1e-10 * (1 + d)


def test_pauli_algebra(paulis):
    x, y, z = paulis
    assert np.allclose(x @ y, 1j * z)
    for p in paulis:
        assert np.allclose(p @ p, np.eye(2))
