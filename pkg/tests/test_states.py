import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.errors import DimensionError, InvalidInputError, NotHermitianError
from app.schemas import INFINITE, BlochVector, DensityMatrix, Ensemble
from app.services import state_service
from app.services.state_service import binary_entropy
from app.utils import linalg, sampling
from app.utils.linalg import Subsystem

PLUS = np.array([1.0, 1.0]) / np.sqrt(2.0)


class TestDensityMatrix:
    def test_rejects_wrong_trace(self):
        with pytest.raises(InvalidInputError, match="trace"):
            DensityMatrix(mat=np.eye(2))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(InvalidInputError, match="negative"):
            DensityMatrix(mat=np.diag([1.5, -0.5]))

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            DensityMatrix(mat=[[0.5, 0.3], [0.0, 0.5]])

    def test_matrix_is_read_only(self, mixed2):
        with pytest.raises(ValueError):
            mixed2.mat[0, 0] = 1.0


class TestEnsemble:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(InvalidInputError, match="sum"):
            Ensemble(probs=(0.5, 0.4), states=[[1, 0], [0, 1]])

    def test_negative_probability(self):
        with pytest.raises(InvalidInputError, match="non-negative"):
            Ensemble(probs=(1.5, -0.5), states=[[1, 0], [0, 1]])

    def test_state_norm_names_index(self):
        with pytest.raises(InvalidInputError, match="state 1"):
            Ensemble(probs=(0.5, 0.5), states=[[1, 0], [1, 1]])

    def test_count_mismatch(self):
        with pytest.raises(DimensionError):
            Ensemble(probs=(1.0,), states=[[1, 0], [0, 1]])


def test_ensemble_to_density_examples(mm2):
    assert np.allclose(state_service.ensemble_to_density(mm2).mat, np.eye(2) / 2)
    single = Ensemble(probs=(1.0,), states=[[1.0, 0.0]])
    assert np.allclose(state_service.ensemble_to_density(single).mat, [[1, 0], [0, 0]])
    nonorthogonal = Ensemble(probs=(0.5, 0.5), states=[[1.0, 0.0], PLUS])
    assert np.allclose(state_service.ensemble_to_density(nonorthogonal).mat, [[0.75, 0.25], [0.25, 0.25]])


def test_purify_maximally_mixed_gives_bell_state(mm2):
    purified = state_service.purify(mm2)
    assert purified.dims == (2, 2)
    assert np.allclose(purified.vector, np.array([1, 0, 0, 1]) / np.sqrt(2))
    reduced = linalg.partial_trace(purified.projector(), purified.dims, Subsystem.FIRST)
    assert np.allclose(reduced, np.eye(2) / 2)


def test_purify_single_state_has_unit_reference():
    purified = state_service.purify(Ensemble(probs=(1.0,), states=[PLUS]))
    assert purified.ref_dim == 1
    assert np.allclose(purified.vector, PLUS)


def test_reference_state_examples(mm2):
    assert np.allclose(state_service.reference_state(mm2).mat, np.eye(2) / 2)
    e = Ensemble(probs=(0.5, 0.5), states=[[1.0, 0.0], PLUS])
    off = 0.5 / np.sqrt(2)
    assert np.allclose(state_service.reference_state(e).mat, [[0.5, off], [off, 0.5]])


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=4), st.integers(2, 4))
def test_reference_state_is_reduction_of_purification(seed, n, d):
    rng = sampling.rng_for(seed)
    e = Ensemble(
        probs=tuple(sampling.random_simplex(rng, n)),
        states=np.stack([sampling.haar_vector(rng, d) for _ in range(n)]),
    )
    purified = state_service.purify(e)
    reduced = linalg.partial_trace(purified.projector(), purified.dims, Subsystem.SECOND)
    rho_ref = state_service.reference_state(e)
    assert np.max(np.abs(reduced - rho_ref.mat)) <= 1e-10
    system = linalg.partial_trace(purified.projector(), purified.dims, Subsystem.FIRST)
    assert np.allclose(system, state_service.ensemble_to_density(e).mat, atol=1e-9)
    assert abs(
        state_service.von_neumann_entropy(rho_ref)
        - state_service.von_neumann_entropy(state_service.ensemble_to_density(e))
    ) <= 1e-9


class TestEntropy:
    def test_pure_state(self, pure0):
        assert state_service.von_neumann_entropy(pure0) == pytest.approx(0.0, abs=1e-12)

    def test_maximally_mixed_qubit(self, mixed2):
        assert state_service.von_neumann_entropy(mixed2) == pytest.approx(1.0, abs=1e-9)

    def test_bloch_length_half(self):
        rho = state_service.bloch_to_density((0.0, 0.3, 0.4))
        assert state_service.von_neumann_entropy(rho) == pytest.approx(binary_entropy(0.75), abs=1e-9)
        assert state_service.von_neumann_entropy(rho) == pytest.approx(0.811278, abs=1e-6)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=5))
    def test_bounds_and_unitary_invariance(self, seed, d):
        rng = sampling.rng_for(seed)
        rho = DensityMatrix(mat=sampling.random_density(rng, d))
        u = sampling.haar_unitary(rng, d)
        rotated = DensityMatrix(mat=u @ rho.mat @ np.conj(u).T)
        s = state_service.von_neumann_entropy(rho)
        assert -1e-10 <= s <= np.log2(d) + 1e-9
        assert abs(s - state_service.von_neumann_entropy(rotated)) <= 1e-9


class TestRelativeEntropy:
    def test_self_is_zero(self, rng):
        rho = DensityMatrix(mat=sampling.random_density(rng, 3))
        assert state_service.relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-9)

    def test_disjoint_supports_are_infinite(self, pure0):
        one = DensityMatrix(mat=[[0.0, 0.0], [0.0, 1.0]])
        assert state_service.relative_entropy(pure0, one) == INFINITE

    def test_classical_case(self, mixed2):
        skewed = DensityMatrix(mat=np.diag([0.75, 0.25]))
        expected = 0.5 * np.log2(0.5 / 0.75) + 0.5 * np.log2(0.5 / 0.25)
        assert state_service.relative_entropy(mixed2, skewed) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.207519, abs=1e-6)

    def test_pure_against_full_rank_is_finite(self, pure0, mixed2):
        assert state_service.relative_entropy(pure0, mixed2) == pytest.approx(1.0, abs=1e-12)

    def test_dimension_mismatch(self, mixed2):
        with pytest.raises(DimensionError):
            state_service.relative_entropy(mixed2, state_service.maximally_mixed(3))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=2, max_value=4))
    def test_klein_inequality(self, seed, d):
        rng = sampling.rng_for(seed)
        r1 = DensityMatrix(mat=sampling.random_density(rng, d))
        r2 = DensityMatrix(mat=sampling.random_density(rng, d))
        assert state_service.relative_entropy(r1, r2) >= -1e-9


class TestBloch:
    def test_examples(self):
        assert np.allclose(state_service.bloch_to_density((0, 0, 0)).mat, np.eye(2) / 2)
        assert np.allclose(state_service.bloch_to_density((0, 0, 1)).mat, [[1, 0], [0, 0]])

    def test_too_long(self):
        with pytest.raises(InvalidInputError):
            BlochVector(a=(1.0, 1.0, 0.0))

    def test_density_to_bloch_requires_qubit(self):
        with pytest.raises(DimensionError):
            state_service.density_to_bloch(state_service.maximally_mixed(3))

    @given(
        st.tuples(*[st.floats(min_value=-1.0, max_value=1.0) for _ in range(3)]).filter(
            lambda a: np.linalg.norm(a) <= 1.0
        )
    )
    def test_round_trip(self, a):
        back = state_service.density_to_bloch(state_service.bloch_to_density(a))
        assert np.allclose(back.a, a, atol=1e-12)


def test_spectral_ensemble_reproduces_state(rng):
    rho = DensityMatrix(mat=sampling.random_density(rng, 3, rank=2))
    e = state_service.spectral_ensemble(rho)
    assert e.size == 2
    assert np.allclose(state_service.ensemble_to_density(e).mat, rho.mat, atol=1e-10)


def test_binary_entropy_endpoints():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)
