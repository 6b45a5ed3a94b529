import numpy as np
import pytest

from cplab import (
    DensityMatrix,
    GKSGenerator,
    Superoperator,
    apply_generator,
    choi_matrix,
    evolution_map,
    is_completely_positive,
    positivity_preserving_sampled,
    standard_basis,
    superoperator_of,
    tensor_extension,
)
from cplab.errors import InvalidState, NegativeTime, ShapeMismatch, ZeroVector
from cplab.linalg import fro_norm, matrix_exp, unvec, vec

from helpers import (
    random_density,
    random_generator,
    random_hermitian,
    random_psd,
    tensor_square_superop,
    transpose_superop,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SMINUS = (SX - 1j * SY) / 2.0


def _null_generator(d=2):
    n = d * d - 1
    return GKSGenerator(
        dim=d, hamiltonian=np.zeros((d, d)), coeff=np.zeros((n, n)), basis=standard_basis(d)
    )


class TestEvolutionMap:
    def test_time_zero_is_identity(self):
        g = random_generator(2, np.random.default_rng(0))
        np.testing.assert_array_equal(evolution_map(g, 0.0).matrix, np.eye(4))

    def test_null_generator_any_time(self):
        np.testing.assert_array_equal(evolution_map(_null_generator(), 2.7).matrix, np.eye(4))

    def test_semigroup_law(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            g = random_generator(int(rng.choice([2, 3])), rng)
            s, t = rng.uniform(0, 1, size=2)
            lhs = evolution_map(g, s).matrix @ evolution_map(g, t).matrix
            rhs = evolution_map(g, s + t).matrix
            assert fro_norm(lhs - rhs) <= 1e-9

    def test_negative_time_rejected(self):
        with pytest.raises(NegativeTime):
            evolution_map(_null_generator(), -0.1)

    def test_trace_and_hermiticity_preserved_under_evolution(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            d = int(rng.choice([2, 3]))
            n = d * d - 1
            coeff = random_hermitian(n, rng)
            g = random_generator(d, rng, coeff=coeff / fro_norm(coeff))
            rho = random_density(d, rng)
            for t in (0.05, 0.7, 5.0):
                out = evolution_map(g, t).apply(rho)
                assert abs(np.trace(out) - 1.0) <= 1e-9
                assert fro_norm(out - out.conj().T) <= 1e-9

    def test_preservation_is_relative_for_strong_amplification(self):
        # A strongly non-CP generator amplifies states exponentially; trace
        # and Hermiticity errors then scale with the output norm.
        rng = np.random.default_rng(4)
        g = random_generator(3, rng, coeff=8.0 * random_hermitian(8, rng))
        rho = random_density(3, rng)
        out = evolution_map(g, 5.0).apply(rho)
        scale = max(1.0, fro_norm(out))
        assert abs(np.trace(out) - 1.0) <= 1e-9 * scale
        assert fro_norm(out - out.conj().T) <= 1e-9 * scale

    def test_continuity_at_zero(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            d = int(rng.choice([2, 3]))
            g = random_generator(d, rng)
            s = superoperator_of(g)
            rho = random_density(d, rng)
            diff = evolution_map(g, 1e-6).apply(rho) - rho
            trace_norm = np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2)))
            assert trace_norm <= 1e-4 * (1.0 + fro_norm(s.matrix))


class TestTensorExtension:
    def test_null_generator(self):
        ext = tensor_extension(_null_generator())
        np.testing.assert_array_equal(ext.matrix, np.zeros((16, 16)))

    def test_product_state_rule(self):
        rng = np.random.default_rng(10)
        for d in (2, 3):
            g = random_generator(d, rng)
            rho_a = random_density(d, rng)
            rho_b = random_density(d, rng)
            lhs = tensor_extension(g).apply(np.kron(rho_a, rho_b))
            rhs = np.kron(apply_generator(g, rho_a), rho_b) + np.kron(
                rho_a, apply_generator(g, rho_b)
            )
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_factorized_evolution_as_superoperators(self):
        rng = np.random.default_rng(11)
        for d in (2, 3):
            g = random_generator(d, rng)
            single = superoperator_of(g).matrix
            for t in (0.1, 0.6):
                lhs = matrix_exp(t * tensor_extension(g).matrix)
                rhs = tensor_square_superop(matrix_exp(t * single), d)
                assert fro_norm(lhs - rhs) <= 1e-9

    def test_product_state_evolution_factorizes(self):
        rng = np.random.default_rng(12)
        d = 2
        g = random_generator(d, rng)
        rho_a = random_density(d, rng)
        rho_b = random_density(d, rng)
        t = 0.4
        propagator = matrix_exp(t * tensor_extension(g).matrix)
        lhs = unvec(propagator @ vec(np.kron(rho_a, rho_b)), d * d)
        gamma = evolution_map(g, t)
        rhs = np.kron(gamma.apply(rho_a), gamma.apply(rho_b))
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)


class TestChoiMatrix:
    def test_identity_map(self):
        ident = Superoperator(dim=2, matrix=np.eye(4, dtype=complex))
        eigs = np.linalg.eigvalsh(choi_matrix(ident).matrix)
        np.testing.assert_allclose(eigs, [0.0, 0.0, 0.0, 2.0], atol=1e-14)

    def test_transpose_map(self):
        tau = Superoperator(dim=2, matrix=transpose_superop(2))
        choi = choi_matrix(tau)
        # Oracle: enumerate the images of the four matrix units directly.
        oracle = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                unit = np.zeros((2, 2), dtype=complex)
                unit[i, j] = 1.0
                oracle += np.kron(unit, unit.T)
        np.testing.assert_allclose(choi.matrix, oracle, atol=1e-15)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(choi.matrix), [-1.0, 1.0, 1.0, 1.0], atol=1e-14
        )

    def test_reshuffle_identity(self):
        # Independent oracle: the Choi matrix is a fixed reshuffle of the
        # superoperator matrix.
        rng = np.random.default_rng(20)
        d = 3
        s = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        choi = choi_matrix(Superoperator(dim=d, matrix=s)).matrix
        s4 = s.reshape(d, d, d, d)
        oracle = s4.transpose(3, 1, 2, 0).reshape(d * d, d * d)
        np.testing.assert_allclose(choi, oracle, atol=1e-14)

    def test_cp_generator_has_psd_choi(self):
        rng = np.random.default_rng(21)
        g = random_generator(2, rng, coeff=random_psd(3, rng))
        propagator = evolution_map(g, 0.3)
        choi = choi_matrix(propagator)
        assert choi.min_eigenvalue() >= -1e-9 * max(1.0, fro_norm(choi.matrix))


class TestIsCompletelyPositive:
    def test_depolarizing_is_cp(self):
        g = GKSGenerator(
            dim=2, hamiltonian=np.zeros((2, 2)), coeff=np.eye(3), basis=standard_basis(2)
        )
        verdict = is_completely_positive(g)
        assert verdict.is_cp
        assert verdict.min_coeff_eigenvalue == pytest.approx(1.0)
        assert verdict.min_choi_eigenvalue >= -verdict.tolerance

    def test_negative_direction_is_not_cp(self):
        g = GKSGenerator(
            dim=2,
            hamiltonian=np.zeros((2, 2)),
            coeff=np.diag([1.0, 1.0, -1.0]),
            basis=standard_basis(2),
        )
        verdict = is_completely_positive(g)
        assert not verdict.is_cp
        assert verdict.min_coeff_eigenvalue == pytest.approx(-1.0)
        assert verdict.min_choi_eigenvalue < -verdict.tolerance

    def test_lowering_operator_boundary_case(self):
        from cplab import LindbladGenerator, lindblad_to_gks

        lind = LindbladGenerator(dim=2, hamiltonian=np.zeros((2, 2)), jump_ops=(SMINUS,))
        g = lindblad_to_gks(lind, standard_basis(2))
        verdict = is_completely_positive(g)
        assert verdict.is_cp
        # Constructed coefficient matrix has eigenvalues {0, 0, 1}.
        assert verdict.min_coeff_eigenvalue == pytest.approx(0.0, abs=1e-10)

    def test_equivalence_on_random_batch(self):
        rng = np.random.default_rng(30)
        for _ in range(15):
            d = 2
            n = d * d - 1
            coeff = random_psd(n, rng) if rng.random() < 0.5 else random_hermitian(n, rng)
            g = random_generator(d, rng, coeff=coeff)
            verdict = is_completely_positive(g)
            assert verdict.is_cp == (np.linalg.eigvalsh(g.coeff)[0] >= -1e-9)

    def test_rejects_bad_time_samples(self):
        g = _null_generator()
        with pytest.raises(NegativeTime):
            is_completely_positive(g, t_samples=())
        with pytest.raises(NegativeTime):
            is_completely_positive(g, t_samples=(-1.0,))


class TestPositivitySampling:
    def test_identity_map(self):
        ident = Superoperator(dim=3, matrix=np.eye(9, dtype=complex))
        report = positivity_preserving_sampled(ident, n=50, seed=5)
        assert report.min_eigenvalue >= -1e-14
        assert report.num_samples == 50

    def test_double_transpose_preserves_positivity(self):
        tau_pair = Superoperator(dim=4, matrix=tensor_square_superop(transpose_superop(2), 2))
        report = positivity_preserving_sampled(tau_pair, n=200, seed=6)
        assert report.min_eigenvalue >= -1e-12

    def test_include_witness_state_finds_negativity(self):
        from cplab import construct_witness

        rng = np.random.default_rng(7)
        g = GKSGenerator(
            dim=2,
            hamiltonian=np.zeros((2, 2)),
            coeff=np.diag([1.0, 1.0, -1.0]),
            basis=standard_basis(2),
        )
        candidate = construct_witness(g, rng=rng)
        t = 1e-3
        propagator = Superoperator(dim=4, matrix=matrix_exp(t * tensor_extension(g).matrix))
        report = positivity_preserving_sampled(propagator, n=10, seed=8, include=[candidate.psi])
        assert report.min_eigenvalue < -1e-9
        np.testing.assert_allclose(
            report.worst_input, candidate.psi / np.linalg.norm(candidate.psi), atol=1e-12
        )

    def test_rejects_bad_sample_count(self):
        ident = Superoperator(dim=2, matrix=np.eye(4, dtype=complex))
        with pytest.raises(ValueError):
            positivity_preserving_sampled(ident, n=0)


class TestDensityMatrix:
    def test_valid_state(self):
        rng = np.random.default_rng(40)
        rho = random_density(3, rng)
        state = DensityMatrix(dim=3, matrix=rho)
        assert state.dim == 3

    def test_from_pure_normalizes(self):
        state = DensityMatrix.from_pure([2.0, 0.0])
        np.testing.assert_allclose(state.matrix, [[1.0, 0.0], [0.0, 0.0]])

    def test_rejects_zero_vector(self):
        with pytest.raises(ZeroVector):
            DensityMatrix.from_pure([0.0, 0.0])

    def test_rejects_wrong_trace(self):
        with pytest.raises(InvalidState):
            DensityMatrix(dim=2, matrix=np.eye(2))

    def test_rejects_negative_state(self):
        with pytest.raises(InvalidState):
            DensityMatrix(dim=2, matrix=np.diag([1.5, -0.5]))
