import numpy as np
import pytest

from qlandauer.linalg import (
    DensityMatrix,
    entropy_log,
    expm_i_hermitian,
    hermitian_eig,
    kron,
    partial_trace,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


def random_density(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    return v


class TestKron:
    def test_identity_factors(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))

    def test_block_structure(self):
        rng = np.random.default_rng(0)
        m = rng.standard_normal((3, 3))
        out = kron(np.diag([2.0, -1.0]), m)
        np.testing.assert_allclose(out[:3, :3], 2.0 * m)
        np.testing.assert_allclose(out[3:, 3:], -1.0 * m)
        np.testing.assert_allclose(out[:3, 3:], 0.0)

    def test_sigma_x_tensor_projector_by_hand(self):
        # enumerate the 4x4: sigma_x (x) |0><0| maps (down,0) -> (up,0) only
        proj0 = np.diag([1.0, 0.0]).astype(complex)
        op = kron(SIGMA_X, proj0)
        expected = np.zeros((4, 4), dtype=complex)
        expected[2, 0] = 1.0  # |up,0><down,0|
        expected[0, 2] = 1.0  # |down,0><up,0|
        np.testing.assert_array_equal(op, expected)
        down0 = np.array([1, 0, 0, 0], dtype=complex)
        up0 = np.array([0, 0, 1, 0], dtype=complex)
        np.testing.assert_array_equal(op @ down0, up0)


class TestPartialTrace:
    def test_product_state_recovers_factors(self):
        rng = np.random.default_rng(1)
        rho_a = random_density(rng, 2)
        rho_b = random_density(rng, 3)
        joint = DensityMatrix(kron(rho_a.matrix, rho_b.matrix))
        np.testing.assert_allclose(
            partial_trace(joint, 2, 3, "A").matrix, rho_a.matrix, atol=1e-12)
        np.testing.assert_allclose(
            partial_trace(joint, 2, 3, "B").matrix, rho_b.matrix, atol=1e-12)

    def test_bell_state_reduces_to_maximally_mixed(self):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        rho = DensityMatrix(np.outer(bell, bell.conj()))
        reduced = partial_trace(rho, 2, 2, "A")
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)

    def test_random_pure_product_keep_b(self):
        rng = np.random.default_rng(2)
        a = random_pure(rng, 2)
        b = random_pure(rng, 3)
        joint = DensityMatrix(np.outer(np.kron(a, b), np.kron(a, b).conj()))
        expected = np.outer(b, b.conj())
        np.testing.assert_allclose(
            partial_trace(joint, 2, 3, "B").matrix, expected, atol=1e-12)

    def test_trace_preserved(self):
        rng = np.random.default_rng(3)
        rho = random_density(rng, 6)
        reduced = partial_trace(rho, 2, 3, "A")
        assert abs(np.trace(reduced.matrix) - np.trace(rho.matrix)) < 1e-12

    def test_dimension_mismatch_rejected(self):
        rng = np.random.default_rng(4)
        rho = random_density(rng, 6)
        with pytest.raises(ValueError, match="dimension"):
            partial_trace(rho, 2, 4, "A")

    def test_bad_keep_rejected(self):
        rng = np.random.default_rng(5)
        with pytest.raises(ValueError, match="keep"):
            partial_trace(random_density(rng, 4), 2, 2, "C")


class TestHermitianEig:
    def test_diagonal_input(self):
        spectrum = hermitian_eig(np.diag([1.0, 2.0, 3.0]).astype(complex))
        np.testing.assert_allclose(spectrum.eigenvalues, [1.0, 2.0, 3.0])
        np.testing.assert_allclose(np.abs(spectrum.eigenvectors), np.eye(3), atol=1e-12)

    def test_pauli_x_spectrum(self):
        spectrum = hermitian_eig(SIGMA_X)
        np.testing.assert_allclose(spectrum.eigenvalues, [-1.0, 1.0], atol=1e-14)

    def test_coupling_block_spectrum(self):
        g = 0.37
        spectrum = hermitian_eig(np.array([[0, g], [g, 0]], dtype=complex))
        np.testing.assert_allclose(spectrum.eigenvalues, [-g, g], atol=1e-14)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))

    @pytest.mark.parametrize("dim", [2, 17, 64, 128])
    def test_reconstruction_and_orthonormality(self, dim):
        rng = np.random.default_rng(dim)
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h = (g + g.conj().T) / 2
        spectrum = hermitian_eig(h)
        assert np.linalg.norm(spectrum.reconstruct() - h, 2) < 1e-10 * max(1, np.linalg.norm(h, 2))
        v = spectrum.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(dim))) < 1e-10
        assert np.all(np.diff(spectrum.eigenvalues) >= 0)


class TestExpmIHermitian:
    def test_zero_generator(self):
        np.testing.assert_allclose(
            expm_i_hermitian(np.zeros((3, 3), dtype=complex), 5.0), np.eye(3), atol=1e-14)

    def test_pauli_rotation_closed_form(self):
        u = expm_i_hermitian(SIGMA_X * (np.pi / 2), 1.0)
        np.testing.assert_allclose(u, -1j * SIGMA_X, atol=1e-10)

    @pytest.mark.parametrize("dim", [2, 8, 31])
    def test_unitarity(self, dim):
        rng = np.random.default_rng(10 + dim)
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        h = (g + g.conj().T) / 2
        u = expm_i_hermitian(h, 0.83)
        assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) < 1e-10

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            expm_i_hermitian(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)


class TestEntropyLog:
    def test_maximally_mixed_qubit(self):
        out = entropy_log(DensityMatrix(np.eye(2, dtype=complex) / 2))
        np.testing.assert_allclose(out, np.diag([np.log(0.5)] * 2), atol=1e-12)

    def test_diagonal_case(self):
        rho = DensityMatrix(np.diag([0.9, 0.1]).astype(complex))
        np.testing.assert_allclose(
            entropy_log(rho), np.diag([np.log(0.9), np.log(0.1)]), atol=1e-12)

    def test_pure_state_support_convention(self):
        # zero eigenvalue excluded, so Tr[rho log rho] vanishes for pure states
        rho = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
        log_rho = entropy_log(rho)
        assert abs(np.trace(rho.matrix @ log_rho)) < 1e-12


class TestDensityMatrixValidation:
    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex))

    def test_wrong_trace_rejected(self):
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(np.eye(2, dtype=complex))

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(ValueError, match="negative eigenvalue"):
            DensityMatrix(np.diag([1.5, -0.5]).astype(complex))

    def test_valid_state_is_frozen(self):
        rho = DensityMatrix(np.eye(2, dtype=complex) / 2)
        assert rho.dim == 2
        assert not rho.matrix.flags.writeable
