import jax.numpy as jnp
import numpy as np
import pytest

from gramrecur.numerics import (
    dft_matrix,
    evolve_autocorrelations,
    evolve_orbit,
    forward_backward_error,
    hermiticity_defect,
    hermitian_eigenvalues,
    hermitian_evolution,
    unitarity_defect,
)
from gramrecur.quantum_maps import BakerParams, baker_unitary, spin_operators
from gramrecur.states import TorusSite, coherent_state
from gramrecur.utils import InvalidArgument


@pytest.fixture
def baker128():
    U = baker_unitary(BakerParams(128))
    psi0 = coherent_state(128, TorusSite(32, 64))
    return U, psi0


def test_dft_small():
    assert jnp.allclose(dft_matrix(1), jnp.array([[1.0]]))
    expected = jnp.array([[1, 1], [1, -1]]) / jnp.sqrt(2)
    assert jnp.allclose(dft_matrix(2), expected, atol=1e-15)


@pytest.mark.parametrize("M", [3, 16, 255, 1024])
def test_dft_unitary(M):
    assert unitarity_defect(dft_matrix(M)) < 1e-12


def test_dft_16_against_matmul():
    F = np.asarray(dft_matrix(16))
    assert np.max(np.abs(F.conj().T @ F - np.eye(16))) < 1e-14


@pytest.mark.parametrize("M", [0, -2, 2.5])
def test_dft_invalid(M):
    with pytest.raises(InvalidArgument):
        dft_matrix(M)


def test_hermitian_eigenvalues():
    assert jnp.allclose(hermitian_eigenvalues(jnp.eye(4)), jnp.ones(4))
    values = hermitian_eigenvalues(jnp.diag(jnp.array([3.0, 1.0, 2.0])))
    assert jnp.allclose(values, jnp.array([1.0, 2.0, 3.0]))


def test_hermitian_eigenvalues_trace_and_permutation():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(20, 20)) + 1j * rng.normal(size=(20, 20))
    H = (A + A.conj().T) / 2
    values = np.asarray(hermitian_eigenvalues(H))
    assert np.all(np.diff(values) >= 0)
    assert abs(values.sum() - np.trace(H).real) < 1e-9 * 20

    P = np.eye(20)[rng.permutation(20)]
    permuted = np.asarray(hermitian_eigenvalues(P @ H @ P.T))
    assert np.max(np.abs(permuted - values)) < 1e-10


def test_hermitian_eigenvalues_rejects_non_hermitian():
    A = jnp.array([[0.0, 1.0], [0.0, 0.0]])
    assert hermiticity_defect(A) == 1.0
    with pytest.raises(InvalidArgument, match="defect"):
        hermitian_eigenvalues(A)
    with pytest.raises(InvalidArgument):
        hermitian_evolution(A, 1.0)


def test_hermitian_evolution_zero_generator():
    U = hermitian_evolution(jnp.zeros((3, 3)), 0.7)
    assert jnp.allclose(U, jnp.eye(3))


def test_hermitian_evolution_half_spin_rotation():
    _, Jy, _ = spin_operators(0.5)
    U = hermitian_evolution(Jy, np.pi)
    assert jnp.allclose(U, jnp.array([[0, -1], [1, 0]]), atol=1e-14)
    e1 = jnp.array([1.0, 0.0])
    assert jnp.allclose(U @ e1, jnp.array([0.0, 1.0]), atol=1e-14)


def test_hermitian_evolution_eigenvectors():
    Jx, _, _ = spin_operators(3)
    w, V = np.linalg.eigh(np.asarray(Jx))
    angle = 0.37
    U = np.asarray(hermitian_evolution(Jx, angle))
    for lam, v in zip(w, V.T):
        assert np.max(np.abs(U @ v - np.exp(-1j * angle * lam) * v)) < 1e-12


def test_autocorrelations_trivial():
    psi = jnp.array([1.0, 0.0, 0.0])
    assert jnp.allclose(evolve_autocorrelations(jnp.eye(3), psi, 1), jnp.ones(1))
    assert jnp.allclose(evolve_autocorrelations(jnp.eye(3), psi, 5), jnp.ones(5))


def test_autocorrelations_baker(baker128):
    U, psi0 = baker128
    c = np.asarray(evolve_autocorrelations(U, psi0, 64))
    assert c.shape == (64,)
    assert abs(c[0] - 1) < 1e-12
    assert np.all(np.abs(c) <= 1 + 1e-12)


def test_autocorrelations_match_orbit(baker128):
    U, psi0 = baker128
    orbit = np.asarray(evolve_orbit(U, psi0, 3 * 128))
    norms = np.linalg.norm(orbit, axis=1)
    assert np.max(np.abs(norms - 1)) < 1e-10
    c = np.asarray(evolve_autocorrelations(U, psi0, 3 * 128))
    assert np.allclose(orbit.conj() @ np.asarray(psi0), c.conj(), atol=1e-12)


def test_dimension_mismatch():
    with pytest.raises(InvalidArgument, match="dimension"):
        evolve_autocorrelations(jnp.eye(3), jnp.ones(4) / 2, 2)
    with pytest.raises(InvalidArgument):
        evolve_autocorrelations(jnp.eye(3), jnp.ones(3) / jnp.sqrt(3), 0)


def test_forward_backward_stability():
    U = baker_unitary(BakerParams(500))
    psi0 = coherent_state(500, TorusSite(125, 250))
    assert forward_backward_error(U, psi0, 500) < 1e-9
