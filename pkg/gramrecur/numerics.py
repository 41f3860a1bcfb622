"""
Dense complex linear algebra: Fourier matrices, Hermitian spectra,
spectral-calculus unitaries and orbit autocorrelations.

Operators are plain complex128 `jnp` arrays; their unitary / Hermitian tags are
checked through the defect functions below instead of being carried along.
"""
from functools import partial

import jax
import jax.numpy as jnp

from gramrecur.utils import InvalidArgument, as_square, as_state, check_dims

HERMITIAN_TOL = 1e-10


def _positive_int(name, value):
    if int(value) != value or value < 1:
        raise InvalidArgument(f"{name}={value} must be a positive integer")
    return int(value)


def dft_matrix(M):
    """Unitary DFT on C^M: entry (n, m) = exp(2πi nm / M) / sqrt(M)."""
    return _dft_matrix(_positive_int("M", M))


@partial(jax.jit, static_argnames="M")
def _dft_matrix(M):
    n = jnp.arange(M)
    # reduce nm mod M before scaling so the phase stays accurate for large M
    nm = jnp.outer(n, n) % M
    return jnp.exp(2j * jnp.pi * nm / M) / jnp.sqrt(M)


@jax.jit
def _hermiticity_defect(H):
    return jnp.max(jnp.abs(H - H.conj().T))


def hermiticity_defect(H):
    return float(_hermiticity_defect(as_square(H)))


@jax.jit
def _unitarity_defect(U):
    eye = jnp.eye(U.shape[0], dtype=U.dtype)
    return jnp.max(jnp.abs(U.conj().T @ U - eye))


def unitarity_defect(U):
    """max-entry magnitude of U†U - I."""
    return float(_unitarity_defect(as_square(U)))


def _require_hermitian(H, tol=HERMITIAN_TOL):
    H = as_square(H)
    defect = hermiticity_defect(H)
    if not defect <= tol:
        raise InvalidArgument(f"matrix is not Hermitian: defect={defect:.3e}")
    return H


def hermitian_eigenvalues(H):
    """All eigenvalues of a Hermitian matrix, with multiplicity, ascending."""
    H = _require_hermitian(H)
    return jnp.linalg.eigvalsh(H)


@jax.jit
def _spectral_exp(H, angle):
    w, V = jnp.linalg.eigh(H)
    return (V * jnp.exp(-1j * angle * w)[None, :]) @ V.conj().T


def hermitian_evolution(H, angle):
    """exp(-i angle H) via the eigendecomposition of H."""
    H = _require_hermitian(H)
    return _spectral_exp(H, jnp.asarray(angle, dtype=jnp.float64))


@partial(jax.jit, static_argnames="K")
def _autocorrelations(U, psi0, K):
    def body(phi, _):
        return U @ phi, jnp.vdot(psi0, phi)

    _, c = jax.lax.scan(body, psi0, None, length=K)
    return c


def evolve_autocorrelations(U, psi0, K):
    """c_n = <psi0|U^n psi0> for n = 0..K-1, by repeated application of U."""
    U, psi0 = as_square(U), as_state(psi0)
    check_dims(U, psi0)
    return _autocorrelations(U, psi0, _positive_int("K", K))


@partial(jax.jit, static_argnames="K")
def _orbit(U, psi0, K):
    def body(phi, _):
        return U @ phi, phi

    _, phis = jax.lax.scan(body, psi0, None, length=K)
    return phis


def evolve_orbit(U, psi0, K):
    """The explicit orbit psi0, U psi0, ..., U^{K-1} psi0 as a (K, N) array."""
    U, psi0 = as_square(U), as_state(psi0)
    check_dims(U, psi0)
    return _orbit(U, psi0, _positive_int("K", K))


@partial(jax.jit, static_argnames="K")
def _forward_backward(U, psi0, K):
    Udag = U.conj().T
    phi = jax.lax.fori_loop(0, K, lambda _, x: U @ x, psi0)
    phi = jax.lax.fori_loop(0, K, lambda _, x: Udag @ x, phi)
    return jnp.linalg.norm(phi - psi0)


def forward_backward_error(U, psi0, K):
    """||(U†)^K U^K psi0 - psi0||; stays at round-off level for unitary U."""
    U, psi0 = as_square(U), as_state(psi0)
    check_dims(U, psi0)
    return float(_forward_backward(U, psi0, _positive_int("K", K)))
