"""
The two quantum evolutions: the quantized baker map on C^N (N even) and the
kicked top on the spin-j representation space C^{2j+1}.
"""
from functools import partial
from typing import NamedTuple

import jax
import jax.numpy as jnp
import jax.scipy.linalg as jlinalg

from gramrecur.numerics import _dft_matrix, _positive_int, hermitian_evolution
from gramrecur.utils import InvalidArgument


class BakerParams(NamedTuple):
    N: int


class TopParams(NamedTuple):
    """Kicked top U = exp(-i k Jz^2 / 2j) exp(-i p Jy) on spin j (N = 2j + 1)."""

    j: float
    k: float
    p: float

    @property
    def N(self):
        return two_j(self.j) + 1


def two_j(j):
    """2j as an integer; raises unless j is a positive half-integer."""
    doubled = round(2 * float(j))
    if doubled < 1 or abs(2 * float(j) - doubled) > 1e-12:
        raise InvalidArgument(f"j={j} must be a positive half-integer")
    return doubled


def _even_dimension(N):
    N = _positive_int("N", N)
    if N % 2:
        raise InvalidArgument(f"N={N} must be even for the baker map")
    return N


def baker_unitary(params: BakerParams):
    """U = F_N diag(F_{N/2}^{-1}, F_{N/2}^{-1})."""
    return _baker_unitary(_even_dimension(params.N))


@partial(jax.jit, static_argnames="N")
def _baker_unitary(N):
    F_half_inv = _dft_matrix(N // 2).conj().T
    return _dft_matrix(N) @ jlinalg.block_diag(F_half_inv, F_half_inv)


def position_operator(N):
    """Q_N |m> = (m / N) |m>."""
    N = _positive_int("N", N)
    return jnp.diag(jnp.arange(N) / N).astype(jnp.complex128)


def momentum_operator(N):
    """P_N = F_N Q_N F_N^{-1}."""
    F = _dft_matrix(_positive_int("N", N))
    return F @ position_operator(N) @ F.conj().T


def magnetic_numbers(j):
    """m = j, j-1, ..., -j; the basis order of every spin matrix here."""
    return _magnetic_numbers(two_j(j))


def _magnetic_numbers(doubled):
    return doubled / 2.0 - jnp.arange(doubled + 1)


def spin_operators(j):
    """(Jx, Jy, Jz) for spin j in the |j, m> basis ordered by descending m."""
    return _spin_operators(two_j(j))


@partial(jax.jit, static_argnames="doubled")
def _spin_operators(doubled):
    j = doubled / 2.0
    m = _magnetic_numbers(doubled)
    # <m+1| J+ |m> sits one column right of the diagonal in descending order
    raising = jnp.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    Jp = jnp.diag(raising, k=1).astype(jnp.complex128)
    Jm = Jp.T
    Jx = (Jp + Jm) / 2
    Jy = (Jp - Jm) / 2j
    Jz = jnp.diag(m).astype(jnp.complex128)
    return Jx, Jy, Jz


def kicked_top_unitary(params: TopParams):
    doubled = two_j(params.j)
    _, Jy, _ = _spin_operators(doubled)
    rotation = hermitian_evolution(Jy, params.p)
    return _apply_torsion(rotation, params.k, doubled)


@partial(jax.jit, static_argnames="doubled")
def _apply_torsion(rotation, k, doubled):
    j = doubled / 2.0
    m = _magnetic_numbers(doubled)
    torsion = jnp.exp(-1j * k * m**2 / (2 * j))
    return torsion[:, None] * rotation
