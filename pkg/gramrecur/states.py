"""
Initial states: Harper-ground-state coherent states on the discretized torus
and SU(2) coherent states on the sphere.
"""
from functools import partial
from typing import NamedTuple

import jax
import jax.numpy as jnp
from jax.scipy.special import gammaln

from gramrecur.numerics import _dft_matrix, _positive_int
from gramrecur.quantum_maps import _magnetic_numbers, two_j
from gramrecur.utils import InvalidArgument, as_state


class TorusSite(NamedTuple):
    """Lattice centre (q0, p0) = (a / N, b / N)."""

    a: int
    b: int


class SphereDirection(NamedTuple):
    theta: float
    phi: float


def harper_operator(N):
    """H = 2 - cos(2πQ_N) - cos(2πP_N), with cos(2πP_N) taken through F_N."""
    N = _positive_int("N", N)
    if N < 2:
        raise InvalidArgument(f"N={N} must be at least 2")
    return _harper_operator(N)


@partial(jax.jit, static_argnames="N")
def _harper_operator(N):
    F = _dft_matrix(N)
    cos_q = jnp.cos(2 * jnp.pi * jnp.arange(N) / N)
    cos_p = (F * cos_q[None, :]) @ F.conj().T
    H = 2 * jnp.eye(N) - jnp.diag(cos_q) - cos_p
    return (H + H.conj().T) / 2


@jax.jit
def _ground_state(H):
    _, V = jnp.linalg.eigh(H)
    v = V[:, 0]
    peak = v[jnp.argmax(jnp.abs(v))]
    v = v * (jnp.conj(peak) / jnp.abs(peak))
    return v / jnp.linalg.norm(v)


def harper_ground_state(N):
    """Normalized ground state of the Harper operator, largest component real > 0."""
    return _ground_state(harper_operator(N))


def _check_site(site, N):
    a, b = site
    if not (0 <= a < N and 0 <= b < N):
        raise InvalidArgument(f"site={tuple(site)} outside the {N}x{N} lattice")
    return int(a), int(b)


@jax.jit
def _translate(psi, a, b):
    N = psi.shape[0]
    m = jnp.arange(N)
    boost = jnp.exp(2j * jnp.pi * ((b * m) % N) / N)
    return boost * jnp.roll(psi, a)


def translate_state(psi, site: TorusSite):
    """(T psi)_m = exp(2πi b m / N) psi_{(m - a) mod N}."""
    psi = as_state(psi)
    a, b = _check_site(site, psi.shape[0])
    return _translate(psi, a, b)


def coherent_state(N, site: TorusSite):
    return translate_state(harper_ground_state(N), site)


def spin_coherent_state(j, direction: SphereDirection):
    """SU(2) coherent state pointing along (theta, phi), descending-m basis."""
    theta, phi = direction
    if not 0 <= theta <= jnp.pi:
        raise InvalidArgument(f"theta={theta} outside [0, pi]")
    if not 0 <= phi < 2 * jnp.pi:
        raise InvalidArgument(f"phi={phi} outside [0, 2pi)")
    return _spin_coherent_state(two_j(j), float(theta), float(phi))


@partial(jax.jit, static_argnames="doubled")
def _spin_coherent_state(doubled, theta, phi):
    j = doubled / 2.0
    m = _magnetic_numbers(doubled)
    log_binom = gammaln(doubled + 1.0) - gammaln(j - m + 1) - gammaln(j + m + 1)
    c = (
        jnp.exp(0.5 * log_binom)
        * jnp.power(jnp.cos(theta / 2), j + m)
        * jnp.power(jnp.sin(theta / 2), j - m)
        * jnp.exp(1j * (j - m) * phi)
    )
    return c / jnp.linalg.norm(c)
