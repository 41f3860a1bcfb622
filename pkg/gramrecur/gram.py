"""
Gram matrices of vector sequences, their spectra and the empirical eigenvalue
distribution.

Histograms are normalized to total mass 1 (each of the K eigenvalues carries
1 / K) so that they can be laid over the Marchenko-Pastur density directly.
"""
import jax
import jax.numpy as jnp
import numpy as np

from gramrecur.numerics import hermitian_eigenvalues
from gramrecur.utils import (
    EmptySample,
    Histogram,
    InvalidArgument,
    NumericalFailure,
    SpectrumSummary,
)

NORM_TOL = 1e-10
PSD_TOL = 1e-8


def default_zero_tol(K):
    return PSD_TOL * K


def default_upper(tau):
    return (1 + np.sqrt(tau)) ** 2 + 0.5


@jax.jit
def _pairwise_overlaps(V):
    return V.conj() @ V.T


def gram_from_vectors(vs):
    """G_ij = <v_i|v_j> for a sequence of K normalized vectors (or a (K, N) array)."""
    if hasattr(vs, "shape"):
        V = jnp.asarray(vs, dtype=jnp.complex128)
    else:
        try:
            V = jnp.stack([jnp.asarray(v, dtype=jnp.complex128) for v in vs])
        except (ValueError, TypeError) as e:
            raise InvalidArgument(f"vectors must share one dimension: {e}") from e
    if V.ndim != 2 or V.shape[0] == 0:
        raise InvalidArgument(f"expected K >= 1 vectors, got shape={V.shape}")
    norms = jnp.linalg.norm(V, axis=1)
    worst = float(jnp.max(jnp.abs(norms - 1)))
    if worst > NORM_TOL:
        raise InvalidArgument(f"vectors must be normalized: max |norm - 1|={worst:.3e}")
    return _pairwise_overlaps(V)


@jax.jit
def _toeplitz_from_first_row(c):
    K = c.shape[0]
    lag = jnp.arange(K)[None, :] - jnp.arange(K)[:, None]
    upper = c[jnp.abs(lag)]
    return jnp.where(lag >= 0, upper, upper.conj())


def gram_from_autocorrelation(c):
    """Hermitian Toeplitz Gram matrix from its first row c_n = <phi_0|phi_n>."""
    c = jnp.asarray(c, dtype=jnp.complex128)
    if c.ndim != 1 or c.shape[0] == 0:
        raise InvalidArgument(f"autocorrelation must be a nonempty vector: {c.shape}")
    if abs(complex(c[0]) - 1) > NORM_TOL:
        raise InvalidArgument(f"c_0={complex(c[0])} must equal 1")
    largest = float(jnp.max(jnp.abs(c)))
    if largest > 1 + NORM_TOL:
        raise InvalidArgument(f"|c_n| must not exceed 1, got {largest}")
    return _toeplitz_from_first_row(c)


def gram_from_symbols(symbols):
    """0/1 Gram matrix of a symbol sequence (orthonormal vector per symbol)."""
    symbols = list(symbols)
    if not symbols:
        raise InvalidArgument("symbol sequence must not be empty")
    index = {}
    codes = np.array([index.setdefault(s, len(index)) for s in symbols])
    return jnp.asarray(codes[:, None] == codes[None, :], dtype=jnp.complex128)


def gram_matrix_defects(G):
    """(hermiticity, max |diag - 1|, negative part of the smallest eigenvalue)."""
    G = jnp.asarray(G)
    herm = float(jnp.max(jnp.abs(G - G.conj().T)))
    diag = float(jnp.max(jnp.abs(jnp.diag(G) - 1)))
    lowest = float(jnp.linalg.eigvalsh((G + G.conj().T) / 2)[0])
    return herm, diag, max(0.0, -lowest)


def gram_spectrum(G):
    """Sorted Gram eigenvalues; round-off negatives above -1e-8 K are set to 0."""
    values = np.asarray(hermitian_eigenvalues(G))
    K = values.shape[0]
    if values[0] < -PSD_TOL * K:
        raise NumericalFailure(
            f"Gram matrix is not positive semi-definite: min eigenvalue={values[0]:.3e}"
        )
    return np.maximum(values, 0.0)


def empirical_histogram(s, bins, upper):
    """Equal-width bins on [0, upper]; each eigenvalue carries mass 1 / K.

    Eigenvalues at or above `upper` are counted in the last bin.
    """
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        raise EmptySample("cannot histogram an empty spectrum")
    if int(bins) != bins or bins < 1:
        raise InvalidArgument(f"bins={bins} must be a positive integer")
    if not upper > 0:
        raise InvalidArgument(f"upper={upper} must be positive")
    # np.histogram closes the last bin on the right, so clipping to `upper`
    # sends every overflow eigenvalue there
    clipped = np.clip(s, 0.0, upper)
    counts, edges = np.histogram(clipped, bins=int(bins), range=(0.0, upper))
    return Histogram(edges, counts / s.size)


def spectrum_summary(s, zero_tol=None, delta=0.1):
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        raise EmptySample("cannot summarize an empty spectrum")
    zero_tol = default_zero_tol(s.size) if zero_tol is None else zero_tol
    if not (zero_tol > 0 and delta > 0):
        raise InvalidArgument(f"tolerances must be positive: {zero_tol=}, {delta=}")
    return SpectrumSummary(
        trace=float(s.sum()),
        min_eig=float(s.min()),
        zero_count=int(np.sum(s < zero_tol)),
        near_one_mass=float(np.mean(np.abs(s - 1) <= delta)),
        zero_tol=float(zero_tol),
        delta=float(delta),
    )

