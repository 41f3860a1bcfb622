"""
The random-vector reference model, the Marchenko-Pastur law and distances
between eigenvalue distributions.
"""
from functools import partial
from typing import NamedTuple

import jax
import jax.numpy as jnp
import numpy as np
import scipy.integrate
import scipy.stats

from gramrecur.gram import default_zero_tol, gram_from_vectors, gram_spectrum
from gramrecur.numerics import _positive_int
from gramrecur.utils import EmptySample, InvalidArgument

ALGORITHMS = ("threefry2x32", "rbg", "unsafe_rbg")
QUAD_TOL = 1e-11


class SeededSampler(NamedTuple):
    """Deterministic jax.random stream: same seed, algorithm and path, same bits."""

    seed: int
    algorithm: str = "threefry2x32"
    path: tuple = ()

    def key(self):
        if not 0 <= self.seed < 2**64:
            raise InvalidArgument(f"seed={self.seed} must be an unsigned 64-bit int")
        if self.algorithm not in ALGORITHMS:
            raise InvalidArgument(f"algorithm={self.algorithm} not in {ALGORITHMS}")
        key = jax.random.key(self.seed >> 32, impl=self.algorithm)
        key = jax.random.fold_in(key, self.seed & 0xFFFFFFFF)
        for i in self.path:
            key = jax.random.fold_in(key, i)
        return key

    def child(self, i):
        """An independent sub-stream, e.g. one per trial or per sweep cell."""
        return self._replace(path=self.path + (int(i),))


class MPLaw(NamedTuple):
    """Marchenko-Pastur law with aspect ratio tau = K / N."""

    tau: float

    @property
    def lower(self):
        return (1 - np.sqrt(self.tau)) ** 2

    @property
    def upper(self):
        return (1 + np.sqrt(self.tau)) ** 2


def _check_law(law):
    if not law.tau > 0:
        raise InvalidArgument(f"tau={law.tau} must be positive")
    return law


def mp_support(law: MPLaw):
    _check_law(law)
    return law.lower, law.upper


@partial(jax.jit, static_argnames=("N", "shape"))
def _normal_unit_vectors(key, N, shape):
    z = jax.random.normal(key, shape + (2, N), dtype=jnp.float64)
    psi = z[..., 0, :] + 1j * z[..., 1, :]
    return psi / jnp.linalg.norm(psi, axis=-1, keepdims=True)


def random_unit_vector(N, rng: SeededSampler):
    """Uniform on the unit sphere of C^N (normalized complex Gaussian)."""
    return _normal_unit_vectors(rng.key(), _positive_int("N", N), ())


def random_unit_vectors(N, K, rng: SeededSampler):
    """K independent uniform unit vectors as a (K, N) array."""
    N, K = _positive_int("N", N), _positive_int("K", K)
    return _normal_unit_vectors(rng.key(), N, (K,))


def random_gram_spectrum(N, K, rng: SeededSampler):
    return gram_spectrum(gram_from_vectors(random_unit_vectors(N, K, rng)))


def mp_density(law: MPLaw, t):
    """Continuous part of the MP law; the atom at 0 is reported by mp_atom."""
    tau = _check_law(law).tau
    t = np.asarray(t, dtype=float)
    inside = 4 * tau * t - (t + tau - 1) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        density = np.where(
            (t > 0) & (inside > 0),
            np.sqrt(np.maximum(inside, 0.0)) / (2 * np.pi * tau * t),
            0.0,
        )
    return float(density) if density.ndim == 0 else density


def mp_atom(law: MPLaw):
    tau = _check_law(law).tau
    return max(0.0, (tau - 1) / tau)


def _edge_integrand(law, power=0):
    # t = lower + u^2 removes the t^{-1/2} divergence at the lower edge (tau = 1)
    a = law.lower

    def g(u):
        t = a + u * u
        return 2 * u * t**power * mp_density(law, t)

    return g


def _continuous_mass(law, ts):
    """Integral of the density from the lower edge to each t in sorted `ts`."""
    a, b = law.lower, law.upper
    us = np.sqrt(np.clip(ts, a, b) - a)
    g = _edge_integrand(law)
    pieces = np.zeros_like(us)
    prev = 0.0
    for i, u in enumerate(us):
        if u > prev:
            pieces[i] = scipy.integrate.quad(
                g, prev, u, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200
            )[0]
            prev = u
    return np.cumsum(pieces)


def mp_cdf(law: MPLaw, t):
    """Atom (for t >= 0) plus adaptive quadrature of the density up to t."""
    _check_law(law)
    t = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t)
    order = np.argsort(flat)
    values = np.empty_like(flat)
    values[order] = _continuous_mass(law, flat[order])
    values = np.where(flat >= 0, values + mp_atom(law), 0.0)
    values = np.minimum(values, 1.0)
    return float(values[0]) if t.ndim == 0 else values


def mp_moment(law: MPLaw, k):
    """Integral of t^k against the full law (atom included)."""
    _check_law(law)
    atom = mp_atom(law) if k == 0 else 0.0
    u_max = np.sqrt(law.upper - law.lower)
    g = _edge_integrand(law, power=k)
    mass = scipy.integrate.quad(
        g, 0.0, u_max, epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200
    )[0]
    return atom + mass


def _reference(ref):
    """(cdf, atom mass at 0, support) of an MP or frozen scipy reference."""
    if isinstance(ref, MPLaw):
        return partial(mp_cdf, ref), mp_atom(ref), (0.0, ref.upper)
    if hasattr(ref, "cdf"):
        support = (float(ref.ppf(1e-12)), float(ref.ppf(1 - 1e-12)))
        return ref.cdf, 0.0, support
    return None


def _nonempty(x, name):
    x = np.sort(np.asarray(x, dtype=float).ravel())
    if x.size == 0:
        raise EmptySample(f"{name} must not be empty")
    return x


def _snap_zeros(s, zero_tol):
    if not zero_tol > 0:
        raise InvalidArgument(f"zero_tol={zero_tol} must be positive")
    return np.where(np.abs(s) < zero_tol, 0.0, s)


def _ks_one_sample(s, cdf, atom):
    xs = np.unique(s)
    F = np.asarray(cdf(xs))
    F_left = F - atom * (xs == 0)
    right = np.searchsorted(s, xs, side="right") / s.size
    left = np.searchsorted(s, xs, side="left") / s.size
    return float(max(np.max(np.abs(right - F)), np.max(np.abs(left - F_left))))


def _w1_one_sample(s, cdf, atom, support, points=4097):
    lo, hi = min(s[0], support[0]), max(s[-1], support[1])
    grid = np.union1d(np.linspace(lo, hi, points), s)
    F = np.asarray(cdf(grid))
    F_left = F - atom * (grid == 0)
    # the empirical CDF is constant on each grid interval
    emp = np.searchsorted(s, grid[:-1], side="right") / s.size
    start = np.abs(emp - F[:-1])
    end = np.abs(emp - F_left[1:])
    return float(np.sum(0.5 * (start + end) * np.diff(grid)))


def distribution_distance(s, ref, metric="ks", zero_tol=None):
    """KS or W1 distance of a spectrum to an MPLaw, a frozen scipy law or a sample.

    Against a law with an atom at 0, eigenvalues below `zero_tol` (default
    1e-8 K) are round-off zeros and are counted in the atom.
    """
    s = _nonempty(s, "spectrum")
    reference = _reference(ref)
    if reference is None:
        other = _nonempty(ref, "reference sample")
        if metric == "ks":
            return float(scipy.stats.ks_2samp(s, other).statistic)
        if metric == "w1":
            return float(scipy.stats.wasserstein_distance(s, other))
    else:
        cdf, atom, support = reference
        if atom > 0:
            tol = default_zero_tol(s.size) if zero_tol is None else zero_tol
            s = _snap_zeros(s, tol)
        if metric == "ks":
            return _ks_one_sample(s, cdf, atom)
        if metric == "w1":
            return _w1_one_sample(s, cdf, atom, support)
    raise InvalidArgument(f"metric={metric} not found")
