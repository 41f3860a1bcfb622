"""
Classical limits and return-time statistics.

The baker map is conjugate to the full shift on two symbols, so exact orbits
are run on bits: a `BitOrbit` keeps 53 bits of past (p) and a 64-bit window of
future (q) that is refilled from a seeded bit stream. Regions are dyadic
q-cylinders, whose membership is read off the leading future bits.
"""
from collections import Counter
from functools import partial
from typing import Any, NamedTuple

import jax
import jax.numpy as jnp
import numpy as np

from gramrecur.numerics import _positive_int
from gramrecur.randmat import SeededSampler
from gramrecur.utils import EmptySample, InvalidArgument, StreamExhausted

WINDOW_BITS = 64
COORD_BITS = 53
UNIT = 2.0**-COORD_BITS


class TorusPoint(NamedTuple):
    q: Any
    p: Any


class SpherePoint(NamedTuple):
    x: Any
    y: Any
    z: Any


class BitOrbit(NamedTuple):
    past: Any  # uint64, 53 bits, p = past * 2^-53
    future: Any  # uint64, next 64 symbols, leading bit first
    stream: Any  # uint8 symbols still to be shifted into the window
    position: Any


class DyadicCell(NamedTuple):
    """The q-cylinder of points whose binary expansion of q starts with `word`."""

    word: str

    @classmethod
    def zeros(cls, b):
        return cls("0" * b)

    @classmethod
    def isolated(cls, b):
        """1 0^{b-1}: a cylinder whose word cannot overlap a shift of itself."""
        return cls("1" + "0" * (b - 1)) if b else cls("")

    @property
    def measure(self):
        return 2.0 ** -len(self.word)

    def __call__(self, state):
        b = len(self.word)
        if b == 0:
            return jnp.bool_(True)
        target = jnp.uint64(int(self.word, 2))
        if isinstance(state, BitOrbit):
            return (state.future >> (WINDOW_BITS - b)) == target
        return jnp.floor(state.q * 2**b) == target


class ReturnSample(NamedTuple):
    measure: float
    times: Any


class HittingSample(NamedTuple):
    measure: float
    times: Any  # measure * hitting time
    censored: Any


def _check_cell(cell):
    if set(cell.word) - {"0", "1"} or len(cell.word) > WINDOW_BITS:
        raise InvalidArgument(f"word={cell.word!r} must be at most 64 binary digits")
    return cell


@jax.jit
def baker_step(pt: TorusPoint):
    """(q, p) -> (2q mod 1, p/2 + [2q]/2)."""
    q2 = 2 * pt.q
    bit = jnp.floor(q2)
    return TorusPoint(q2 - bit, pt.p / 2 + bit / 2)


@jax.jit
def baker_stretch(pt: TorusPoint):
    """|dq'/dq| of the baker map, 2 everywhere off the discontinuity."""
    return jnp.full_like(jnp.asarray(pt.q, dtype=jnp.float64), 2.0)


def _pack(bits):
    bits = bits.astype(jnp.uint64)
    shifts = jnp.arange(bits.shape[0] - 1, -1, -1, dtype=jnp.uint64)
    return jnp.sum(bits << shifts, dtype=jnp.uint64)


def bit_orbit(rng: SeededSampler, n_steps, start_word=""):
    """A uniformly random orbit whose q-expansion starts with `start_word`."""
    n_steps = int(n_steps)
    if n_steps < 0:
        raise InvalidArgument(f"n_steps={n_steps} must be nonnegative")
    if len(start_word) > WINDOW_BITS:
        raise InvalidArgument(f"start_word longer than {WINDOW_BITS} bits")
    total = COORD_BITS + WINDOW_BITS + n_steps
    bits = jax.random.bernoulli(rng.key(), 0.5, (total,)).astype(jnp.uint8)
    window = bits[COORD_BITS : COORD_BITS + WINDOW_BITS]
    if start_word:
        prefix = jnp.array([int(c) for c in start_word], dtype=jnp.uint8)
        window = window.at[: len(start_word)].set(prefix)
    return BitOrbit(
        past=_pack(bits[:COORD_BITS]),
        future=_pack(window),
        stream=bits[COORD_BITS + WINDOW_BITS :],
        position=jnp.int64(0),
    )


@jax.jit
def _shift(orbit: BitOrbit):
    leading = orbit.future >> (WINDOW_BITS - 1)
    past = (leading << (COORD_BITS - 1)) | (orbit.past >> 1)
    incoming = orbit.stream[orbit.position].astype(jnp.uint64)
    future = (orbit.future << 1) | incoming
    return BitOrbit(past, future, orbit.stream, orbit.position + 1)


def _remaining(orbit):
    return orbit.stream.shape[0] - int(orbit.position)


def bit_orbit_step(orbit: BitOrbit):
    """Shift one symbol from the future into the past."""
    if _remaining(orbit) < 1:
        raise StreamExhausted(f"bit stream exhausted at position={int(orbit.position)}")
    return _shift(orbit)


@jax.jit
def bit_orbit_point(orbit: BitOrbit):
    q = (orbit.future >> (WINDOW_BITS - COORD_BITS)).astype(jnp.float64) * UNIT
    p = orbit.past.astype(jnp.float64) * UNIT
    return TorusPoint(q, p)


@partial(jax.jit, static_argnames=("k", "p", "variant"))
def top_classical_step(pt: SpherePoint, k, p, variant="printed"):
    """Rotation about y by p followed by a torsion about z by k z'."""
    X = pt.x * jnp.cos(p) + pt.z * jnp.sin(p)
    Z = -pt.x * jnp.sin(p) + pt.z * jnp.cos(p)
    angle = k * Z
    c, s = jnp.cos(angle), jnp.sin(angle)
    if variant == "printed":
        return SpherePoint(X * c + pt.y * s, X * s - pt.y * c, Z)
    if variant == "rotation":
        return SpherePoint(X * c - pt.y * s, X * s + pt.y * c, Z)
    raise InvalidArgument(f"variant={variant} not found")


@partial(jax.jit, static_argnames=("step", "n"))
def iterate(step, start, n):
    """The orbit start, step(start), ..., n states after start (stacked pytree).

    Every state is stored, bit streams included; use the scans below for long
    bit orbits.
    """

    def body(state, _):
        state = step(state)
        return state, state

    _, states = jax.lax.scan(body, start, None, length=n)
    return jax.tree_util.tree_map(
        lambda s0, s: jnp.concatenate([jnp.asarray(s0)[None, ...], s]), start, states
    )


@partial(jax.jit, static_argnames=("step", "region", "n_steps"))
def _visits(step, region, start, n_steps):
    def body(state, _):
        state = step(state)
        return state, region(state)

    _, inside = jax.lax.scan(body, start, None, length=n_steps, unroll=8)
    return inside


def return_times(step, region, start, n_steps):
    """Gaps between successive visits to `region` along the orbit of `start`.

    Consecutive time indices inside the region give return time 1. Only
    returns completed within `n_steps` are reported.
    """
    n_steps = _positive_int("n_steps", n_steps)
    if not bool(region(start)):
        raise InvalidArgument("start point is not inside the region")
    if isinstance(start, BitOrbit) and _remaining(start) < n_steps:
        raise StreamExhausted(
            f"orbit holds {_remaining(start)} symbols, {n_steps} steps requested"
        )
    inside = np.asarray(_visits(step, region, start, n_steps))
    visits = np.concatenate([[0], np.flatnonzero(inside) + 1])
    if visits.size < 2:
        raise EmptySample(f"no return to the region within {n_steps} steps")
    return ReturnSample(float(region.measure), np.diff(visits))


def kac_returns(cell: DyadicCell, n_steps, rng: SeededSampler):
    """Return times to a dyadic cell along an exact bit orbit started inside it."""
    cell = _check_cell(cell)
    orbit = bit_orbit(rng, n_steps, start_word=cell.word)
    return return_times(_shift, cell, orbit, n_steps)


@partial(jax.jit, static_argnames=("cell", "cap"))
def _hitting_times(keys, cell, cap):
    def one(key):
        k_start, k_stream = jax.random.split(key)
        future = jax.random.bits(k_start, dtype=jnp.uint64)
        window = BitOrbit(jnp.uint64(0), future, None, 0)

        def cond(carry):
            n, _, hit = carry
            return jnp.logical_and(~hit, n < cap)

        def body(carry):
            n, future, _ = carry
            bit = jax.random.bits(jax.random.fold_in(k_stream, n), dtype=jnp.uint32) & 1
            future = (future << 1) | bit.astype(jnp.uint64)
            return n + 1, future, cell(window._replace(future=future))

        start = (jnp.int64(0), future, jnp.bool_(False))
        n, _, hit = jax.lax.while_loop(cond, body, start)
        return n, hit

    return jax.vmap(one)(keys)


@partial(jax.jit, static_argnames=("step", "region", "draw_start", "cap"))
def _stepped_hitting_times(keys, step, region, draw_start, cap):
    def one(key):
        def cond(carry):
            n, _, hit = carry
            return jnp.logical_and(~hit, n < cap)

        def body(carry):
            n, state, _ = carry
            state = step(state)
            return n + 1, state, jnp.asarray(region(state), dtype=bool)

        start = (jnp.int64(0), draw_start(key), jnp.bool_(False))
        n, _, hit = jax.lax.while_loop(cond, body, start)
        return n, hit

    return jax.vmap(one)(keys)


def uniform_torus_point(key):
    """A Lebesgue-uniform point of the unit torus."""
    kq, kp = jax.random.split(key)
    return TorusPoint(
        jax.random.uniform(kq, dtype=jnp.float64),
        jax.random.uniform(kp, dtype=jnp.float64),
    )


def hitting_experiment(
    cell: DyadicCell,
    trials,
    rng: SeededSampler,
    cap=10**9,
    step=None,
    draw_start=None,
):
    """Rescaled first hitting times mu(A) * tau_A(x) from uniformly random x.

    tau_A(x) = min{n >= 1 : T^n x in A}; trials still outside A after `cap`
    steps are flagged as censored.

    By default T is the baker shift run on exact bits. Any other map is
    passed as a traceable `step` together with `draw_start(key)`, which
    samples its invariant measure (`uniform_torus_point` for the baker map
    in float coordinates). A float baker orbit loses one bit per step, so
    only hitting times well below 53 steps are meaningful there.
    """
    cell = _check_cell(cell)
    trials, cap = _positive_int("trials", trials), _positive_int("cap", cap)
    keys = jax.random.split(rng.key(), trials)
    if step is None:
        n, hit = _hitting_times(keys, cell, cap)
    elif draw_start is None:
        raise InvalidArgument("a custom step needs draw_start to sample start points")
    else:
        n, hit = _stepped_hitting_times(keys, step, cell, draw_start, cap)
    n, hit = np.asarray(n), np.asarray(hit)
    return HittingSample(cell.measure, cell.measure * n, ~hit)


@partial(jax.jit, static_argnames=("n", "depth"))
def _square_indices(orbit, n, depth):
    def body(orbit, _):
        q_bits = orbit.future >> (WINDOW_BITS - depth)
        p_bits = orbit.past >> (COORD_BITS - depth)
        return _shift(orbit), (q_bits << depth) | p_bits

    _, squares = jax.lax.scan(body, orbit, None, length=n)
    return squares


def partition_frequencies(orbit: BitOrbit, n, depth=1):
    """Fraction of n orbit points in each dyadic square of side 2^-depth.

    Squares are numbered by the leading `depth` bits of q, then of p.
    """
    n = _positive_int("n", n)
    if not 1 <= depth <= 8:
        raise InvalidArgument(f"depth={depth} not in [1, 8]")
    if _remaining(orbit) < n:
        raise StreamExhausted(f"orbit holds {_remaining(orbit)} symbols, {n} requested")
    squares = np.asarray(_square_indices(orbit, n, depth)).astype(np.int64)
    return np.bincount(squares, minlength=4**depth) / n


def symbol_gram_spectrum(symbols):
    """Gram spectrum of a symbol sequence straight from the symbol counts."""
    symbols = list(symbols)
    if not symbols:
        raise InvalidArgument("symbol sequence must not be empty")
    counts = list(Counter(symbols).values())
    zeros = [0] * (len(symbols) - len(counts))
    return np.sort(np.asarray(counts + zeros, dtype=float))


def lyapunov_baker(orbit: BitOrbit, n):
    """Time average of log |dq'/dq| over n steps of the orbit."""
    n = _positive_int("n", n)
    if _remaining(orbit) < n:
        raise StreamExhausted(f"orbit holds {_remaining(orbit)} symbols, {n} requested")
    return float(_log_stretch_average(orbit, n))


@partial(jax.jit, static_argnames="n")
def _log_stretch_average(orbit, n):
    def body(orbit, _):
        return _shift(orbit), jnp.log(baker_stretch(bit_orbit_point(orbit)))

    _, logs = jax.lax.scan(body, orbit, None, length=n)
    return jnp.mean(logs)


def separation_slope(q0=0.1234567, p0=0.4321, delta=1e-10, n=20):
    """Fitted growth rate of log |q - q'| for two nearby float baker orbits."""
    n = _positive_int("n", n)
    start = TorusPoint(jnp.array([q0, q0 + delta]), jnp.array([p0, p0]))
    qs = np.asarray(iterate(baker_step, start, n).q)
    gap = np.abs(qs[:, 1] - qs[:, 0])
    gap = np.minimum(gap, 1 - gap)
    return float(np.polyfit(np.arange(n + 1), np.log(gap), 1)[0])


def top_orbit_norm_drift(pt: SpherePoint, k, p, n, variant="printed"):
    """max | |r_t|^2 - 1 | along n steps of the classical kicked top."""
    n = _positive_int("n", n)
    step = partial(top_classical_step, k=float(k), p=float(p), variant=variant)
    orbit = iterate(step, pt, n)
    norms = orbit.x**2 + orbit.y**2 + orbit.z**2
    return float(jnp.max(jnp.abs(norms - 1)))
