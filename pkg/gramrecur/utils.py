from typing import Any, NamedTuple

import jax.numpy as jnp


class GramRecurError(Exception):
    """Base class of all errors raised by gramrecur."""


class InvalidArgument(GramRecurError, ValueError):
    pass


class NumericalFailure(GramRecurError, ArithmeticError):
    pass


class StreamExhausted(GramRecurError, IndexError):
    pass


class EmptySample(InvalidArgument):
    """A statistic was requested over no data."""


class ConfigError(InvalidArgument):
    """Invalid experiment configuration; `field` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class Histogram(NamedTuple):
    edges: Any
    masses: Any


class SpectrumSummary(NamedTuple):
    trace: float
    min_eig: float
    zero_count: int
    near_one_mass: float
    zero_tol: float
    delta: float


def as_state(psi):
    psi = jnp.asarray(psi, dtype=jnp.complex128)
    if psi.ndim != 1:
        raise InvalidArgument(f"state must be a vector, got shape={psi.shape}")
    return psi


def as_square(A):
    A = jnp.asarray(A, dtype=jnp.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument(f"operator must be square, got shape={A.shape}")
    return A


def check_dims(A, psi):
    if A.shape[1] != psi.shape[0]:
        raise InvalidArgument(
            f"dimension mismatch: operator is {A.shape}, state has {psi.shape[0]}"
        )