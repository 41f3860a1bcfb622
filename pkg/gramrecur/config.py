"""
Experiment configuration: a flat `key = value` text format, command-line
overrides and sweep grids.

A numeric value holding commas (`tau = 0.5, 1, 1.5`) turns its key into a
sweep axis; all axes are combined as a Cartesian product. String and bool
values are parsed whole.
"""
import itertools
import typing
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from gramrecur.utils import ConfigError

KINDS = (
    "baker-spectrum",
    "top-spectrum",
    "random-spectrum",
    "mp-curve",
    "classical-returns",
    "symbol-demo",
    "compare",
)
FORMATS = ("csv", "json", "svg")
TOP_VARIANTS = ("printed", "rotation")


class ExperimentConfig(NamedTuple):
    kind: str = "baker-spectrum"
    N: int = 500
    j: float = 100.0
    tau: float = 1.0
    k: float = 1.5
    p: float = 1.0
    site_a: Optional[int] = None
    site_b: Optional[int] = None
    theta: float = 1.0
    phi: float = 1.0
    bins: int = 50
    upper: Optional[float] = None
    zero_tol: Optional[float] = None
    delta: float = 0.1
    seed: int = 0
    out: str = "results"
    formats: str = "csv json"
    cell_bits: int = 6
    steps: int = 10_000_000
    hitting_bits: int = 10
    trials: int = 10_000
    cap: int = 1_000_000_000
    top_variant: str = "printed"
    symbols: str = "1 2 2 1 3 4 1"
    curve_points: int = 451
    record_timings: bool = False

    @property
    def dimension(self):
        """Hilbert space dimension: 2j + 1 for the kicked top, N otherwise."""
        if self.kind == "top-spectrum":
            return int(round(2 * self.j)) + 1
        return self.N

    @property
    def K(self):
        return int(round(self.tau * self.dimension))

    @property
    def site(self):
        a = self.N // 4 if self.site_a is None else self.site_a
        b = self.N // 2 if self.site_b is None else self.site_b
        return a, b

    @property
    def format_set(self):
        return set(self.formats.split())


FIELD_TYPES = typing.get_type_hints(ExperimentConfig)

GRIDS = {
    "baker-figure": [
        {"N": N, "tau": tau} for N in (500, 1000, 1500) for tau in (0.5, 1.0, 1.5)
    ],
    "top-figure": [
        {"j": 100.0, "k": k, "p": p, "tau": tau}
        for k, p in ((1.5, 1.0), (6.5, 1.5))
        for tau in (0.5, 1.0)
    ],
}


def _base_type(field):
    kind = FIELD_TYPES[field]
    args = [a for a in typing.get_args(kind) if a is not type(None)]
    return (args[0], True) if args else (kind, False)


def _sweepable(field):
    return field in FIELD_TYPES and _base_type(field)[0] in (int, float)


def _parse_int(field, raw):
    try:
        return int(raw)
    except ValueError:
        value = float(raw)
        if not value.is_integer():
            raise ConfigError(field, f"expected an integer, got {raw!r}")
        return int(value)


def parse_value(field, raw):
    """Convert one raw string to the type declared on ExperimentConfig."""
    if field not in FIELD_TYPES:
        raise ConfigError(field, "unknown configuration key")
    kind, optional = _base_type(field)
    raw = raw.strip()
    if optional and raw.lower() in ("none", "null", ""):
        return None
    try:
        if kind is bool:
            if raw.lower() not in ("true", "false"):
                raise ValueError(raw)
            return raw.lower() == "true"
        if kind is int:
            return _parse_int(field, raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ConfigError(field, f"cannot parse {raw!r} as {kind.__name__}") from None
    return raw


def format_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def _normalize_key(key):
    return key.strip().replace("-", "_")


def parse_assignment(text):
    """`key=value` -> (key, raw value)."""
    key, sep, raw = text.partition("=")
    if not sep:
        raise ConfigError(text.strip() or "<empty>", "expected key=value")
    key = _normalize_key(key)
    if key not in FIELD_TYPES:
        raise ConfigError(key, "unknown configuration key")
    return key, raw.strip()


def parse_config_text(text):
    """Ordered {key: raw value} from `key = value` lines; `#` starts a comment."""
    raw = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, value = parse_assignment(line)
            raw[key] = value
    return raw


def read_config_file(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}") from e
    return parse_config_text(text)


def format_config(config: ExperimentConfig):
    return "".join(f"{k} = {format_value(v)}\n" for k, v in config._asdict().items())


def config_from_dict(values, base=None):
    """Apply typed values (e.g. a report's config echo) on top of `base`."""
    base = ExperimentConfig() if base is None else base
    unknown = set(values) - set(FIELD_TYPES)
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    config = base._replace(**values)
    validate(config)
    return config


def expand(raw, base=None):
    """Every configuration of the grid spanned by comma-separated numeric values."""
    base = ExperimentConfig() if base is None else base
    keys = list(raw)
    axes = []
    for key in keys:
        values = raw[key].split(",") if _sweepable(key) else [raw[key]]
        axes.append([parse_value(key, v) for v in values])
    combos = itertools.product(*axes)
    configs = [base._replace(**dict(zip(keys, combo))) for combo in combos]
    for config in configs:
        validate(config)
    return configs


def apply_grid(configs, name):
    """Cross a list of configurations with one of the named figure layouts."""
    if name not in GRIDS:
        raise ConfigError("grid", f"grid={name} not found, choose from {sorted(GRIDS)}")
    cells = [c._replace(**cell) for c in configs for cell in GRIDS[name]]
    for config in cells:
        validate(config)
    return cells


def _require(field, ok, message):
    if not ok:
        raise ConfigError(field, message)


def validate(config: ExperimentConfig):
    """Raise ConfigError naming the first field that no experiment could accept."""
    c = config
    _require("kind", c.kind in KINDS, f"kind={c.kind} not in {KINDS}")
    _require("tau", np.isfinite(c.tau) and c.tau > 0, f"tau={c.tau} must be positive")
    if c.kind in ("baker-spectrum", "compare"):
        _require("N", c.N >= 2 and c.N % 2 == 0, f"N={c.N} must be even and >= 2")
    else:
        _require("N", c.N >= 1, f"N={c.N} must be positive")
    doubled = 2 * c.j
    _require(
        "j",
        doubled >= 1 and abs(doubled - round(doubled)) < 1e-12,
        f"j={c.j} must be a positive half-integer",
    )
    if c.kind in ("baker-spectrum", "top-spectrum", "random-spectrum", "compare"):
        _require("tau", c.K >= 1, f"K=round(tau*N)={c.K} must be at least 1")
    a, b = c.site
    _require("site_a", 0 <= a < c.N, f"site_a={a} outside [0, {c.N})")
    _require("site_b", 0 <= b < c.N, f"site_b={b} outside [0, {c.N})")
    _require("theta", 0 <= c.theta <= np.pi, f"theta={c.theta} outside [0, pi]")
    _require("phi", 0 <= c.phi < 2 * np.pi, f"phi={c.phi} outside [0, 2pi)")
    _require("bins", c.bins >= 1, f"bins={c.bins} must be positive")
    _require("upper", c.upper is None or c.upper > 0, f"upper={c.upper} not positive")
    _require(
        "zero_tol",
        c.zero_tol is None or c.zero_tol > 0,
        f"zero_tol={c.zero_tol} must be positive",
    )
    _require("delta", c.delta > 0, f"delta={c.delta} must be positive")
    _require("seed", 0 <= c.seed < 2**64, f"seed={c.seed} must fit in 64 unsigned bits")
    _require("out", bool(c.out), "output directory must not be empty")
    unknown = c.format_set - set(FORMATS)
    _require("formats", not unknown, f"unknown formats {sorted(unknown)}")
    _require(
        "cell_bits", 0 <= c.cell_bits <= 64, f"cell_bits={c.cell_bits} out of range"
    )
    _require(
        "hitting_bits",
        0 <= c.hitting_bits <= 64,
        f"hitting_bits={c.hitting_bits} not in [0, 64]",
    )
    _require("steps", c.steps >= 1, f"steps={c.steps} must be positive")
    _require("trials", c.trials >= 1, f"trials={c.trials} must be positive")
    _require("cap", c.cap >= 1, f"cap={c.cap} must be positive")
    _require(
        "top_variant",
        c.top_variant in TOP_VARIANTS,
        f"top_variant={c.top_variant} not in {TOP_VARIANTS}",
    )
    _require("symbols", bool(c.symbols.split()), "symbol sequence must not be empty")
    _require(
        "curve_points", c.curve_points >= 2, f"curve_points={c.curve_points} < 2"
    )
    return config
