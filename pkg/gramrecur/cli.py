"""
The `gram-recur` command.

    gram-recur <kind> [--config FILE] [--set key=value]... [--jobs N]
                      [--seed U64] [--out DIR] [--grid NAME]

Exit codes: 0 success, 1 invalid configuration, 2 numerical failure,
3 I/O failure.
"""
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from contextlib import contextmanager
from pathlib import Path
from typing import Any, NamedTuple, Optional

import jax.numpy as jnp
import numpy as np
import pandas as pd
import plac
import scipy.stats
from tqdm import tqdm

from gramrecur.classical import (
    DyadicCell,
    SpherePoint,
    bit_orbit,
    hitting_experiment,
    kac_returns,
    lyapunov_baker,
    separation_slope,
    symbol_gram_spectrum,
    top_orbit_norm_drift,
)
from gramrecur.config import (
    GRIDS,
    KINDS,
    ExperimentConfig,
    apply_grid,
    expand,
    parse_assignment,
    read_config_file,
    validate,
)
from gramrecur.gram import (
    default_upper,
    empirical_histogram,
    gram_from_autocorrelation,
    gram_from_symbols,
    gram_spectrum,
    spectrum_summary,
)
from gramrecur.numerics import evolve_autocorrelations, unitarity_defect
from gramrecur.output import (
    save_df,
    write_histogram_csv,
    write_histogram_svg,
    write_json,
    write_spectrum_csv,
)
from gramrecur.quantum_maps import (
    BakerParams,
    TopParams,
    baker_unitary,
    kicked_top_unitary,
)
from gramrecur.randmat import (
    MPLaw,
    SeededSampler,
    distribution_distance,
    mp_atom,
    mp_density,
    mp_moment,
    mp_support,
    random_gram_spectrum,
)
from gramrecur.states import (
    SphereDirection,
    TorusSite,
    coherent_state,
    spin_coherent_state,
)
from gramrecur.utils import (
    ConfigError,
    EmptySample,
    GramRecurError,
    InvalidArgument,
    NumericalFailure,
    StreamExhausted,
)

GOLDEN = 0x9E3779B97F4A7C15
CLASSICAL_CHECK_STEPS = 10_000
HITTING_UPPER = 5.0


class Outcome(NamedTuple):
    summary: dict
    distances: dict
    spectrum: Any = None
    histogram: Any = None
    density: Any = None
    density_column: str = "mp_density_at_midpoint"
    histogram_name: str = "histogram"
    tables: Optional[dict] = None


class RunReport(NamedTuple):
    config: ExperimentConfig
    summary: dict
    histogram: Any
    distances: dict
    timings: dict
    seed: int
    rng_tag: str
    spectrum: Any = None
    files: tuple = ()

    def to_json(self):
        return {
            "config": self.config._asdict(),
            "summary": self.summary,
            "distances": self.distances,
            "timings": self.timings if self.config.record_timings else None,
            "seed": self.seed,
            "rng_tag": self.rng_tag,
        }


def log(msg):
    tqdm.write(msg)


@contextmanager
def timed(timings, name):
    start = time.perf_counter()
    yield
    timings[name] = 1e3 * (time.perf_counter() - start)


def _mp_result(config, s, extra_summary=None):
    law = MPLaw(config.tau)
    upper = config.upper or default_upper(config.tau)
    summary = spectrum_summary(s, config.zero_tol, config.delta)._asdict()
    summary.update(extra_summary or {})
    distances = {
        "ks_mp": distribution_distance(s, law, "ks", config.zero_tol),
        "w1_mp": distribution_distance(s, law, "w1", config.zero_tol),
    }
    return Outcome(
        summary=summary,
        distances=distances,
        spectrum=s,
        histogram=empirical_histogram(s, config.bins, upper),
        density=lambda t: mp_density(law, t),
    )


def _orbit_spectrum(config, U, psi0, timings):
    log(f"[{config.kind}] N={config.dimension} K={config.K}")
    with timed(timings, "autocorrelations"):
        c = evolve_autocorrelations(U, psi0, config.K)
        G = gram_from_autocorrelation(c)
    with timed(timings, "eigenvalues"):
        s = gram_spectrum(G)
    return _mp_result(config, s, {"unitarity_defect": unitarity_defect(U)})


def baker_spectrum(config, rng, timings):
    with timed(timings, "unitary"):
        U = baker_unitary(BakerParams(config.N))
        psi0 = coherent_state(config.N, TorusSite(*config.site))
    return _orbit_spectrum(config, U, psi0, timings)


def top_spectrum(config, rng, timings):
    direction = SphereDirection(config.theta, config.phi)
    with timed(timings, "unitary"):
        U = kicked_top_unitary(TopParams(config.j, config.k, config.p))
        psi0 = spin_coherent_state(config.j, direction)
    outcome = _orbit_spectrum(config, U, psi0, timings)
    start = SpherePoint(
        jnp.sin(config.theta) * jnp.cos(config.phi),
        jnp.sin(config.theta) * jnp.sin(config.phi),
        jnp.cos(config.theta),
    )
    outcome.summary["classical_norm_drift"] = top_orbit_norm_drift(
        start, config.k, config.p, CLASSICAL_CHECK_STEPS, config.top_variant
    )
    return outcome


def random_spectrum(config, rng, timings):
    log(f"[{config.kind}] N={config.N} K={config.K}")
    with timed(timings, "eigenvalues"):
        s = random_gram_spectrum(config.N, config.K, rng)
    return _mp_result(config, s)


def compare(config, rng, timings):
    """Baker orbit against K random vectors in the same dimension."""
    outcome = baker_spectrum(config, rng, timings)
    with timed(timings, "random"):
        r = random_gram_spectrum(config.N, config.K, rng)
    law = MPLaw(config.tau)
    outcome.distances.update(
        {
            "random_ks_mp": distribution_distance(r, law, "ks", config.zero_tol),
            "random_w1_mp": distribution_distance(r, law, "w1", config.zero_tol),
            "ks_baker_random": distribution_distance(outcome.spectrum, r, "ks"),
            "w1_baker_random": distribution_distance(outcome.spectrum, r, "w1"),
        }
    )
    random_df = pd.DataFrame({"index": np.arange(r.size), "eigenvalue": r})
    return outcome._replace(tables={"random_spectrum.csv": random_df})


def mp_curve(config, rng, timings):
    law = MPLaw(config.tau)
    upper = config.upper or default_upper(config.tau)
    ts = np.linspace(0.0, upper, config.curve_points)
    lower_edge, upper_edge = mp_support(law)
    summary = {
        "atom": mp_atom(law),
        "lower_edge": lower_edge,
        "upper_edge": upper_edge,
        "mass": mp_moment(law, 0),
        "mean": mp_moment(law, 1),
        "second_moment": mp_moment(law, 2),
    }
    curve = pd.DataFrame({"t": ts, "density": mp_density(law, ts)})
    return Outcome(summary=summary, distances={}, tables={"mp_curve.csv": curve})


def classical_returns(config, rng, timings):
    """Kac mean return time and the exponential hitting-time law on the baker shift."""
    cell = DyadicCell.zeros(config.cell_bits)
    target = DyadicCell.isolated(config.hitting_bits)
    log(f"[{config.kind}] steps={config.steps} cell={cell.word or '-'}")
    with timed(timings, "returns"):
        returns = kac_returns(cell, config.steps, rng.child(0))
    log(f"[{config.kind}] trials={config.trials} cell={target.word or '-'}")
    with timed(timings, "hitting"):
        hits = hitting_experiment(target, config.trials, rng.child(1), config.cap)
    completed = hits.times[~hits.censored]
    exp = scipy.stats.expon()
    orbit = bit_orbit(rng.child(2), CLASSICAL_CHECK_STEPS)
    summary = {
        "kac_cell": cell.word,
        "kac_expected": 1 / returns.measure,
        "kac_mean": float(np.mean(returns.times)),
        "kac_returns": int(returns.times.size),
        "hitting_cell": target.word,
        "hitting_mean": float(np.mean(completed)) if completed.size else None,
        "hitting_censored": int(hits.censored.sum()),
        "lyapunov": lyapunov_baker(orbit, CLASSICAL_CHECK_STEPS),
        "separation_slope": separation_slope(),
    }
    distances = {
        "ks_exp": distribution_distance(completed, exp, "ks"),
        "w1_exp": distribution_distance(completed, exp, "w1"),
    }
    tables = {
        "returns.csv": pd.DataFrame({"return_time": returns.times}),
        "hitting.csv": pd.DataFrame(
            {"rescaled_time": hits.times, "censored": hits.censored}
        ),
    }
    return Outcome(
        summary=summary,
        distances=distances,
        histogram=empirical_histogram(
            completed, config.bins, config.upper or HITTING_UPPER
        ),
        density=exp.pdf,
        density_column="exp_density_at_midpoint",
        histogram_name="hitting_histogram",
        tables=tables,
    )


def symbol_demo(config, rng, timings):
    """Gram spectrum of a symbol sequence, from counts and from the 0/1 matrix."""
    symbols = config.symbols.split()
    s = symbol_gram_spectrum(symbols)
    check = gram_spectrum(gram_from_symbols(symbols))
    summary = spectrum_summary(s, config.zero_tol, config.delta)._asdict()
    summary["spectrum"] = s.tolist()
    summary["eigensolver_deviation"] = float(np.max(np.abs(s - check)))
    upper = config.upper or float(s.max()) + 1
    return Outcome(
        summary=summary,
        distances={},
        spectrum=s,
        histogram=empirical_histogram(s, config.bins, upper),
    )


EXPERIMENTS = {
    "baker-spectrum": baker_spectrum,
    "top-spectrum": top_spectrum,
    "random-spectrum": random_spectrum,
    "mp-curve": mp_curve,
    "classical-returns": classical_returns,
    "symbol-demo": symbol_demo,
    "compare": compare,
}


def write_outputs(report: RunReport, outcome: Outcome):
    config = report.config
    out = Path(config.out)
    formats = config.format_set
    files = []
    if "csv" in formats:
        if outcome.spectrum is not None:
            files.append(write_spectrum_csv(out / "spectrum.csv", outcome.spectrum))
        if outcome.histogram is not None:
            files.append(
                write_histogram_csv(
                    out / f"{outcome.histogram_name}.csv",
                    outcome.histogram,
                    outcome.density,
                    outcome.density_column,
                )
            )
        for name, df in (outcome.tables or {}).items():
            files.append(save_df(df, out / name))
    if "json" in formats:
        files.append(write_json(out / "report.json", report.to_json()))
    if "svg" in formats and outcome.histogram is not None:
        xlabel = "eigenvalue" if outcome.spectrum is not None else "rescaled time"
        files.append(
            write_histogram_svg(
                out / f"{outcome.histogram_name}.svg",
                outcome.histogram,
                outcome.density,
                xlabel=xlabel,
                title=config.kind,
            )
        )
    for f in files:
        log(f"Saved data to {f}")
    return tuple(str(f) for f in files)


def run_experiment(config: ExperimentConfig):
    """Run one experiment, write its files and return the report."""
    validate(config)
    log(f"[STARTING EXPERIMENT] kind={config.kind} seed={config.seed}")
    rng = SeededSampler(config.seed)
    timings = {}
    with timed(timings, "total"):
        outcome = EXPERIMENTS[config.kind](config, rng, timings)
    report = RunReport(
        config=config,
        summary=outcome.summary,
        histogram=outcome.histogram,
        distances=outcome.distances,
        timings=timings,
        seed=config.seed,
        rng_tag=rng.algorithm,
        spectrum=outcome.spectrum,
    )
    return report._replace(files=write_outputs(report, outcome))


def cell_seed(seed, index):
    return seed ^ ((index * GOLDEN) % 2**64)


def _run_cell(config):
    try:
        return run_experiment(config), None
    except (GramRecurError, OSError) as e:
        return None, f"{type(e).__name__}: {e}"


def sweep(configs, jobs=1):
    """Run every cell (in parallel up to `jobs`) and index them in sweep.json.

    A failing cell is recorded in the index; the remaining cells still run.
    """
    configs = list(configs)
    if not configs:
        raise ConfigError("grid", "empty sweep grid")
    if int(jobs) < 1:
        raise ConfigError("jobs", f"jobs={jobs} must be positive")
    out = Path(configs[0].out)
    cells = [
        c._replace(seed=cell_seed(c.seed, i), out=str(out / f"cell-{i:03d}"))
        for i, c in enumerate(configs)
    ]
    results = [None] * len(cells)
    with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
        futures = {pool.submit(_run_cell, c): i for i, c in enumerate(cells)}
        for future in tqdm(as_completed(futures), total=len(cells), desc="sweep"):
            results[futures[future]] = future.result()
    index = []
    for i, (cell, (report, error)) in enumerate(zip(cells, results)):
        if error:
            log(f"[cell-{i:03d}] FAILED {error}")
        index.append(
            {
                "index": i,
                "out": cell.out,
                "seed": cell.seed,
                "status": "ok" if report else "error",
                "error": error,
                "config": cell._asdict(),
            }
        )
    path = write_json(out / "sweep.json", {"cells": index})
    log(f"Saved data to {path}")
    return [report for report, _ in results]


def reorder_arguments(argv):
    """Options first, then positionals, then every `--set` value.

    plac has no repeated options; the `--set` values become the trailing
    positional assignments of `main`.
    """
    options, positional, assignments = [], [], []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg == "--set":
            if i + 1 == len(argv):
                raise ConfigError("set", "--set needs a key=value argument")
            assignments.append(argv[i + 1])
            i += 1
        elif arg.startswith("--set="):
            assignments.append(arg[len("--set=") :])
        elif arg.startswith("-") and arg not in ("-h", "--help"):
            options.append(arg)
            if "=" not in arg and i + 1 < len(argv):
                options.append(argv[i + 1])
                i += 1
        else:
            positional.append(arg)
        i += 1
    return options + positional + assignments


@plac.pos("kind", "Experiment kind", choices=KINDS)
@plac.opt("config", "File of `key = value` lines", type=Path)
@plac.opt("jobs", "Sweep cells run in parallel", type=int)
@plac.opt("seed", "Unsigned 64-bit seed", type=int)
@plac.opt("out", "Output directory")
@plac.opt("grid", "Named figure grid to sweep", choices=sorted(GRIDS))
@plac.pos("assignments", "key=value overrides, given as --set key=value")
def main(kind, config=None, jobs=1, seed=None, out=None, grid=None, *assignments):
    raw = read_config_file(config) if config else {}
    for text in assignments:
        key, value = parse_assignment(text)
        raw[key] = value
    if seed is not None:
        raw["seed"] = str(seed)
    if out is not None:
        raw["out"] = out
    raw["kind"] = kind
    configs = expand(raw)
    if grid:
        configs = apply_grid(configs, grid)
    if len(configs) == 1 and not grid:
        return [run_experiment(configs[0])]
    return sweep(configs, jobs)


def run(argv=None):
    """Run the command and map failures onto exit codes."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        plac.call(main, reorder_arguments(argv))
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    except (NumericalFailure, EmptySample, StreamExhausted) as e:
        print(f"[NUMERICAL FAILURE] {e}", file=sys.stderr)
        return 2
    except InvalidArgument as e:
        print(f"[INVALID CONFIG] {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"[IO FAILURE] {e}", file=sys.stderr)
        return 3
    return 0


def console_main():
    sys.exit(run())


if __name__ == "__main__":
    console_main()
