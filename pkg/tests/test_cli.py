import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from gramrecur.cli import cell_seed, reorder_arguments, run, run_experiment, sweep
from gramrecur.config import ExperimentConfig, expand
from gramrecur.utils import ConfigError

REPORT_KEYS = {"config", "summary", "distances", "timings", "seed", "rng_tag"}


@pytest.fixture
def small(tmp_path):
    def make(**fields):
        fields.setdefault("out", str(tmp_path / "run"))
        return ExperimentConfig(**fields)

    return make


def read_report(config):
    with open(f"{config.out}/report.json") as f:
        return json.load(f)


def test_symbol_demo(small):
    config = small(kind="symbol-demo", formats="csv json svg")
    report = run_experiment(config)
    assert report.summary["spectrum"] == [0, 0, 0, 1, 1, 2, 3]
    assert report.summary["eigensolver_deviation"] < 1e-10
    assert report.summary["zero_count"] == 3
    df = pd.read_csv(f"{config.out}/spectrum.csv")
    assert list(df.columns) == ["index", "eigenvalue"]
    assert df.eigenvalue.tolist() == [0, 0, 0, 1, 1, 2, 3]
    with open(f"{config.out}/histogram.svg") as f:
        assert "<svg" in f.read()


def test_report_json(small):
    config = small(kind="symbol-demo")
    run_experiment(config)
    report = read_report(config)
    assert set(report) == REPORT_KEYS
    assert report["timings"] is None
    assert report["seed"] == 0
    assert report["rng_tag"] == "threefry2x32"
    assert ExperimentConfig(**report["config"]) == config


def test_record_timings(small):
    config = small(kind="random-spectrum", N=40, record_timings=True, formats="json")
    run_experiment(config)
    timings = read_report(config)["timings"]
    assert timings["total"] >= timings["eigenvalues"] >= 0


def test_mp_curve(small):
    config = small(kind="mp-curve", tau=1.0, upper=4.5, curve_points=451)
    report = run_experiment(config)
    curve = pd.read_csv(f"{config.out}/mp_curve.csv")
    assert len(curve) == 451
    assert abs(curve.t[200] - 2) < 1e-12
    assert abs(curve.density[200] - 1 / (2 * np.pi)) < 1e-9
    assert report.summary["atom"] == 0
    assert abs(report.summary["mass"] - 1) < 1e-6
    assert abs(report.summary["second_moment"] - 2) < 1e-5


def test_random_spectrum_histogram(small):
    config = small(kind="random-spectrum", N=100, tau=0.5, bins=20)
    report = run_experiment(config)
    hist = pd.read_csv(f"{config.out}/histogram.csv")
    assert list(hist.columns) == ["bin_lo", "bin_hi", "mass", "mp_density_at_midpoint"]
    assert len(hist) == 20
    assert abs(hist.mass.sum() - 1) < 1e-12
    assert report.spectrum.size == 50
    assert set(report.distances) == {"ks_mp", "w1_mp"}


def test_deterministic_outputs(small):
    config = small(kind="random-spectrum", N=60, seed=42, formats="csv json svg")
    names = ["spectrum.csv", "histogram.csv", "report.json", "histogram.svg"]

    def snapshot():
        run_experiment(config)
        return {name: (Path(config.out) / name).read_bytes() for name in names}

    assert snapshot() == snapshot()


def test_seed_changes_spectrum(small):
    a = run_experiment(small(kind="random-spectrum", N=30, seed=1, formats="json"))
    b = run_experiment(small(kind="random-spectrum", N=30, seed=2, formats="json"))
    assert not np.allclose(a.spectrum, b.spectrum)


def test_compare(small):
    config = small(kind="compare", N=64, tau=1.0)
    report = run_experiment(config)
    assert {"ks_baker_random", "w1_baker_random", "random_ks_mp"} <= set(
        report.distances
    )
    assert report.summary["unitarity_defect"] < 1e-12
    assert len(pd.read_csv(f"{config.out}/random_spectrum.csv")) == 64


def test_top_spectrum(small):
    config = small(kind="top-spectrum", j=10.0, tau=1.0, k=6.5, p=1.5)
    report = run_experiment(config)
    assert report.spectrum.size == 21
    assert abs(report.summary["trace"] - 21) < 1e-8
    assert report.summary["classical_norm_drift"] < 1e-10


def test_classical_returns(small):
    config = small(
        kind="classical-returns",
        cell_bits=3,
        steps=20_000,
        hitting_bits=4,
        trials=500,
        bins=10,
    )
    report = run_experiment(config)
    assert report.summary["kac_expected"] == 8
    assert 7 < report.summary["kac_mean"] < 9
    assert report.summary["hitting_censored"] == 0
    assert abs(report.summary["lyapunov"] - np.log(2)) < 1e-12
    hist = pd.read_csv(f"{config.out}/hitting_histogram.csv")
    assert "exp_density_at_midpoint" in hist.columns
    assert len(pd.read_csv(f"{config.out}/hitting.csv")) == 500


def test_sweep(tmp_path):
    configs = expand(
        {"kind": "random-spectrum", "N": "20", "tau": "0.5,1", "out": str(tmp_path)}
    )
    reports = sweep(configs, jobs=2)
    assert [r.config.seed for r in reports] == [cell_seed(0, 0), cell_seed(0, 1)]
    assert [r.spectrum.size for r in reports] == [10, 20]
    with open(tmp_path / "sweep.json") as f:
        cells = json.load(f)["cells"]
    assert [c["status"] for c in cells] == ["ok", "ok"]
    assert (tmp_path / "cell-001" / "report.json").exists()


def test_sweep_records_failing_cell(tmp_path):
    (tmp_path / "cell-001").write_text("in the way")
    configs = expand({"kind": "symbol-demo", "bins": "4,8", "out": str(tmp_path)})
    reports = sweep(configs)
    assert reports[0] is not None and reports[1] is None
    with open(tmp_path / "sweep.json") as f:
        cells = json.load(f)["cells"]
    assert cells[0]["status"] == "ok"
    assert cells[1]["status"] == "error" and cells[1]["error"]


def test_empty_sweep():
    with pytest.raises(ConfigError) as e:
        sweep([])
    assert e.value.field == "grid"


def test_cell_seed():
    assert cell_seed(7, 0) == 7
    assert cell_seed(0, 1) == 0x9E3779B97F4A7C15
    assert 0 <= cell_seed(2**64 - 1, 3) < 2**64


def test_reorder_arguments():
    argv = ["baker-spectrum", "--set", "N=10", "--jobs", "2", "--set=tau=0.5"]
    expected = ["--jobs", "2", "baker-spectrum", "N=10", "tau=0.5"]
    assert reorder_arguments(argv) == expected
    with pytest.raises(ConfigError):
        reorder_arguments(["mp-curve", "--set"])


def test_run_success(tmp_path):
    out = str(tmp_path / "demo")
    assert run(["symbol-demo", "--out", out, "--set", "symbols=a b a"]) == 0
    with open(f"{out}/report.json") as f:
        assert json.load(f)["summary"]["spectrum"] == [0, 1, 2]


def test_run_comma_in_symbols_is_one_run(tmp_path):
    out = tmp_path / "demo"
    assert run(["symbol-demo", "--out", str(out), "--set", "symbols=a,b a,b"]) == 0
    assert not (out / "sweep.json").exists()
    with open(out / "report.json") as f:
        assert json.load(f)["summary"]["spectrum"] == [0, 2]


def test_run_grid_from_commas(tmp_path):
    argv = ["random-spectrum", "--set", "N=20", "--set", "tau=0.5,1"]
    assert run(argv + ["--out", str(tmp_path)]) == 0
    assert (tmp_path / "sweep.json").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["baker-spectrum", "--set", "N=501"],
        ["baker-spectrum", "--set", "colour=red"],
        ["baker-spectrum", "--config", "does-not-exist.cfg"],
        ["chaos"],
    ],
)
def test_run_invalid_config(argv, tmp_path):
    assert run(argv + ["--out", str(tmp_path)]) == 1


def test_run_numerical_failure(tmp_path):
    # every hitting trial is censored, so there is no sample to compare
    argv = ["classical-returns", "--out", str(tmp_path)]
    argv += ["--set", "cell_bits=0", "--set", "steps=100"]
    argv += ["--set", "hitting_bits=64", "--set", "cap=1", "--set", "trials=3"]
    assert run(argv) == 2


@pytest.mark.slow
def test_baker_close_to_mp(tmp_path):
    w1 = []
    for i, site in enumerate([(125, 250), (100, 300), (375, 60)]):
        config = ExperimentConfig(
            N=500,
            tau=1.0,
            site_a=site[0],
            site_b=site[1],
            formats="json",
            out=str(tmp_path / f"site-{i}"),
        )
        w1.append(run_experiment(config).distances["w1_mp"])
    assert w1[0] < 0.15
    assert max(w1) - min(w1) < 0.05


@pytest.mark.slow
def test_kicked_top_regimes(tmp_path):
    def run_top(k, p):
        config = ExperimentConfig(
            kind="top-spectrum",
            j=100.0,
            tau=1.0,
            k=k,
            p=p,
            formats="json",
            out=str(tmp_path / f"k{k}"),
        )
        return run_experiment(config)

    regular, chaotic = run_top(1.5, 1.0), run_top(6.5, 1.5)
    assert regular.spectrum.size == chaotic.spectrum.size == 201
    small_regular = np.mean(regular.spectrum < 0.01)
    small_chaotic = np.mean(chaotic.spectrum < 0.01)
    assert small_regular >= 2 * small_chaotic
    assert chaotic.distances["w1_mp"] < regular.distances["w1_mp"]
