import json

import pytest

from reservematch import load_instance, serialize_instance, total_reserves, validate
from reservematch.cli import main
from reservematch.experiment import ExperimentSpec, derive_seed, emit_plot_data, run_experiment

from conftest import make_example


@pytest.fixture
def example_file(tmp_path):
    path = tmp_path / "example.json"
    path.write_text(serialize_instance(make_example()), encoding="utf-8")
    return path


def test_gen_writes_instance_and_sidecar(tmp_path):
    out = tmp_path / "pool.json"
    rc = main(["gen", "--capacity", "20", "--seed", "5", "--n", "50", "--out", str(out)])
    assert rc == 0
    inst = load_instance(out)
    assert validate(inst) == []
    assert inst.capacity == 20 and inst.n_students == 50
    meta = json.loads((tmp_path / "pool.json.meta.json").read_text())
    assert meta["seed"] == 5 and meta["capacity"] == 20


def test_run_prints_selection(example_file, capsys):
    rc = main(["run", str(example_file), "--algo", "as"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "selected 1 3 4" in out
    assert "signature 2 1 0" in out


def test_run_sy2(example_file, capsys):
    rc = main(["run", str(example_file), "--algo", "sy2"])
    assert rc == 0
    assert "selected 1 2 3" in capsys.readouterr().out


def test_run_writes_outcome_file(example_file, tmp_path, capsys):
    out = tmp_path / "outcome.json"
    rc = main(["run", str(example_file), "--algo", "pos", "--out", str(out)])
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["algorithm"] == "pos"
    assert doc["selected"] == [0, 1, 2]
    assert doc["signature"] == [0, 2, 1]
    assert doc["metrics"]["p2"] == 2


def test_unknown_algorithm_is_usage_error(example_file):
    assert main(["run", str(example_file), "--algo", "bogus"]) == 1


def test_missing_instance_is_runtime_error(tmp_path):
    assert main(["run", str(tmp_path / "nope.json"), "--algo", "as"]) == 2


def test_malformed_instance_is_runtime_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["run", str(bad), "--algo", "as"]) == 2


def test_missing_subcommand_is_usage_error():
    assert main([]) == 1


def sweep_args(out_dir, seed="7"):
    return [
        "sweep",
        "--out",
        str(out_dir),
        "--n",
        "30",
        "--qc",
        "5,10",
        "--psi-factors",
        "1.0,2.0",
        "--seeds-per-cell",
        "3",
        "--seed",
        seed,
        "--quiet",
    ]


def test_sweep_outputs_and_determinism(tmp_path):
    first = tmp_path / "a"
    second = tmp_path / "b"
    assert main(sweep_args(first)) == 0
    assert main(sweep_args(second)) == 0

    for name in ("per_instance.csv", "ratios.csv"):
        assert (first / name).read_bytes() == (second / name).read_bytes()

    m1 = json.loads((first / "manifest.json").read_text())
    m2 = json.loads((second / "manifest.json").read_text())
    m1.pop("created_unix"), m2.pop("created_unix")
    assert m1 == m2


def test_sweep_different_master_seed_differs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(sweep_args(a)) == 0
    assert main(sweep_args(b, seed="8")) == 0
    assert (a / "per_instance.csv").read_bytes() != (b / "per_instance.csv").read_bytes()


def test_sweep_rejects_capacity_above_pool(tmp_path):
    rc = main(["sweep", "--out", str(tmp_path / "x"), "--n", "30", "--qc", "50", "--quiet"])
    assert rc == 1


def test_single_instance_smoke_sweep_is_fast(tmp_path):
    import time

    start = time.perf_counter()
    rc = main(
        ["sweep", "--out", str(tmp_path / "smoke"), "--qc", "50",
         "--seeds-per-cell", "1", "--quiet"]
    )
    elapsed = time.perf_counter() - start
    assert rc == 0
    assert elapsed < 1.0, f"smoke sweep took {elapsed:.2f}s"


def test_manifest_reserves_match_instances(tmp_path):
    out = tmp_path / "sweep"
    assert main(sweep_args(out)) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    from reservematch.datagen import SatGenConfig, gen_instance

    for cell in manifest["cells"]:
        for seed in cell["seeds"]:
            inst = gen_instance(
                SatGenConfig(
                    capacity=cell["qc"],
                    seed=seed,
                    n_students=manifest["n_students"],
                    psi_factor=cell["psi_factor"],
                )
            )
            assert total_reserves(inst) == cell["total_reserves"]


def test_derived_seeds_are_independent_of_cell_order():
    assert derive_seed(7, 0, 1, 2) == derive_seed(7, 0, 1, 2)
    assert derive_seed(7, 0, 1, 2) != derive_seed(7, 1, 0, 2)
    assert derive_seed(7, 0, 1, 2) != derive_seed(8, 0, 1, 2)


def test_parallel_sweep_is_byte_identical(tmp_path):
    spec = ExperimentSpec(
        out_dir=tmp_path / "serial",
        n_students=25,
        capacities=(5, 10),
        psi_factors=("1.0",),
        seeds_per_cell=2,
        master_seed=3,
    )
    run_experiment(spec, jobs=1, progress=False)
    spec2 = ExperimentSpec(
        out_dir=tmp_path / "parallel",
        n_students=25,
        capacities=(5, 10),
        psi_factors=("1.0",),
        seeds_per_cell=2,
        master_seed=3,
    )
    run_experiment(spec2, jobs=2, progress=False)
    assert (tmp_path / "serial" / "per_instance.csv").read_bytes() == (
        tmp_path / "parallel" / "per_instance.csv"
    ).read_bytes()


def test_plotdata_wide_tables(tmp_path, capsys):
    out = tmp_path / "sweep"
    assert main(sweep_args(out)) == 0
    rc = main(["plotdata", "--results", str(out), "--metric", "p1", "--case", "avg"])
    assert rc == 0
    table = (out / "plot_p1_avg_psi1.0.csv").read_text().splitlines()
    assert table[0] == "qc,as,ehyy,sy1,sy2,pog,pos"
    assert table[1].startswith("5,") and table[2].startswith("10,")
    assert (out / "plot_p1_avg_psi2.0.csv").exists()


def test_plotdata_missing_results_is_runtime_error(tmp_path):
    assert main(["plotdata", "--results", str(tmp_path / "empty"), "--metric", "p1", "--case", "avg"]) == 2


def test_api_emit_plot_data_validates_arguments(tmp_path):
    with pytest.raises(ValueError):
        emit_plot_data(tmp_path, "p9", "avg")
    with pytest.raises(ValueError):
        emit_plot_data(tmp_path, "p1", "median")
