import math

import numpy as np
import pytest

from cutquery import acceptance, bench
from cutquery.acceptance import CorpusItem
from cutquery.bench import (
    CSV_COLUMNS,
    ExperimentConfig,
    ResultRow,
    VerificationError,
    fit_scaling,
    load_config,
    main,
    read_csv,
    rows_to_csv,
    run_experiment,
    scaling_report,
)
from cutquery.graph_core import Forest, GraphFamilySpec, load_graph


def synthetic_rows(f, sizes=(64, 128, 256, 512, 1024)):
    return [{"n": str(n), "q": str(f(n))} for n in sizes]


def test_fit_linear():
    fit = fit_scaling(synthetic_rows(lambda n: 7 * n), "q")
    assert fit.slope == pytest.approx(1.0, abs=1e-9)
    assert fit.intercept == pytest.approx(math.log2(7), abs=1e-9)


def test_fit_nlogn_matches_closed_form():
    sizes = np.array([64, 128, 256, 512, 1024], dtype=float)
    x = np.log2(sizes)
    y = np.log2(sizes * np.log2(sizes))
    expected = np.polyfit(x, y, 1)[0]
    fit = fit_scaling(synthetic_rows(lambda n: n * math.log2(n)), "q")
    assert fit.slope == pytest.approx(expected, abs=1e-9)
    # local slope is 1 + 1 / (ln 2 * log2 n), about 1.18 at log2 n = 8
    assert fit.slope == pytest.approx(1 + 1 / (math.log(2) * 8), abs=0.01)
    assert fit_scaling(synthetic_rows(lambda n: n * math.log2(n)), "q", x="nlogn").slope == pytest.approx(1.0)


def test_fit_constant_and_errors():
    assert fit_scaling(synthetic_rows(lambda n: 5), "q").slope == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_scaling(synthetic_rows(lambda n: n, sizes=(8, 16)), "q")


def test_run_path_rows():
    rows = run_experiment(ExperimentConfig(algorithm="randomized", family="path", n_list=[64], trials=10, seed=3))
    assert len(rows) == 10 and all(r.verified for r in rows)
    assert [r.seed for r in rows] == list(range(3, 13))
    assert all(r.components_final == 1 for r in rows)


def test_trials_zero_is_config_error():
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0).validate()
    assert main(["run", "--trials", "0"]) == 2


@pytest.mark.parametrize("algorithm", ["randomized", "deterministic", "harvey_baseline"])
def test_identical_csv_bytes(tmp_path, algorithm):
    out = []
    for k in range(2):
        path = tmp_path / f"{k}.csv"
        cfg = ExperimentConfig(algorithm=algorithm, n_list=[40, 20], p="2/n", trials=3, out=str(path))
        run_experiment(cfg)
        out.append(path.read_bytes())
    assert out[0] == out[1]
    header = out[0].decode().splitlines()[0].split(",")
    assert header == CSV_COLUMNS
    rows = read_csv(tmp_path / "0.csv")
    assert [int(r["n"]) for r in rows] == [20, 20, 20, 40, 40, 40]


def test_csv_row_consistency():
    rows = run_experiment(ExperimentConfig(n_list=[50], trials=2, seed=1))
    for rec in read_back(rows):
        tags = sum(int(rec[c]) for c in CSV_COLUMNS if c.startswith("q_"))
        assert tags == int(rec["cut_queries_total"]) and rec["verified"] == "1" and rec["wall_time"] == ""


def read_back(rows):
    import csv
    import io

    return list(csv.DictReader(io.StringIO(rows_to_csv(rows))))


def test_timing_column():
    rows = run_experiment(ExperimentConfig(family="star", n_list=[16], timing=True))
    assert float(rows[0].as_csv_dict()["wall_time"]) >= 0


def test_verification_failure_dumps_graph(tmp_path, monkeypatch):
    class Broken:
        forest = Forest(12)
        phases_run = aborts = sampled_edges_total = 0
        phase_counts = []

    monkeypatch.setattr(bench, "spanning_forest_randomized", lambda *a, **k: Broken())
    cfg = ExperimentConfig(family="cycle", n_list=[12], dump_dir=str(tmp_path), seed=4)
    with pytest.raises(VerificationError) as info:
        run_experiment(cfg)
    dumped = tmp_path / "failure_randomized_n12_seed4.txt"
    assert str(dumped) in str(info.value)
    assert load_graph(dumped.read_text()).m == 12
    assert main(["run", "--family", "cycle", "--n", "12", "--dump-dir", str(tmp_path)]) == 1


def test_load_config():
    text = "# comment\nalgorithm = harvey_baseline\nn=8,16\nbudget-constant=5\n\n"
    assert load_config(text) == {"algorithm": "harvey_baseline", "n_list": "8,16", "budget_constant": "5"}
    with pytest.raises(ValueError):
        load_config("bogus=1")
    with pytest.raises(ValueError):
        load_config("no equals sign")


def test_cli_config_and_flags(tmp_path, capsys):
    conf = tmp_path / "exp.conf"
    conf.write_text("algorithm=deterministic\nfamily=star\nn=10,20\ntrials=2\n")
    out = tmp_path / "rows.csv"
    assert main(["run", "--config", str(conf), "--trials", "1", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert [(r["algorithm"], r["n"]) for r in rows] == [("deterministic", "10"), ("deterministic", "20")]
    assert main(["run", "--algorithm", "randomized", "--family", "erdos_renyi", "--p", "0.2", "--n", "30",
                 "--weights", "uniform_int", "--lo", "1", "--hi", "1000", "--budget-constant", "8",
                 "--budget-formula", "paper_linear", "--seed", "2"]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed[0].split(",") == CSV_COLUMNS and len(printed) == 2


def test_cli_fit_and_scaling(tmp_path, capsys):
    rows = tmp_path / "rows.csv"
    report = tmp_path / "report.csv"
    assert main(["scaling", "--n", "16,32,64", "--trials", "2", "--out", str(report), "--rows-out", str(rows)]) == 0
    assert "slope_vs_nlogn" in capsys.readouterr().out
    assert main(["fit", str(rows), "cut_queries_total", "--x", "nlogn"]) == 0
    assert capsys.readouterr().out.startswith("slope=")
    lines = report.read_text().splitlines()
    assert lines[0].startswith("n,trials,mean_cut_queries") and lines[-1].startswith("# slope_vs_nlogn=")


def test_scaling_report_constants():
    rows = run_experiment(ExperimentConfig(n_list=[32, 64, 128], trials=2))
    table, fits = scaling_report(rows)
    assert [t["n"] for t in table] == ["32", "64", "128"]
    for t in table:
        assert float(t["max_phase_ratio"] or 0) <= 7 / 8
    assert set(fits) == {"slope_vs_n", "slope_vs_nlogn"}


def test_verify_quick_passes_on_empty_graph_corpus(monkeypatch, capsys):
    empties = [CorpusItem("empty", GraphFamilySpec("erdos_renyi", n=n, p=0.0), 0) for n in (0, 1, 2, 5, 9)]
    monkeypatch.setattr(acceptance, "corpus", lambda quick=False: iter(empties))
    checks = [acceptance.check_correctness, acceptance.check_query_ceilings, acceptance.check_cross_edge_bound,
              acceptance.check_pseudo_graph, acceptance.check_determinism]
    assert acceptance.verify_suite(quick=True, checks=checks)
    assert capsys.readouterr().out.count("PASS") == len(checks)


def test_verify_flags_unverified_doubling(monkeypatch, capsys):
    def trusting(oracle, R, B, inner, tag="x"):
        return inner(oracle, R, B, 2 ** 20, tag)

    monkeypatch.setattr(acceptance, "doubling_reconstruct", trusting)
    assert not acceptance.verify_suite(checks=[acceptance.check_doubling_faults])
    assert capsys.readouterr().out.startswith("FAIL [11]")
