import pytest

from kpistat.cli import main

COLLINEAR = "s,a,b,c\nx,1,2,5\ny,2,4,1\nz,4,8,2\nw,3,6,7\n"


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "reports"


def test_correlate(capsys, out_dir):
    assert main(["correlate", "--builtin", "table2_services", "--out", str(out_dir), "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["Latency", "1.0000000"]
    assert lines[1].split()[0] == "Throughput"
    assert float(lines[1].split()[1]) == pytest.approx(0.9837184, abs=5e-3)
    assert {path.name for path in out_dir.iterdir()} == {"correlation_r.csv", "correlation_p.csv"}
    assert lines[9] == "published table: 28 of 28 cells within 0.005"
    assert len(lines) == 10


def test_correlate_file_has_no_published_table(capsys, tmp_path):
    data = tmp_path / "small.csv"
    data.write_text("s,a,b\nx,1,2\ny,3,5\nz,2,2\n", encoding="utf-8")
    assert main(["correlate", "--input", str(data), "--format", ""]) == 0
    assert "published table" not in capsys.readouterr().out


def test_cluster(capsys, out_dir):
    assert main(["cluster", "--builtin", "table1_kpi", "--out", str(out_dir), "--format", "json"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    assert "cluster 0: Hr 1, Hr 2" in lines[0]


def test_mds(capsys, out_dir):
    assert main(["mds", "--builtin", "table1_kpi", "--out", str(out_dir), "--format", "csv"]) == 0
    output = capsys.readouterr().out
    assert "cumulative proportion (first two dimensions): 0.7950" in output
    assert "stress dim 2: 0.1991" in output
    assert (out_dir / "mds_coordinates.csv").is_file()


def test_ca(capsys, out_dir):
    assert main(["ca", "--builtin", "table1_kpi", "--out", str(out_dir), "--format", "svg"]) == 0
    output = capsys.readouterr().out
    assert "Hr 9 -> Gn interface Packet loss" in output
    assert "Hr 11 -> Gi interface Packet loss" in output
    assert (out_dir / "ca.svg").is_file()


def test_ca_symmetric_map(capsys, out_dir):
    assert main(["ca", "--builtin", "table1_kpi", "--ca-map", "symmetric", "--out", str(out_dir), "--format", ""]) == 0
    assert "Hr 9 -> Gi throughput" in capsys.readouterr().out


def test_ca_on_a_table_with_a_constant_column(capsys, tmp_path, out_dir):
    data = tmp_path / "flat.csv"
    data.write_text("s,a,b,c\nx,1,5,3\ny,3,5,4\nz,2,5,8\n", encoding="utf-8")
    assert main(["ca", "--input", str(data), "--out", str(out_dir), "--format", "csv"]) == 0
    assert "total inertia" in capsys.readouterr().out


def test_ca_on_a_row_of_column_minimums(capsys, tmp_path, out_dir):
    data = tmp_path / "positive.csv"
    data.write_text("s,a,b,c\nx,1,2,3\ny,3,5,4\nz,2,9,8\n", encoding="utf-8")
    assert main(["ca", "--input", str(data), "--out", str(out_dir), "--format", "csv"]) == 0
    assert "x -> " in capsys.readouterr().out


def test_fa(capsys, out_dir):
    assert main(["fa", "--builtin", "table1_kpi", "--factors", "1", "--out", str(out_dir), "--format", "json"]) == 0
    output = capsys.readouterr().out
    assert output.startswith("converged: ")
    assert "GGSN utilization:" in output


def test_pipeline(capsys, out_dir):
    assert main(["pipeline", "--builtin", "table1_kpi", "--out", str(out_dir)]) == 0
    output = capsys.readouterr().out
    assert "Hr 9 is dominantly associated with Gn interface Packet loss" in output
    assert "Hr 11 forms a cluster of its own" in output
    assert (out_dir / "report.json").is_file()


@pytest.mark.parametrize("argv", [
    [],
    ["correlate"],
    ["bogus"],
    ["cluster", "--builtin", "table1_kpi", "--linkage", "ward"],
    ["cluster", "--builtin", "table1_kpi", "--k", "0"],
    ["cluster", "--builtin", "table1_kpi", "--power-p", "2"],
    ["correlate", "--builtin", "table1_kpi", "--format", "xml"],
    ["correlate", "--builtin", "table1_kpi", "--input", "x.csv"],
    ["ca", "--builtin", "table1_kpi", "--ca-map", "biplot"],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == 1
    assert "usage error" in capsys.readouterr().err


def test_unknown_builtin(capsys):
    assert main(["correlate", "--builtin", "table9"]) == 2
    assert "Unknown builtin dataset 'table9'" in capsys.readouterr().err


def test_too_many_clusters(capsys, out_dir):
    assert main(["cluster", "--builtin", "table1_kpi", "--k", "30", "--out", str(out_dir)]) == 2
    assert "k_clusters (30)" in capsys.readouterr().err
    assert not out_dir.exists()


def test_missing_input_file(capsys, tmp_path):
    assert main(["correlate", "--input", str(tmp_path / "absent.csv")]) == 2
    assert "Cannot read input" in capsys.readouterr().err


def test_parse_error_exit_code(capsys, tmp_path):
    data = tmp_path / "bad.csv"
    data.write_text("s,a\nx,one\n", encoding="utf-8")
    assert main(["correlate", "--input", str(data)]) == 2
    assert "row 2, column 2" in capsys.readouterr().err


def test_numeric_failure_exit_code(capsys, tmp_path, out_dir):
    data = tmp_path / "collinear.csv"
    data.write_text(COLLINEAR, encoding="utf-8")
    assert main(["fa", "--input", str(data), "--factors", "1", "--out", str(out_dir)]) == 3
    assert "stage 'factor_analysis'" in capsys.readouterr().err
    assert not out_dir.exists()


def test_environment_sets_cluster_count(monkeypatch, capsys, out_dir):
    monkeypatch.setenv("KPISTAT_K", "2")
    assert main(["cluster", "--builtin", "table1_kpi", "--out", str(out_dir), "--format", "json"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 2


def test_flag_beats_environment(monkeypatch, capsys, out_dir):
    monkeypatch.setenv("KPISTAT_K", "2")
    assert main(["cluster", "--builtin", "table1_kpi", "--k", "3", "--out", str(out_dir), "--format", "json"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 3


def test_series(capsys, out_dir):
    assert main(["series", "--builtin", "table1_kpi", "--variable", "Latency", "--out", str(out_dir)]) == 0
    assert capsys.readouterr().out.strip() == str(out_dir / "series.svg")
    assert (out_dir / "series.svg").read_text(encoding="utf-8").startswith("<?xml")


def test_series_unknown_variable(capsys, out_dir):
    assert main(["series", "--builtin", "table1_kpi", "--variable", "Jitter", "--out", str(out_dir)]) == 2
    assert "unknown variable 'Jitter'" in capsys.readouterr().err


def test_series_requires_variable(capsys):
    assert main(["series", "--builtin", "table1_kpi"]) == 1


def test_datasets_listing(capsys):
    assert main(["datasets"]) == 0
    output = capsys.readouterr().out
    assert "table1_kpi: KPI data (20 samples x 5 variables)" in output
    assert "alias: Audio -> Voice" in output


def test_datasets_export(capsys, tmp_path):
    assert main(["datasets", "--export", str(tmp_path / "data")]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 2
    assert (tmp_path / "data" / "table2_services.csv").is_file()
