import csv
import json

from click.testing import CliRunner

from hcircle.cli import main


def run_cli(*args):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def test_count_basic():
    result = run_cli("count", "--X", "2")
    assert result.exit_code == 0
    assert result.output.strip() == "2"


def test_count_exact_rational_input():
    result = run_cli("count", "--zx", "1/4", "--zy", "3/2", "--X", "100")
    assert result.exit_code == 0
    assert int(result.output.strip()) > 0


def test_count_rejects_bad_point():
    result = CliRunner().invoke(main, ["count", "--zy", "-1", "--X", "10"])
    assert result.exit_code == 2


def test_ball_csv(tmp_path):
    out = tmp_path / "ball.csv"
    result = run_cli("ball", "--X", "20", "--out", str(out))
    assert result.exit_code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["a", "b", "c", "d", "u_value", "four_u_plus_two"]
    assert len(rows) > 1


def test_transform_csv(tmp_path):
    out = tmp_path / "q.csv"
    result = run_cli("transform", "--kind", "q", "--x", "20", "--d", "5",
                     "--m", "sharp", "--range", "0:19:5", "--out", str(out))
    assert result.exit_code == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 5
    assert abs(float(rows[0]["value"]) - 2.0 * 20.0 ** 0.5) < 1e-9


def test_transform_m_kind(tmp_path):
    out = tmp_path / "m.csv"
    result = run_cli("transform", "--kind", "M", "--x", "20", "--d", "5",
                     "--t", "2", "--m", "smooth", "--range", "2:18:3", "--out", str(out))
    assert result.exit_code == 0
    with open(out, newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 3


def test_transform_bad_range():
    result = CliRunner().invoke(main, ["transform", "--kind", "q", "--x", "5",
                                       "--range", "oops", "--out", "/tmp/x.csv"])
    assert result.exit_code == 2


def test_geodesics_csv(tmp_path):
    out = tmp_path / "geo.csv"
    result = run_cli("geodesics", "--max-norm", "100", "--out", str(out))
    assert result.exit_code == 0
    with open(out, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["trace"] == "3"
    assert rows and all(float(r["norm"]) <= 100.0 for r in rows)


def test_average_json():
    result = run_cli("average", "--X", "500", "--nodes", "6")
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["X"] == 500.0
    assert abs(payload["N_f"] - payload["main_term"] - payload["error"]) < 1e-9


def test_fit_command(tmp_path):
    src = tmp_path / "results.csv"
    with open(src, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["X", "error"])
        for x in (10.0, 100.0, 1000.0, 10000.0):
            writer.writerow([x, 2.0 * x ** 0.7])
    result = run_cli("fit", "--in", str(src))
    payload = json.loads(result.output)
    assert abs(payload["slope"] - 0.7) < 1e-10
    assert payload["points_used"] == 4


def test_run_with_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"x_grid": [100.0, 300.0], "nodes": 6}))
    result = run_cli("--out-dir", str(tmp_path), "--config", str(cfg), "run")
    assert result.exit_code == 0
    with open(tmp_path / "results.csv", newline="") as fh:
        assert len(list(csv.DictReader(fh))) == 2
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config"]["nodes"] == 6


def test_trace_check_json(tmp_path):
    out = tmp_path / "report.json"
    result = run_cli("trace-check", "--x", "6", "--d", "2", "--quad-n", "12",
                     "--out", str(out))
    assert result.exit_code == 0
    payload = json.loads(out.read_text())
    assert "residual" in payload and payload["residual"] < 0.1
    assert set(payload["sigma_hyp"]) == {"re", "im"}
