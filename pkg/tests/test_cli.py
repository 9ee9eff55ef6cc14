import json
import math

import pytest

from mellin_lab.cli import RunConfig, main, run
from mellin_lab.errors import ConfigError

C = "0.5"


def run_json(capsys, argv):
    status = main(argv + ["--format", "json"])
    return status, json.loads(capsys.readouterr().out)


def csv_rows(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    head = lines[0].split(",")
    return [dict(zip(head, l.split(","))) for l in lines[1:]]


def test_transform_exp_is_one_at_zero(capsys):
    assert main(["transform", "exp", "--c", "1", "--t-min", "-1", "--t-max", "1",
                 "--t-step", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "# c: 1.0" in out
    row = [r for r in csv_rows(out) if float(r["t"]) == 0.0][0]
    assert float(row["re"]) == pytest.approx(1.0, abs=1e-10)
    assert float(row["im"]) == 0.0


def test_pw_verify_linc(capsys):
    status = main(["pw-verify", "linc", "--c", C])
    d = json.loads(capsys.readouterr().out)
    assert status == 0 and d["status"] == "ok"
    assert d["T"] == pytest.approx(math.pi)
    for key in ("restriction", "polar_analytic", "growth"):
        assert d["checks"][key] is True


def test_distance_log_gauss_hardy(capsys):
    assert main(["distance", "log-gauss-hardy", "--c", C, "--a", "1", "--q", "2",
                 "--sigma-list", "1,2,4"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert [float(r["sigma"]) for r in rows] == [1.0, 2.0, 4.0]
    assert all(float(r["slack"]) >= 0 for r in rows)


def test_distance_json_slacks(capsys):
    status, d = run_json(capsys, ["distance", "log-gauss-hardy", "--c", C, "--sigma-list", "[2]"])
    assert status == 0
    assert list(d["slacks"]) == ["sigma=2"] and d["slacks"]["sigma=2"] > 0
    # a comes from the corpus entry when not given
    assert d["a"] == 1.0


def test_failed_verification_exits_2(capsys):
    status, d = run_json(capsys, ["polar-check", "log-gauss-hardy", "--c", C, "--min-order", "10"])
    assert status == 2 and d["status"] == "fail"
    assert d["slacks"]["order_slack"] < 0


def test_tolerance_decides_status(capsys):
    argv = ["polar-check", "log-gauss-hardy", "--c", C, "--min-order", "2.0"]
    status, d = run_json(capsys, argv)
    slack = d["slacks"]["order_slack"]
    assert status == (2 if slack < -1e-8 else 0)
    status, _ = run_json(capsys, argv + ["--tol", str(abs(slack) + 1)])
    assert status == 0


@pytest.mark.parametrize("argv", [
    ["transform", "nope", "--c", "1"],
    ["transform", "exp"],
    ["transform", "exp", "--c", "1", "--t-step", "fast"],
    ["sample", "sinc2", "--c", C],
    ["distance", "log-gauss-hardy", "--c", C, "--spectrum", "guessed"],
    ["invert", "slow-tail", "--c", C, "--spectrum-csv", "/no/such/file.csv"],
])
def test_operational_errors_exit_1(capsys, argv):
    assert main(argv) == 1
    diag = json.loads(capsys.readouterr().err)
    assert set(diag) == {"error", "message"}


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = {"command": "transform", "corpus_id": "exp", "c": 1.0,
           "parameters": {"t_min": -0.5, "t_max": 0.5, "t_step": 0.25}, "format": "json"}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    status, d = run_json(capsys, ["transform", "--config", str(path)])
    assert status == 0 and len(d["t"]) == 5
    status, d = run_json(capsys, ["transform", "--config", str(path), "--t-step", "0.5"])
    assert d["t"] == [-0.5, 0.0, 0.5]
    assert d["config"]["parameters"]["t_step"] == 0.5


def test_config_for_other_command(tmp_path, capsys):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "hardy", "corpus_id": "exp", "c": 1.0}))
    assert main(["transform", "--config", str(path)]) == 1
    assert "ConfigError" in capsys.readouterr().err


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("transform", "exp", 1.0, {"colour": 1}).validate()
    with pytest.raises(ConfigError):
        RunConfig("launch", "exp", 1.0).validate()
    with pytest.raises(ConfigError):
        RunConfig("transform", "exp", 1.0, format="xml").validate()
    cfg = RunConfig("sample", "sinc2", 0.5, {"T": "0.5"}).validate()
    assert cfg.parameters["T"] == 0.5 and cfg.parameters["n"] == 400 and cfg.format == "csv"


def test_output_file_is_deterministic(tmp_path):
    argv = ["distance", "log-gauss-hardy", "--c", C, "--sigma-list", "1,2", "--serial",
            "--format", "json"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["-o", str(a)]) == 0
    assert main(argv + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["config"]["mode"] == "serial"


def test_invert_round_trip_through_csv(tmp_path, capsys):
    spec = tmp_path / "s.csv"
    assert main(["transform", "log-gauss", "--c", C, "--t-min", "-12", "--t-max", "12",
                 "--t-step", "0.02", "--sense", "X2", "-o", str(spec)]) == 0
    status, d = run_json(capsys, ["invert", "log-gauss", "--c", C, "--spectrum-csv", str(spec),
                                  "--n-x", "21"])
    assert status == 0 and d["source"] == "file"
    assert d["sup_relative_error"] < 1e-6
    # the spectrum file carries its own c
    assert main(["invert", "log-gauss", "--c", "0.7", "--spectrum-csv", str(spec)]) == 1


def test_hardy_and_decay_commands(capsys):
    assert main(["hardy", "log-gauss-hardy", "--c", C]) == 0
    out = capsys.readouterr().out
    assert "theta,norm_plus,norm_minus,avg" in out
    status, d = run_json(capsys, ["decay", "lorentz-hardy", "--c", C])
    assert status == 0
    assert d["reference_slope"] == pytest.approx(-math.pi)


def test_sample_and_extend_commands(capsys):
    status, d = run_json(capsys, ["sample", "sinc2", "--c", C, "--T", str(1 / math.pi)])
    assert status == 0 and d["bound"] == 0.0
    status, d = run_json(capsys, ["extend", "sinc2", "--c", C, "--n-r", "5", "--thetas", "0,1"])
    assert status == 0 and d["checks"] == {"growth": True}


def test_corpus_command(capsys):
    status, d = run_json(capsys, ["corpus"])
    ids = [e["id"] for e in d["entries"]]
    assert status == 0 and ids == sorted(ids) and "linc" in ids
    assert main(["corpus", "--filter", "sinc", "--format", "csv"]) == 0
    rows = csv_rows(capsys.readouterr().out)
    assert [r["id"] for r in rows] == ["sinc2"]


def test_run_writes_to_given_stream():
    import io
    buf = io.StringIO()
    assert run(RunConfig("corpus", None, None, {"filter": "linc"}, format="csv"), buf) == 0
    assert buf.getvalue().startswith("id,kind,")
