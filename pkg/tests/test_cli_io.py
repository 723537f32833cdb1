"""Parsing, layered configuration, serialization, and exit codes."""

import json
import math

import pytest

from rdafront.cli_io import (
    RunConfig,
    UsageError,
    csv_table,
    dumps,
    fmt,
    main,
    parse,
)


def test_defaults_fill_in():
    cfg = parse(["speed", "--eps", "0.1"])
    assert cfg.subcommand == "speed"
    assert cfg.params["eps"] == 0.1
    assert cfg.params["bracket"] == (1.0, 1.8)
    assert cfg.params["tol"] == 1e-10


def test_eps_list_parses():
    cfg = parse(["sweep", "--eps-list", "0.2,0.1"])
    assert cfg.params["eps_list"] == (0.2, 0.1)
    assert cfg.params["workers"] == 1


def test_missing_required_flag():
    with pytest.raises(UsageError, match="--eps"):
        parse(["speed"])


def test_invariant_violations_rejected():
    with pytest.raises(UsageError, match="--eps"):
        parse(["speed", "--eps", "-1"])
    with pytest.raises(UsageError, match="--bracket"):
        parse(["speed", "--eps", "0.1", "--bracket", "1.8", "1.0"])
    with pytest.raises(UsageError, match="--eps-list"):
        parse(["sweep", "--eps-list", "0.1,0.2"])
    with pytest.raises(UsageError, match="--workers"):
        parse(["sweep", "--eps-list", "0.2,0.1", "--workers", "0"])
    with pytest.raises(UsageError, match="--tmax"):
        parse(["pde", "--rho", "125", "--tmax", "1", "--out-every", "0.5"])


def test_unknown_flag_named():
    with pytest.raises(UsageError, match="--frobnicate"):
        parse(["speed", "--eps", "0.1", "--frobnicate", "3"])


def test_unknown_subcommand():
    with pytest.raises(UsageError):
        parse(["warp", "--eps", "0.1"])


def test_config_file_layering(tmp_path):
    cfgfile = tmp_path / "run.json"
    cfgfile.write_text(json.dumps({"eps": 0.2, "tol": 1e-9}))
    cfg = parse(["speed", "--config", str(cfgfile)])
    assert cfg.params["eps"] == 0.2
    assert cfg.params["tol"] == 1e-9
    # explicit flags beat file values
    cfg = parse(["speed", "--config", str(cfgfile), "--eps", "0.05"])
    assert cfg.params["eps"] == 0.05
    assert cfg.params["tol"] == 1e-9


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"no_such_key": 1}')
    with pytest.raises(UsageError, match="no_such_key"):
        parse(["speed", "--eps", "0.1", "--config", str(bad)])
    notjson = tmp_path / "broken.json"
    notjson.write_text("{")
    with pytest.raises(UsageError, match="valid JSON"):
        parse(["speed", "--eps", "0.1", "--config", str(notjson)])
    with pytest.raises(UsageError, match="cannot read"):
        parse(["speed", "--eps", "0.1", "--config", str(tmp_path / "gone.json")])


def test_config_accepts_lists_and_strings(tmp_path):
    cfgfile = tmp_path / "sweep.json"
    cfgfile.write_text(json.dumps({"eps_list": [0.2, 0.1], "bracket": [1.0, 1.7]}))
    cfg = parse(["sweep", "--config", str(cfgfile)])
    assert cfg.params["eps_list"] == (0.2, 0.1)
    assert cfg.params["bracket"] == (1.0, 1.7)


def test_blowup_actions():
    cfg = parse(["blowup", "verify", "--c", "1.14", "--eps-list", "0.01,0.1"])
    assert cfg.params["action"] == "verify"
    with pytest.raises(UsageError, match="--chart"):
        parse(["blowup", "portrait", "--c", "1.14"])
    with pytest.raises(UsageError):
        parse(["blowup", "sideways", "--c", "1.14"])


def test_fmt_round_trips_doubles():
    for x in (0.1, 1.0 / 3.0, 1.1447142425533319, 6.02e23, -2.5e-15):
        assert float(fmt(x)) == x


def test_dumps_is_parseable_and_exact():
    doc = {"a": 0.1, "b": [1.0 / 3.0, 2], "c": {"d": None, "e": True}, "f": "x"}
    back = json.loads(dumps(doc))
    assert back["a"] == 0.1
    assert back["b"][0] == 1.0 / 3.0
    assert back["c"]["d"] is None and back["c"]["e"] is True


def test_dumps_rejects_unknown_types():
    with pytest.raises(TypeError):
        dumps({"bad": object()})


def test_csv_table_formats():
    text = csv_table("a,b", [(0.1, 3), (2.0, 4)])
    lines = text.strip().split("\n")
    assert lines[0] == "a,b"
    assert float(lines[1].split(",")[0]) == 0.1
    assert lines[1].split(",")[1] == "3"


def test_main_speed_json(capsys):
    rc = main(["speed", "--eps", "0"])
    out = capsys.readouterr().out
    assert rc == 0
    doc = json.loads(out)
    assert abs(doc["c_star"] - 1.1447142425533319) < 1e-10
    assert doc["rho"] is None


def test_main_round_trip_config(capsys):
    rc = main(["speed", "--eps", "0.1", "--tol", "1e-9"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    # the embedded config reproduces the run bit-exactly when fed back
    flags = ["speed"]
    for key in ("eps", "bracket", "tol"):
        v = doc["config"][key]
        if isinstance(v, list):
            flags += [f"--{key}"] + [repr(float(x)) for x in v]
        else:
            flags += [f"--{key}", repr(float(v))]
    cfg = parse(flags)
    assert cfg.params["eps"] == doc["config"]["eps"]
    assert cfg.params["tol"] == doc["config"]["tol"]


def test_main_exit_codes(capsys):
    assert main(["speed", "--eps", "-1"]) == 64
    assert main(["nonsense"]) == 64
    # no sign change on this bracket
    assert main(["speed", "--eps", "0.1", "--bracket", "1.5", "1.8"]) == 2
    # coincident stable eigenvalues: shooting cannot pick a strong direction
    assert main(["shoot", "--c", "1.2", "--eps", "0.6", "--side", "s"]) == 3
    capsys.readouterr()


def test_main_version(capsys):
    assert main(["--version"]) == 0
    out = capsys.readouterr().out
    assert "rdafront" in out and "kernels" in out


def test_main_equilibria_json(capsys):
    rc = main(["equilibria", "--eps", "0.1", "--c", "1.2"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["count"] == len(doc["points"]) >= 4
    kinds = {tuple(p["location"]): p["kind"] for p in doc["points"]}
    assert kinds[(0.0, 0.0)] == "stable-node"


def test_main_phase_invariant(capsys):
    c = 1.1447142425533319
    rc = main(["phase", "--eps", "0", "--c", repr(c)])
    assert rc == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "t,comp0,comp1"
    k = -(c**3) / 3.0
    worst = 0.0
    for line in lines[1:]:
        _, T, W = (float(v) for v in line.split(","))
        worst = max(worst, abs((W - c) ** 3 / 3.0 - T + T * T / 2.0 - k))
    assert worst < 1e-10


def test_main_shoot_writes_orbit(tmp_path, capsys):
    orbit = tmp_path / "orbit.csv"
    rc = main(
        ["shoot", "--c", "1.15", "--eps", "0.1", "--side", "u", "--orbit-out", str(orbit)]
    )
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["converged"] is True
    header = orbit.read_text().split("\n", 1)[0]
    assert header == "t,comp0,comp1"


def test_main_blowup_portrait(capsys):
    rc = main(["blowup", "portrait", "--chart", "keps", "--c", "1.2"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "T1,W1,r1,dT1,dW1"
    assert len(lines) == 1 + 33 * 33
