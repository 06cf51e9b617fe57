import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from ra_bergman import cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_every_subcommand_has_a_config():
    assert sorted(p.stem for p in CONFIGS.glob("*.json")) == sorted(cli.COMMANDS)


@pytest.mark.parametrize("command", cli.COMMANDS)
def test_example_config_validates(command):
    cli.validate_config(command, json.loads((CONFIGS / f"{command}.json").read_text()))


@pytest.mark.parametrize("command", cli.COMMANDS)
def test_example_config_runs(command, capsys, tmp_path):
    out = tmp_path / "out.txt"
    cfg = json.loads((CONFIGS / f"{command}.json").read_text())
    cfg["out"] = str(out)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, _, err = run([command, "--config", str(path)], capsys)
    assert code == cli.EXIT_OK, err
    assert out.read_text()


def test_unknown_key_rejected(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"kind": "triple", "colour": "red"}))
    code, _, err = run(["gen", "--config", str(path)], capsys)
    assert code == cli.EXIT_CONFIG and "colour" in err


@pytest.mark.parametrize("argv", [
    ["gen", "--kind", "triple", "--radius", "-1"],
    ["gen", "--kind", "hexagon"],
    ["moments", "--fn", "sinh"],
    ["moments", "--fn", "zbar_g", "--radii", "1,-2"],
    ["extend", "--fn", "zbar_g", "--radius", "1"],
    ["pde", "--U", "1,2", "--order", "3"],
    ["annulus-bound", "--fn", "one", "--p", "2"],
    ["suite", "--name", "everything"],
    ["disc", "--select", "1,1,1"],
    ["rays", "--zeroset", "/no/such/file.json", "--at", "0,0"],
])
def test_invalid_configs_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == cli.EXIT_CONFIG and "invalid config" in err


def test_flags_override_config(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"kind": "triple", "radius": 3.5}))
    code, out, _ = run(["gen", "--config", str(path), "--radius", "7"], capsys)
    assert code == 0 and json.loads(out)["params"]["radius"] == 7.0


def test_numerical_fail_exit_1(capsys):
    code, out, err = run(["moments", "--fn", "zbar", "--zeroset", '{"kind": "triple", "radius": 4}'], capsys)
    assert code == cli.EXIT_FAIL and "FAIL" in err and "FAIL" in out
    code, _, err = run(["extend", "--fn", "zbar", "--radius", "1", "--at", "0.1,0"], capsys)
    assert code == cli.EXIT_FAIL and "NotAMemberError" in err
    code, _, err = run(["disc", "--select", "1,2,1,2", "--R1", "10"], capsys)
    assert code == cli.EXIT_FAIL and "SearchFailureError" in err


def test_zero_set_file_roundtrip(tmp_path, capsys):
    zs = tmp_path / "zs.json"
    assert run(["gen", "--kind", "pentagon", "--radius", "0.5", "--out", str(zs)], capsys)[0] == 0
    code, out, _ = run(["rays", "--zeroset", str(zs), "--at", "0,0"], capsys)
    assert code == 0 and json.loads(out)["verdict"] is True


def test_output_deterministic(capsys):
    a = run(["kernel", "--cutoff", "4"], capsys)[1]
    b = run(["kernel", "--cutoff", "4"], capsys)[1]
    assert a == b and a.startswith("z_re,z_im")


def _entry(args, env):
    return subprocess.run([sys.executable, "-m", "ra_bergman.cli", *args], capture_output=True, text=True,
                          env={**os.environ, **env})


def test_thread_env_honoured():
    ok = _entry(["gen", "--kind", "disc", "--n-max", "1"], {"RA_BERGMAN_THREADS": "1"})
    assert ok.returncode == 0 and json.loads(ok.stdout)["kind"] == "disc-dyadic"
    bad = _entry(["gen", "--kind", "disc"], {"RA_BERGMAN_THREADS": "zero"})
    assert bad.returncode == 2 and "RA_BERGMAN_THREADS" in bad.stderr


def test_thread_limit_applies(monkeypatch):
    from threadpoolctl import threadpool_info

    monkeypatch.setenv("RA_BERGMAN_THREADS", "1")
    with cli.thread_limit():
        assert all(p["num_threads"] == 1 for p in threadpool_info())
