import json
import subprocess
import sys

import pytest

from gluing import cli, fixtures
from gluing.errors import InvariantBreach


def run(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "gluing", *args], capture_output=True, text=True, cwd=cwd
    )


@pytest.fixture
def files(tmp_path):
    for name in fixtures.names():
        (tmp_path / f"{name}.json").write_text(fixtures.text(name))
    return tmp_path


def test_examples_list_show_write(tmp_path):
    r = run("examples", "list")
    assert r.returncode == 0
    assert r.stdout.split() == ["prbox", "hardy", "product", "qorder-zx", "cbd-prbox"]
    r = run("examples", "show", "prbox")
    assert r.stdout == fixtures.text("prbox")
    out = tmp_path / "h.json"
    assert run("examples", "write", "hardy", str(out)).returncode == 0
    assert out.read_text() == fixtures.text("hardy")
    assert run("examples", "show", "nope").returncode == 64


def test_prbox_report(files):
    r = run("analyze", str(files / "prbox.json"), "--checks", "signalling,strong,lp,fraction,cech")
    assert r.returncode == 0
    assert "signalling: no" in r.stdout
    assert "strong: yes" in r.stdout
    assert "lp: infeasible, Farkas certificate verified" in r.stdout
    assert "fraction: 1\n" in r.stdout
    assert "cech: 8 of 8" in r.stdout


def test_hardy_report_json(files):
    r = run("analyze", str(files / "hardy.json"), "--checks", "logical,strong,lp,fraction", "--format", "json")
    assert r.returncode == 0
    rep = json.loads(r.stdout)
    assert rep["results"]["logical"]["witness"]["values"] == {"a1": "0", "b1": "0"}
    assert rep["results"]["strong"]["witness"] == {"a1": "0", "a2": "0", "b1": "1", "b2": "1"}
    assert rep["results"]["lp"]["feasible"] is False
    assert rep["results"]["fraction"]["contextual_fraction"] is None


def test_qorder_report(files):
    r = run("analyze", str(files / "qorder-zx.json"), "--checks", "cbd,qq")
    assert r.returncode == 0
    assert "cbd: noncontextual, delta 1, D -1" in r.stdout
    assert "QQ equality holds" in r.stdout


def test_reports_are_byte_identical(files):
    for name in fixtures.names():
        kind = fixtures.EXAMPLES[name][0]
        checks = "signalling,logical,strong,lp,fraction,cech" if kind == "scenario" else "cbd,qq"
        outs = {run("analyze", str(files / f"{name}.json"), "--checks", checks, "--format", "json").stdout for _ in range(2)}
        assert len(outs) == 1


def test_timing_is_opt_in(files):
    r = run("analyze", str(files / "product.json"), "--checks", "lp", "--format", "json", "--timing")
    assert "timing" in json.loads(r.stdout)
    r = run("analyze", str(files / "product.json"), "--checks", "lp", "--format", "json")
    assert "timing" not in json.loads(r.stdout)


def test_gen_qorder_matches_fixture(tmp_path):
    out = tmp_path / "zx.json"
    r = run("gen-qorder", "--state", "1,0", "--proj-a", "1,0,0,0", "--proj-b", "1/2,1/2,1/2,1/2", "-o", str(out))
    assert r.returncode == 0
    assert out.read_text() == fixtures.text("qorder-zx")


def test_exit_codes(files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert run("analyze", str(bad), "--checks", "lp").returncode == 2
    assert run("analyze", str(tmp_path / "missing.json"), "--checks", "lp").returncode == 2
    data = json.loads(fixtures.text("prbox"))
    data["tables"]["a1,b2"]["1,1"] = "1/4"
    bad.write_text(json.dumps(data))
    r = run("analyze", str(bad), "--checks", "lp")
    assert r.returncode == 3 and "{a1,b2}" in r.stderr
    r = run("analyze", str(files / "prbox.json"), "--checks", "lp", "--max-columns", "8")
    assert r.returncode == 4
    assert run("analyze", str(files / "prbox.json"), "--checks", "bogus").returncode == 64
    assert run("analyze", str(files / "prbox.json"), "--checks", "qq").returncode == 64
    assert run("analyze", str(files / "prbox.json")).returncode == 64
    assert run("frobnicate").returncode == 64
    r = run("gen-qorder", "--state", "1,0", "--proj-a", "1,1,0,0", "--proj-b", "1,0,0,0", "-o", str(tmp_path / "x"))
    assert r.returncode == 3


def test_internal_breach_exit_code(files, monkeypatch, capsys):
    def broken(*a, **k):
        raise InvariantBreach("simulated")

    monkeypatch.setattr(cli, "analyze", broken)
    assert cli.main(["analyze", str(files / "prbox.json"), "--checks", "lp"]) == 70
    assert "simulated" in capsys.readouterr().err
