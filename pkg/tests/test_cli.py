import io
import json
import subprocess
import sys

import pytest

from artifact import __version__, cli
from artifact.cache import Cache, cache_key


def run(argv, tmp_path=None):
    out = io.StringIO()
    if tmp_path is not None and "--no-cache" not in argv and argv[0] != "selftest":
        argv = argv + ["--cache-dir", str(tmp_path)]
    code = cli.run(argv, stdout=out)
    return code, out.getvalue()


def test_zeta_fit_end_to_end(tmp_path):
    code, text = run(["zeta", "fit", "--disc", "1", "--chi", "mod7quad", "-p", "11", "-M", "4", "-N", "16"], tmp_path)
    assert code == 0
    doc = json.loads(text)
    assert doc["config"]["p"] == 11 and doc["config"]["chi"] == "mod7quad"
    fit = doc["result"]["fit"]
    assert fit["ledger"]["input_prec"] == 16 and len(fit["series"]) == 5
    assert fit["series"][0]["unit"] == ""           # the trivial zero
    assert fit["weights"] == [1, 11, 21, 31, 41, 51, 61]


def test_selftest():
    code, text = run(["selftest"])
    doc = json.loads(text)
    assert code == 0 and doc["result"]["passed"]
    assert len(doc["result"]["checks"]) >= 15


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["zeta", "fit", "--bogus"])
    assert exc.value.code == 1
    assert "unrecognized arguments" in capsys.readouterr().err


def test_bad_character_spec_exits_1(tmp_path, capsys):
    code, text = run(["zeta", "fit", "--chi", "nonsense", "-p", "11"], tmp_path)
    assert code == 1 and text == ""
    assert "unrecognized character spec" in capsys.readouterr().err


def test_precondition_exit_2(tmp_path):
    code, text = run(["linv", "compute", "--chi", "mod3quad", "-p", "5"], tmp_path)
    assert code == 2
    assert json.loads(text)["error"]["type"] == "NotSplit"


def test_inconclusive_precision_exit_3(tmp_path):
    code, text = run(["linv", "sum-check", "--chi", "mod7quad", "-p", "11", "-N", "1"], tmp_path)
    assert code == 3
    assert json.loads(text)["error"]["type"] == "InconclusivePrecision"


def test_linv_served_from_cache(tmp_path, monkeypatch):
    argv = ["linv", "compute", "--chi", "mod7quad", "-p", "11"]
    code1, first = run(argv, tmp_path)
    assert code1 == 0 and list(tmp_path.glob("*.json"))

    def boom(cfg):
        raise AssertionError("recomputed instead of reading the cache")

    monkeypatch.setitem(cli.COMMANDS, ("linv", "compute"), boom)
    code2, second = run(argv, tmp_path)
    assert code2 == 0 and second == first
    doc = json.loads(first)
    assert doc["result"]["u0"]["min_poly"] in (["11", "-4", "1"], ["11", "4", "1"])


def test_cache_on_off_identical(tmp_path):
    argv = ["eis", "coeffs", "--chi", "mod7quad", "-p", "11", "--bound", "12"]
    _, a = run(argv, tmp_path)
    _, b = run(argv, tmp_path)
    _, c = run(argv + ["--no-cache"])
    assert a == b == c


def test_version_bump_recomputes(tmp_path):
    calls = []

    def producer():
        calls.append(1)
        return {"value": len(calls)}

    inputs = {"command": "x"}
    assert Cache(tmp_path, version="1").get_or_compute(inputs, producer) == {"value": 1}
    assert Cache(tmp_path, version="1").get_or_compute(inputs, producer) == {"value": 1}
    assert Cache(tmp_path, version="2").get_or_compute(inputs, producer) == {"value": 2}
    assert len(calls) == 2


def test_corrupt_entry_recomputes_and_warns(tmp_path, capsys):
    cache = Cache(tmp_path, version="1")
    inputs = {"command": "y"}
    cache.get_or_compute(inputs, lambda: {"v": 1})
    key = cache_key({"inputs": inputs, "version": "1"})
    (tmp_path / f"{key}.json").write_text("{not json")
    assert cache.get_or_compute(inputs, lambda: {"v": 2}) == {"v": 2}
    assert "corrupt cache entry" in capsys.readouterr().err
    entry = json.loads((tmp_path / f"{key}.json").read_text())
    assert entry["payload"] == {"v": 2} and entry["version"] == "1" and "created" in entry


def test_cache_entry_for_other_key_is_corrupt(tmp_path, capsys):
    cache = Cache(tmp_path, version="1")
    inputs = {"command": "z"}
    key = cache_key({"inputs": inputs, "version": "1"})
    (tmp_path / f"{key}.json").write_text(json.dumps({"key": "other", "version": "1", "payload": 5}))
    assert cache.get_or_compute(inputs, lambda: 7) == 7
    assert "corrupt" in capsys.readouterr().err


def test_toml_config_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('chi = "mod7quad"\np = 11\nN = 10\nM = 3\n')
    code, text = run(["zeta", "fit", "--config", str(cfg), "--no-cache"])
    doc = json.loads(text)
    assert code == 0 and doc["config"]["N"] == 10 and doc["config"]["M"] == 3
    code, text = run(["zeta", "fit", "--config", str(cfg), "-N", "12", "--no-cache"])
    assert json.loads(text)["config"]["N"] == 12
    bad = tmp_path / "bad.toml"
    bad.write_text("colour = 3\n")
    code, _ = run(["zeta", "fit", "--config", str(bad), "--no-cache"])
    assert code == 1


def test_env_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("ARTIFACT_PRECISION", "9")
    monkeypatch.setenv("ARTIFACT_CACHE_DIR", str(tmp_path / "envcache"))
    out = io.StringIO()
    assert cli.run(["zeta", "fit", "--chi", "mod3quad", "-p", "5"], stdout=out) == 0
    assert json.loads(out.getvalue())["config"]["N"] == 9
    assert list((tmp_path / "envcache").glob("*.json"))


def test_pretty_rendering(tmp_path):
    code, text = run(["field", "info", "--disc", "5", "-p", "11", "--pretty"], tmp_path)
    assert code == 0
    assert "result.primes_above_p.splitting" in text and '"split"' in text
    assert not text.lstrip().startswith("{")


@pytest.mark.parametrize("argv", [
    ["field", "info", "--disc", "12"],
    ["chars", "list", "--modulus", "7"],
    ["chars", "show", "--chi", "mod3quad*mod7quad", "-p", "11"],
    ["eis", "constant", "--chi", "mod7quad", "-p", "11"],
    ["eis", "coeffs", "--chi", "mod7quad", "-p", "11", "--weight", "11", "--bound", "6"],
    ["zeta", "check-zero", "--phi1", "mod3quad", "--phi2", "mod3quad*mod7quad", "-p", "11"],
    ["linv", "rank-check", "--disc", "5", "--chi", "mod7quad", "-p", "11"],
    ["deform", "coeffs", "--chi", "mod7quad", "-p", "11", "--bound", "10"],
    ["deform", "gross-stark", "--chi", "mod7quad", "-p", "11"],
    ["deform", "combo-check", "--disc", "5", "--chi", "mod7quad", "-p", "23", "--bound", "40"],
])
def test_subcommands_succeed(argv, tmp_path):
    code, text = run(argv, tmp_path)
    assert code == 0, text
    doc = json.loads(text)
    assert doc["version"] == __version__ and "result" in doc


def test_console_script_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "artifact.cli", "selftest"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["passed"]
