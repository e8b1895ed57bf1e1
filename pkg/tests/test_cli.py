import csv
import io
import json
import logging

import pytest

from flagmirror.cache import ENV_VAR, SeriesCache
from flagmirror.cli import main
from flagmirror.combinatorics import Perm
from flagmirror.numerics import sample_params
from flagmirror.vertex import vertex_series

CLAIM_KEYS = {"claim_id", "paper_ref", "residual", "tolerance", "pass", "runtime_ms"}


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv(ENV_VAR, str(d))
    return d


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_all_n2(capsys):
    code, out, _ = run(capsys, "verify", "all", "--n", "2", "--seed", "7")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["claims"]) >= 8
    assert all(CLAIM_KEYS <= set(c) for c in doc["claims"])
    assert doc["config"]["seeds"] == [7] and doc["config"]["n"] == 2
    assert doc["summary"]["failed"] == 0


def test_unknown_flag(capsys):
    code, _, err = run(capsys, "verify", "all", "--bogus")
    assert code == 2
    assert json.loads(err)["error"]["type"] == "ConfigError"


def test_bad_perm_is_config_error(capsys):
    code, out, _ = run(capsys, "verify", "mirror", "--n", "2", "--perm", "1 2 3")
    assert code == 2
    assert "error" in json.loads(out)


def test_compute_vertex_csv(capsys):
    code, out, _ = run(capsys, "compute", "vertex", "--n", "2", "--perm", "1 2", "--degree", "4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["degree"] for r in rows] == ["0", "1", "2", "3", "4"]
    assert float(rows[0]["coefficient"]) == 1.0


def test_compute_stab_and_limit(capsys):
    code, out, _ = run(capsys, "compute", "stab", "--n", "3", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 6 and rows[0]["row"] == "1 2 3"
    code, out, _ = run(capsys, "compute", "limit", "--n", "2", "--degree", "2")
    assert code == 0 and len(list(csv.DictReader(io.StringIO(out)))) == 6


def test_check_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "mirror", "--n", "2", "--degree", "0")
    assert code == 1
    claim = json.loads(out)["claims"][0]
    assert claim["pass"] is False and claim["details"]["error"] == "TailTooLarge"


def test_cache_behaviour(capsys, cache_dir):
    args = ["compute", "vertex", "--n", "3", "--degree", "3", "--format", "json"]
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    a, b = json.loads(first), json.loads(second)
    assert a["cache"] == {"hits": 0, "misses": 6}
    assert b["cache"] == {"hits": 6, "misses": 0}
    assert a["rows"] == b["rows"]
    _, other_n, _ = run(capsys, *args, "--theta-terms", "30")
    assert json.loads(other_n)["cache"]["misses"] == 6
    _, off, _ = run(capsys, *args, "--no-cache")
    assert json.loads(off)["cache"] == {"hits": 0, "misses": 6}


def test_corrupt_entry_recomputed(capsys, cache_dir, caplog):
    args = ["compute", "vertex", "--n", "2", "--degree", "3", "--format", "json"]
    _, first, _ = run(capsys, *args)
    victim = sorted(cache_dir.glob("*.json"))[0]
    victim.write_text("{not json")
    with caplog.at_level(logging.WARNING):
        _, again, _ = run(capsys, *args)
    assert "corrupt" in caplog.text
    assert json.loads(again)["cache"] == {"hits": 1, "misses": 1}
    assert json.loads(again)["rows"] == json.loads(first)["rows"]


@pytest.mark.parametrize("backend", ["exact", "float"])
def test_cache_round_trip_is_bit_identical(tmp_path, backend):
    p = sample_params(2, 4, N=5, D=4, backend=backend)
    cache = SeriesCache(tmp_path)
    s = vertex_series(Perm((2, 1)), p)
    cache.put("v", p, 4, s)
    back = cache.get("v", p, 4)
    assert back.coeffs == s.coeffs
    assert all(type(a) is type(b) for a, b in zip(back.coeffs.values(), s.coeffs.values()))


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[run]\nn = 3\nseed = 2\nformat = "json"\n')
    code, out, _ = run(capsys, "verify", "triangularity", "--config", str(cfg))
    doc = json.loads(out)
    assert code == 0 and doc["config"]["n"] == 3 and doc["config"]["seeds"] == [2]
    code, out, _ = run(capsys, "verify", "triangularity", "--config", str(cfg), "--n", "2")
    assert json.loads(out)["config"]["n"] == 2


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[run]\nbogus = 1\n")
    code, _, _ = run(capsys, "verify", "all", "--config", str(cfg))
    assert code == 2


def test_params_file(capsys, tmp_path):
    pf = tmp_path / "p.toml"
    pf.write_text(sample_params(2, 3).to_toml())
    code, out, _ = run(capsys, "verify", "diagonal", "--params", str(pf), "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert {r["pass"] for r in rows} == {"True"}
    bad = tmp_path / "bad.toml"
    bad.write_text('[params]\nn = 2\nsqrt_q = "2/1"\nsqrt_hbar = "1/2"\n'
                   'sqrt_u = ["1/3", "1"]\nsqrt_zeta = ["1", "1/7"]\n')
    code, out, _ = run(capsys, "verify", "diagonal", "--params", str(bad))
    assert code == 2 and json.loads(out)["error"]["type"] == "DegenerateModulus"


def test_markdown_and_output_file(capsys, tmp_path):
    target = tmp_path / "out" / "report.md"
    code, out, _ = run(capsys, "verify", "stab-inverse", "--n", "2", "--format", "markdown",
                       "--output", str(target))
    assert code == 0 and out == ""
    text = target.read_text()
    assert text.startswith("**1 passed, 0 failed**")
    assert "| claim_id |" in text
    assert not list(target.parent.glob("*.tmp"))
