import csv
import io
from pathlib import Path

import pytest

from congsum.cli import main
from congsum.config import load_config, parse_config
from congsum.csvio import rows_to_text
from congsum.errors import ConfigError

ROOT = Path(__file__).resolve().parents[1]
QUICK = str(ROOT / "configs" / "quick.ini")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_jcount_worked_example(capsys, tmp_path):
    cfg = tmp_path / "j.ini"
    cfg.write_text("[general]\nseed = 1\n[jcount]\np = 5\nH = 2\nmset = 1, 2\n")
    code, out, _ = run(capsys, "jcount", "--config", str(cfg))
    assert code == 0
    (row,) = read_csv(out)
    assert (row["oracle"], row["fast"], row["charformula_rounded"]) == ("6", "6", "6")
    assert float(row["charformula"]) == pytest.approx(6.0)


def test_not_prime_is_a_config_error(capsys, tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[general]\nseed = 1\n[jcount]\np = 91\n")
    code, _, err = run(capsys, "jcount", "--config", str(cfg))
    assert code == 2 and "not prime" in err


@pytest.mark.parametrize("text, needle", [
    ("[jcount]\np = 5\n", "seed is mandatory"),
    ("[general]\nseed = 1\n[jsweep]\n\nH = 10, x\n", "bad.ini:5"),
    ("[general]\nseed = 1\n[jsweep]\nbogus = 3\n", "unknown key 'bogus'"),
    ("[general]\nseed = 1\n[bilinear]\nell = 2, 3\n", "must be even"),
    ("[general]\nseed = 1\n[nonsense]\n", "unknown section"),
    ("[general]\nseed = 1\nthis is not ini\n", "bad.ini"),
])
def test_config_errors(capsys, tmp_path, text, needle):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(text)
    code, _, err = run(capsys, "jsweep", "--config", str(cfg))
    assert code == 2
    assert needle in err


def test_missing_config_file(capsys, tmp_path):
    code, _, err = run(capsys, "jsweep", "--config", str(tmp_path / "nope.ini"))
    assert code == 2 and "cannot read" in err


def test_config_parsing():
    cfg = parse_config("[general]\nseed = 9\no1_exponent = 2\n[trilinear]\nH = 5, 6\nchi = 3\n", seed=11)
    assert cfg.seed == 11
    assert cfg.o1.exponent == 2.0 and cfg.o1.constant == 1.0
    assert cfg.trilinear.H == (5, 6) and cfg.trilinear.chi == "3"
    with pytest.raises(ConfigError):
        parse_config("[general]\nseed = x\n")
    for name in ("default.ini", "quick.ini"):
        load_config(ROOT / "configs" / name)


@pytest.mark.parametrize("sub", ["jsweep", "lattice", "weil", "kloosterman", "bilinear", "trilinear"])
def test_subcommands_are_deterministic(capsys, tmp_path, sub):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, sub, "--config", QUICK, "--out", str(a), "--jobs", "1")[0] == 0
    assert run(capsys, sub, "--config", QUICK, "--out", str(b), "--jobs", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = read_csv(a.read_text())
    assert rows and "seed" in rows[0] and "o1" in rows[0]
    assert all(r["seed"] == "7" for r in rows)


def test_seed_override_changes_sweep(capsys):
    _, out7, _ = run(capsys, "jsweep", "--config", QUICK)
    _, out8, _ = run(capsys, "jsweep", "--config", QUICK, "--seed", "8")
    assert out7 != out8


def test_jobs_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("CONGSUM_JOBS", "2")
    _, env_out, _ = run(capsys, "trilinear", "--config", QUICK)
    monkeypatch.delenv("CONGSUM_JOBS")
    _, plain_out, _ = run(capsys, "trilinear", "--config", QUICK)
    assert env_out == plain_out


def test_kloosterman_cache_flag(capsys, tmp_path):
    cache = tmp_path / "cache"
    _, first, _ = run(capsys, "kloosterman", "--config", QUICK, "--cache", str(cache))
    files = sorted(p.name for p in cache.iterdir())
    assert "kloosterman_p101_r3.bin" in files
    _, second, _ = run(capsys, "kloosterman", "--config", QUICK, "--cache", str(cache))
    assert first == second
    rows = read_csv(first)
    assert all(r["deligne_ok"] == "true" for r in rows)


def test_sweep_rows_carry_flags(capsys):
    _, out, _ = run(capsys, "bilinear", "--config", QUICK)
    row = read_csv(out)[0]
    for col in ("S_re", "S_im", "bilinear_bound", "bilinear_ratio", "kms_cond1", "kms_cond2", "kms_applicable", "Mplus", "ell"):
        assert col in row
    _, out, _ = run(capsys, "jsweep", "--config", QUICK)
    row = read_csv(out)[0]
    for col in ("J", "bound_basic", "basic_constant", "energy_regime", "ratio_energy", "bound_garaev", "cell_seed"):
        assert col in row


def test_csv_formatting():
    text = rows_to_text([{"a": 0.1, "z": 1 + 2j, "flag": True, "none": None}, {"a": 1 / 3, "extra": 5}])
    lines = text.splitlines()
    assert lines[0] == "a,z_re,z_im,flag,none,extra"
    assert lines[1] == "0.10000000000000001,1,2,true,,"
    assert float(lines[2].split(",")[0]) == 1 / 3
