import csv
import io
import json
import subprocess
import sys

import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from specsing import cli
from specsing.config import (
    ConfigError,
    dump_config,
    load_config,
    medium_from_dict,
    medium_to_dict,
    parse_config,
    spec_from_dict,
    spec_to_dict,
)
from specsing.potential import Barrier, DeltaArray, GainProfile
from specsing.slab import REFERENCE_MEDIUM

MEDIUM = {"n0": 3.4, "L_um": 300, "lambda0_nm": 1500, "gamma_hat": 0.02, "alpha_per_cm": 200}


def write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(payload))
    return str(p)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


# -- config ----------------------------------------------------------------------

def test_spec_round_trip():
    for spec in (DeltaArray((0.2, 0.7), (1 + 2j, -3.0)), Barrier(1 + 0.5j, 2.0, 0.3, GainProfile("double", 0.4))):
        assert spec_from_dict(yaml.safe_load(yaml.safe_dump(spec_to_dict(spec)))) == spec


@given(st.floats(1.01, 5), st.floats(1, 1e4), st.floats(100, 3000), st.floats(1e-3, 0.99), st.floats(1, 1e3))
def test_medium_round_trip(n0, L, lam, gh, a):
    m = REFERENCE_MEDIUM.replace(n0=n0, L_um=L, lambda0_nm=lam, gamma_hat=gh, alpha_per_cm=a)
    assert medium_from_dict(medium_to_dict(m)) == m


def test_units_live_in_keys():
    with pytest.raises(ConfigError):
        medium_from_dict({**MEDIUM, "L": 300})


def test_config_structure():
    with pytest.raises(ConfigError):
        parse_config({"deltas": {}, "slab": {}})
    with pytest.raises(ConfigError):
        parse_config({"slab": {}, "output": {"format": "xml"}})
    with pytest.raises(ConfigError):
        parse_config({"slab": {}, "threads": 0})
    cfg = parse_config({"slab": {"medium": MEDIUM}, "output": {"path": "t.csv"}, "threads": 2})
    assert parse_config(yaml.safe_load(dump_config(cfg))) == cfg


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("slab: [unclosed")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_grid_parsing():
    assert len(cli.parse_grid("0:0.5:0.01")) == 51
    assert cli.parse_grid("0:0.5:0.01")[-1] == 0.5
    with pytest.raises(ConfigError):
        cli.parse_grid("0:1")


def test_thread_env(monkeypatch):
    monkeypatch.setenv("SPECSING_THREADS", "3")
    assert cli.thread_count() == 3
    monkeypatch.setenv("SPECSING_THREADS", "many")
    with pytest.raises(ConfigError):
        cli.thread_count()


# -- deltas ------------------------------------------------------------------------

def test_deltas_imaginary_coupling(tmp_path, capsys):
    cfg = write(tmp_path, "d.yaml", {"deltas": {"centers": [0.3], "couplings": [[0, 10]], "k_range": [4, 6]}})
    code, out, err = run(["deltas", "--config", cfg], capsys)
    assert code == 0
    roots = [r for r in rows_of(out) if r["row"] == "root"]
    assert len(roots) == 1
    assert float(roots[0]["k"]) == pytest.approx(5.0, abs=1e-9)
    assert "1 singularity" in err


def test_deltas_real_coupling(tmp_path, capsys):
    cfg = write(tmp_path, "d.yaml", {"deltas": {"centers": [0.3], "couplings": [3], "k_range": [4, 6]}})
    code, out, _ = run(["deltas", "--config", cfg, "--format", "json"], capsys)
    assert code == 0
    assert [r for r in json.loads(out)["rows"] if r["row"] == "root"] == []


def test_deltas_malformed_centers(tmp_path, capsys):
    cfg = write(tmp_path, "d.yaml", {"deltas": {"centers": [0.3, 0.2], "couplings": [3, 1], "k_range": [4, 6]}})
    code, _, err = run(["deltas", "--config", cfg], capsys)
    assert code == 2
    assert "UnorderedCenters" in err


def test_deltas_solve_strategy(tmp_path, capsys):
    cfg = write(tmp_path, "d.yaml", {"deltas": {"centers": [0.5], "couplings": [1], "k_range": [4, 6],
                                                "n_grid": 5, "strategy": "solve"}})
    code, out, _ = run(["deltas", "--config", cfg], capsys)
    roots = [r for r in rows_of(out) if r["row"] == "root"]
    assert code == 0 and len(roots) == 5
    mid = roots[2]
    assert (float(mid["coupling_re"]), float(mid["coupling_im"])) == pytest.approx((0, 10), abs=1e-12)


# -- slab ------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def slab_cfg(tmp_path_factory):
    d = tmp_path_factory.mktemp("slab")
    payload = {"slab": {"medium": MEDIUM, "modes": [1358, 1359, 1360, 1361, 1362], "nus": [0, 0.1, 0.2, 0.3, 0.5]}}
    return write(d, "s.yaml", payload), d


def test_slab_table(slab_cfg, capsys):
    cfg, d = slab_cfg
    out = d / "table.csv"
    code, _, _ = run(["slab", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0
    text = out.read_text()
    rows = rows_of(text)
    assert len(rows) == 50
    assert list(rows[0]) == cli.SLAB_COLUMNS
    keys = [(int(r["m"]), float(r["nu"]), r["pumping"]) for r in rows]
    assert keys == sorted(keys, key=lambda t: (t[0], t[1], t[2] != "single"))
    # deterministic for a fixed config, whatever the thread count
    out2 = d / "table2.csv"
    run(["slab", "--config", cfg, "--out", str(out2)], capsys)
    assert out2.read_text() == text


def test_slab_curves(slab_cfg, capsys):
    cfg, d = slab_cfg
    small = write(d, "one.yaml", {"slab": {"medium": MEDIUM, "modes": [1360], "nus": [0.1]}})
    out = d / "one.csv"
    code, _, _ = run(["slab", "--config", small, "--out", str(out), "--curves", "--nu-grid", "0:0.5:0.01"], capsys)
    assert code == 0
    curves = rows_of((d / "one.curves.csv").read_text())
    assert len(curves) == 2 * 51
    assert sum(r["pumping"] == "double" for r in curves) == 51


def test_slab_verify_column(slab_cfg, capsys):
    cfg, d = slab_cfg
    small = write(d, "v.yaml", {"slab": {"medium": MEDIUM, "modes": [1360], "nus": [0.1]}})
    code, out, _ = run(["slab", "--config", small, "--verify"], capsys)
    rows = rows_of(out)
    assert code == 0
    assert "full_numeric_residual" in rows[0]
    assert all(float(r["full_numeric_residual"]) >= 0 for r in rows)


def test_slab_bad_medium(tmp_path, capsys):
    cfg = write(tmp_path, "s.yaml", {"slab": {"medium": {**MEDIUM, "n0": 0.5}, "modes": [1360], "nus": [0]}})
    assert run(["slab", "--config", cfg], capsys)[0] == 2


def test_slab_numerical_failure(tmp_path, capsys):
    # a mode number far from the gain window cannot be reached from its seed
    cfg = write(tmp_path, "s.yaml", {"slab": {"medium": MEDIUM, "modes": [5], "nus": [0]}})
    code, _, err = run(["slab", "--config", cfg], capsys)
    assert code == 3
    assert "numerical failure" in err


# -- verify -------------------------------------------------------------------------------

def test_verify_default_passes(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0, out
    assert "F2_self_convergence" in out


def test_verify_impossible_tolerance(capsys):
    code, out, _ = run(["verify", "--quick", "--tol", "1e-30"], capsys)
    assert code == 1
    assert "failed: oracle_triangle" in out
    assert "F2_self_convergence" not in out


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "specsing.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "deltas" in r.stdout and "slab" in r.stdout and "verify" in r.stdout
