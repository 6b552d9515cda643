import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from soi.cli import RunConfig, fmt, main
from soi.reports import cmd_curves, cmd_so4_compare


def run(tmp_path, *argv):
    code = main([*argv, "--out", str(tmp_path)])
    return code, sorted(tmp_path.iterdir())


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


def test_volume_closed(tmp_path):
    code, files = run(tmp_path, "volume", "--group", "su2", "--spectrum", "0.5,0.5", "--method", "closed")
    assert code == 0
    out = [f for f in files if not f.name.endswith(".config.json")][0]
    assert out.name.startswith("volume-") and out.suffix == ".json"
    rec = json.loads(out.read_text())
    assert rec["value"] == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert {"value", "method", "std_error", "seed"} <= set(rec)


def test_volume_quadrature_matches_closed(tmp_path):
    code, files = run(tmp_path, "volume", "--group", "so3", "--spectrum", "0.5,0.3,0.2",
                      "--method", "quadrature", "--nodes", "32")
    assert code == 0
    rec = json.loads([f for f in files if not f.name.endswith("config.json")][0].read_text())
    exact = (math.pi**2 / 4) * math.sqrt(0.8 * 0.7 * 0.5)
    assert rec["value"] == pytest.approx(exact, rel=1e-8)


def test_volume_mc_repeat(tmp_path):
    args = ["volume", "--group", "so4", "--spectrum", "0.4,0.3,0.2,0.1", "--method", "mc",
            "--samples", "20000", "--seed", "7"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    for fa in a.iterdir():
        assert fa.read_bytes() == (b / fa.name).read_bytes()


def test_curves_su2(tmp_path):
    code, files = run(tmp_path, "curves", "--group", "su2")
    assert code == 0
    rows = read_csv([f for f in files if f.suffix == ".csv"][0])
    assert rows[0] == ["lambda1", "v_norm", "svn_norm", "sl_norm"]
    data = np.array(rows[1:], dtype=float)
    assert len(data) == 101
    assert np.all(data[:, 1] >= data[:, 2] - 1e-12)
    assert np.all(data[:, 1] >= data[:, 3] - 1e-12)
    assert np.all(data[[0, -1], 1:] == 0)
    assert np.all(np.diff(data[:, 0]) > 0)


def test_curves_so3_center():
    header, rows = cmd_curves("so3", 30)
    assert header == ["lambda1", "lambda2", "v_norm", "svn_norm", "sl_norm"]
    center = [r for r in rows if abs(r[0] - 1 / 3) < 1e-12 and abs(r[1] - 1 / 3) < 1e-12]
    assert len(center) == 1
    assert center[0][2:] == pytest.approx([1, 1, 1], abs=1e-12)
    keys = [(r[0], r[1]) for r in rows]
    assert keys == sorted(keys)


def test_coarse_grain_outputs(tmp_path):
    code, files = run(tmp_path, "coarse-grain", "--ell", "60", "--k", "10")
    assert code == 0
    segs = [f for f in files if f.name.endswith("-segments.csv")][0]
    cells = [f for f in files if f.name.endswith("-cells.csv")][0]
    rows = read_csv(segs)
    assert rows[0] == ["observable", "segment", "lower", "upper", "count", "fraction", "avg_svn"]
    for obs in ("volume", "von_neumann", "linear"):
        frac = [float(r[5]) for r in rows[1:] if r[0] == obs]
        assert len(frac) == 10
        assert math.fsum(frac) == pytest.approx(1.0, abs=1e-12)
    cell_rows = read_csv(cells)
    assert cell_rows[0][:6] == ["cell_id", "eta1", "eta2", "lambda1", "lambda2", "lambda3"]
    assert len(cell_rows) - 1 == 45 * 30


def test_so4_compare_small():
    header, rows = cmd_so4_compare(count=20, samples=5000, seed=1)
    assert header[:3] == ["rank", "v_norm_product", "v_norm_mc"]
    assert [r[0] for r in rows] == list(range(1, 21))
    prod = [r[1] for r in rows]
    assert prod[0] == 1.0
    assert prod == sorted(prod, reverse=True)
    assert max(r[2] for r in rows) == 1.0


def test_asymptotics_command(tmp_path):
    code, files = run(tmp_path, "asymptotics", "--n-list", "3,5,11", "--weighting", "volume")
    assert code == 0
    table = [f for f in files if f.suffix == ".csv" and "-curves" not in f.name][0]
    rows = read_csv(table)
    assert rows[0] == ["N", "lambda1_star", "mass_ratio", "avg_svn"]
    data = np.array(rows[1:], dtype=float)
    assert np.all(data[:, 2] > 0.9999)
    assert np.all(np.diff(data[:, 3]) > 0)


def test_fidelity_command(tmp_path):
    code, files = run(tmp_path, "fidelity", "--rho", "0.7,0.3", "--sigma", "0.4,0.6")
    assert code == 0
    rec = json.loads([f for f in files if not f.name.endswith("config.json")][0].read_text())
    assert rec["value"] == pytest.approx(0.908998886412873, abs=1e-14)
    code, files = run(tmp_path / "soi", "fidelity", "--rho", "0.7,0.3", "--sigma", "0.4,0.6",
                      "--sigma-basis", "0.7,0.5,1.1,0.3", "--method", "soi", "--budget", "5")
    assert code == 0


def test_csv_format(tmp_path):
    run(tmp_path, "curves", "--group", "su2", "--resolution", "7")
    raw = next(tmp_path.glob("*.csv")).read_bytes()
    assert b"\r" not in raw
    assert raw.endswith(b"\n")
    raw.decode("utf-8")
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(1 / 3)) == 1 / 3


@pytest.mark.parametrize("argv", [
    ["volume", "--group", "su2", "--spectrum", "0.5,0.6"],
    ["volume", "--group", "su2", "--spectrum", "a,b"],
    ["volume", "--group", "su2"],
    ["bogus"],
    ["curves", "--group", "su3"],
    ["coarse-grain", "--k", "0"],
    ["asymptotics", "--n-list", "2"],
    ["volume", "--group", "so3", "--spectrum", "0.5,0.3,0.2", "--method", "magic"],
    [],
])
def test_invalid_arguments_exit_2(tmp_path, argv, capsys):
    assert main([*argv, "--out", str(tmp_path)]) == 2


def test_numeric_failure_exit_3(tmp_path):
    assert main(["asymptotics", "--n-list", "5", "--level", "2", "--out", str(tmp_path)]) == 3


def test_config_roundtrip():
    cfg = RunConfig("volume", group="su2", spectrum=[0.5, 0.5], seed=4)
    back = RunConfig.from_json(cfg.to_json())
    assert back == cfg and back.digest() == cfg.digest()
    assert RunConfig("volume", seed=5).digest() != RunConfig("volume", seed=4).digest()
    with pytest.raises(ValueError):
        RunConfig.from_json('{"command": "volume", "colour": 1}')


def test_replay_from_config_is_bit_identical(tmp_path):
    first = tmp_path / "first"
    assert main(["volume", "--group", "so3", "--spectrum", "0.5,0.3,0.2", "--method", "mc",
                 "--samples", "5000", "--seed", "11", "--out", str(first)]) == 0
    cfg = next(first.glob("*.config.json"))
    again = tmp_path / "again"
    assert main(["--config", str(cfg), "--out", str(again)]) == 0
    assert sorted(p.name for p in first.iterdir()) == sorted(p.name for p in again.iterdir())
    for p in first.iterdir():
        assert p.read_bytes() == (again / p.name).read_bytes()


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "soi", "volume", "--group", "so2", "--spectrum", "0.9,0.1",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert len(proc.stdout.split()) == 2
