import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from limitbands import format_bars
from limitbands.cli import OUTPUT_ENV, run

from .test_market import make_bars


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bands_csv(capsys):
    code, out, _ = _run(capsys, "bands", "--n-bands", "3")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:3] == ["index", "eps_lo[hbar_omega]", "eps_hi[hbar_omega]"]
    assert len(rows) == 4
    assert float(rows[1][1]) < 0.5 < float(rows[1][2])


def test_observables_json(capsys):
    code, out, _ = _run(capsys, "observables", "--n-bands", "2", "--n-k", "4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert "p_limit_definition" in doc
    assert doc["columns"][1] == "sigma2[d^2]"
    assert len(doc["rows"]) == 8
    s2, s2_log = doc["rows"][0][1], doc["rows"][0][6]
    assert s2_log == pytest.approx(s2 * doc["d_log"] ** 2)


def test_dispersion_single_band(capsys):
    code, out, _ = _run(capsys, "dispersion", "--n-bands", "3", "--band", "2", "--n-k", "5")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert len(rows) == 5 and {r[0] for r in rows} == {"2"}


def test_approx_table(capsys):
    code, out, _ = _run(capsys, "approx", "--alpha", "3.5", "--n-bands", "3")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert float(rows[0]["tb_width_relerr[1]"]) < 0.02


def test_deterministic(capsys):
    a = _run(capsys, "observables", "--n-bands", "2", "--n-k", "3")[1]
    b = _run(capsys, "observables", "--n-bands", "2", "--n-k", "3")[1]
    assert a == b


def test_output_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "out"))
    code, out, _ = _run(capsys, "bands", "--n-bands", "2", "--format", "json")
    assert code == 0 and out == ""
    doc = json.loads((tmp_path / "out" / "bands.json").read_text())
    assert len(doc["rows"]) == 2
    target = tmp_path / "explicit.csv"
    assert run(["bands", "--n-bands", "1", "--output", str(target)]) == 0
    assert target.read_text().startswith("index,")


def test_exit_codes(capsys):
    assert _run(capsys, "bands", "--alpha", "-2")[0] == 1
    assert _run(capsys, "bands", "--no-such-flag")[0] == 1
    assert _run(capsys, "dispersion", "--n-bands", "2", "--band", "7")[0] == 1
    assert _run(capsys, "observables", "--n-bands", "1", "--n-k", "1")[0] == 1


def test_exit_code_on_usage_error(capsys):
    assert run([]) == 1
    assert run(["--help"]) == 0


def test_market(tmp_path, capsys, rng):
    n = 600
    vol = np.arange(1, n + 1) * 100.0
    closes = np.round(10 * np.exp(rng.normal(0, 0.002, n).cumsum()), 5)
    path = tmp_path / "bars.csv"
    path.write_text(format_bars(make_bars(closes, vol)))
    pts = tmp_path / "pts.csv"
    code, out, _ = _run(capsys, "market", "--input", str(path), "--window", "20", "--points", str(pts))
    assert code == 0
    rep = json.loads(out)
    assert set(rep) >= {"global_corr", "clusters", "band_like", "status"}
    assert len(pts.read_text().splitlines()) == 31


def test_market_bad_input(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,open,high,low,close,volume\n2024-01-02T09:30:00+08:00,1,1,1,oops,5\n")
    code, _, err = _run(capsys, "market", "--input", str(path))
    assert code == 1 and "row 2" in err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "limitbands", "bands", "--n-bands", "1"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("index,")


def test_bands_example(capsys):
    code, out, _ = _run(capsys, "bands", "--alpha", "2.55", "--n-bands", "8", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 8
    lo, hi = float(rows[0]["eps_lo[hbar_omega]"]), float(rows[0]["eps_hi[hbar_omega]"])
    assert 0.5 * (lo + hi) == pytest.approx(0.5, abs=0.01)


def test_observables_default_reaches_uniform_limit(capsys):
    code, out, _ = _run(capsys, "observables", "--alpha", "2.55", "--n-k", "64")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    high = [float(r["sigma2[d^2]"]) for r in rows if float(r["eps[hbar_omega]"]) > 4 * 2.55 ** 2]
    assert high and abs(np.mean(high) * 12 - 1) < 0.05


def test_units_in_headers(capsys):
    for cmd in ("bands", "dispersion", "observables", "approx"):
        out = _run(capsys, cmd, "--n-bands", "2", "--n-k", "2")[1] if cmd in ("dispersion", "observables") \
            else _run(capsys, cmd, "--n-bands", "2")[1]
        header = out.splitlines()[0].split(",")
        assert all("[" in h for h in header if h not in ("index", "band", "node_edge", "resolved"))


def test_conflicting_band_flags(capsys):
    assert _run(capsys, "bands", "--n-bands", "2", "--eps-max", "3")[0] == 1
