import csv
import io
import json
import subprocess
import sys

import pytest

from gridheadroom.cli import main
from gridheadroom.dataset import write_canonical

from conftest import synthetic_year

IDENTITY_MAPPING = ("timestamp = timestamp_utc\ndemand = demand_gw\nnuclear = nuclear_gw\n"
                    "wind = wind_gw\nsolar = solar_gw\nunit = GW\n")


def run_cli(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_ingest_canonical_is_byte_identical(tmp_path, canonical_file):
    mapping = tmp_path / "identity.map"
    mapping.write_text(IDENTITY_MAPPING)
    out = tmp_path / "again.csv"
    assert run_cli("ingest", canonical_file, "--mapping", mapping, "--out", out) == 0
    assert out.read_bytes() == canonical_file.read_bytes()


def test_ingest_gridwatch_style(tmp_path, capsys):
    ds = synthetic_year(seed=9)
    raw = tmp_path / "gridwatch.csv"
    with open(raw, "w") as fh:
        fh.write("id, timestamp, demand, nuclear, wind, solar\n")
        for i in range(ds.interval_count):
            r = ds[i]
            if i == 7:
                fh.write(f"{i}, {r.timestamp:%Y-%m-%d %H:%M:%S}, n/a, 1, 1, 1\n")
                continue
            fh.write(f"{i}, {r.timestamp:%Y-%m-%d %H:%M:%S}, {r.demand * 1000:.3f}, "
                     f"{r.nuclear * 1000:.3f}, {r.wind * 1000:.3f}, {r.solar * 1000:.3f}\n")
    mapping = tmp_path / "gw.map"
    mapping.write_text("timestamp=timestamp\ndemand=demand\nnuclear=nuclear\nwind=wind\n"
                       "solar=solar\nunit: MW\n")
    out = tmp_path / "c.csv"
    assert run_cli("ingest", raw, "--mapping", mapping, "--out", out) == 0
    printed = capsys.readouterr().out
    assert "rejected: 1" in printed and "intervals: 104832" in printed
    assert len(read_csv(out)) == 104833


def test_ingest_missing_mapping_exits_2(tmp_path, canonical_file):
    assert run_cli("ingest", canonical_file, "--mapping", tmp_path / "nope",
                   "--out", tmp_path / "x.csv") == 2


def test_ingest_sparse_data_exits_2(tmp_path):
    ds = synthetic_year(seed=9, weeks=4)
    raw = tmp_path / "short.csv"
    write_canonical(ds, raw)
    mapping = tmp_path / "identity.map"
    mapping.write_text(IDENTITY_MAPPING)
    assert run_cli("ingest", raw, "--mapping", mapping, "--out", tmp_path / "x.csv") == 2


def test_run_json(tmp_path, canonical_file):
    out = tmp_path / "run.json"
    assert run_cli("run", "--dataset", canonical_file, "--preset", "neso2030", "--out", out) == 0
    result = json.loads(out.read_text())
    assert list(result) == ["emissions_mt_pa", "mean_excess_gw", "mean_accommodated_gw",
                            "mean_gas_gw", "peak_gas_gw"]
    assert 0 < result["emissions_mt_pa"] < 150


def test_run_weekly_csv(tmp_path, canonical_file):
    out = tmp_path / "weekly.csv"
    assert run_cli("run", "--dataset", canonical_file, "--format", "csv", "--out", out) == 0
    rows = read_csv(out)
    assert rows[0] == ["week", "emissions_mt"]
    assert len(rows) == 53


def test_flags_override_scenario_file(tmp_path, canonical_file):
    scen = tmp_path / "s.txt"
    scen.write_text("hdrm_annual = 30\nwm = 0\nsm = 0\nemission_intensity = 0.556\nlabel = zero\n")
    out = tmp_path / "r.json"
    assert run_cli("run", "--dataset", canonical_file, "--scenario-file", scen, "--out", out) == 0
    assert json.loads(out.read_text())["emissions_mt_pa"] == pytest.approx(146.1, abs=0.1)
    assert run_cli("run", "--dataset", canonical_file, "--scenario-file", scen,
                   "--hdrm", 15, "--out", out) == 0
    assert json.loads(out.read_text())["mean_gas_gw"] == pytest.approx(15.0)


def test_hist_csv(tmp_path, canonical_file):
    out = tmp_path / "fig2.csv"
    assert run_cli("hist", "--dataset", canonical_file, "--preset", "neso2030",
                   "--band-width", 5, "--out", out) == 0
    rows = read_csv(out)
    assert rows[0] == ["band_center_gw", "available_gw", "accommodated_gw"]
    assert rows[1][0] == "2.5"


def test_sweep_csv(tmp_path, canonical_file):
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "--dataset", canonical_file, "--wm", "1,1.65,3.3,4.95", "--out", out) == 0
    rows = read_csv(out)
    assert rows[0] == ["wm", "wind_gw", "emissions_mt_pa", "excess_gw"]
    assert [r[0] for r in rows[1:]] == ["1", "1.65", "3.3", "4.95"]
    emissions = [float(r[2]) for r in rows[1:]]
    assert emissions == sorted(emissions, reverse=True)


def test_lull_outputs(tmp_path, canonical_file):
    out = tmp_path / "lull.csv"
    args = ("lull", "--dataset", canonical_file, "--window-start", "2017-01-16",
            "--window-end", "2017-01-25")
    assert run_cli(*args, "--out", out) == 0
    rows = read_csv(out)
    assert rows[0] == ["timestamp_utc", "available_gw", "accommodated_gw", "gas_gw", "hdrm_gw"]
    assert len(rows) == 9 * 288 + 1
    assert rows[1][0] == "2017-01-16T00:00:00Z"
    out_json = tmp_path / "lull.json"
    assert run_cli(*args, "--format", "json", "--out", out_json) == 0
    report = json.loads(out_json.read_text())
    assert report["duration_days"] == 9 and report["deficit_gwh"] > 0


def test_exit_codes(tmp_path, canonical_file):
    assert run_cli("run", "--dataset", tmp_path / "missing.csv") == 2
    assert run_cli("run", "--dataset", canonical_file, "--hdrm", -5) == 3
    assert run_cli("run", "--dataset", canonical_file, "--scenario-file", tmp_path / "no") == 3
    assert run_cli("lull", "--dataset", canonical_file, "--window-start", "2017-01-16") == 3
    assert run_cli("hist", "--dataset", canonical_file, "--band-width", 0) == 3
    with pytest.raises(SystemExit) as exc:
        run_cli("run", "--bogus")
    assert exc.value.code == 3


def test_dataset_from_environment(tmp_path, canonical_file, monkeypatch):
    (tmp_path / "uk2017.csv").write_bytes(canonical_file.read_bytes())
    monkeypatch.setenv("GRIDHEADROOM_DATA", str(tmp_path))
    assert run_cli("summary", "--out", tmp_path / "s.json") == 0
    info = json.loads((tmp_path / "s.json").read_text())
    assert info["interval_count"] == 104832 and len(info["seasonal_factors"]) == 52


def _bundle(tmp_path, canonical_file, name, *extra):
    out = tmp_path / name
    assert run_cli("report", "--dataset", canonical_file, "--out", out, *extra) == 0
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_report_bundle(tmp_path, canonical_file):
    files = _bundle(tmp_path, canonical_file, "bundle")
    manifest = json.loads(files["manifest.json"])
    assert len(manifest["artifacts"]) == 7
    assert {a["file"] for a in manifest["artifacts"]} | {"manifest.json"} == set(files)
    sweep = list(csv.reader(io.StringIO(files["figure5_sweep.csv"].decode())))
    assert len(sweep) == 20  # default 1..10 in 0.5 steps
    table2 = json.loads(files["table2.json"])
    assert set(table2) == {"composite", "histogram", "reference_neso"}


def test_report_is_deterministic(tmp_path, canonical_file):
    a = _bundle(tmp_path, canonical_file, "a")
    b = _bundle(tmp_path, canonical_file, "b", "--workers", 4)
    assert a == b


def test_module_entry_point(canonical_file):
    proc = subprocess.run([sys.executable, "-m", "gridheadroom.cli", "run", "--dataset",
                           str(canonical_file)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "emissions_mt_pa" in proc.stdout
