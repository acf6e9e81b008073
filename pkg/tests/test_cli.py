import json
import subprocess
import sys

import pytest

from ahrelay.cli import SweepRequest, build_parser, main, run
from ahrelay.errors import ConfigError
from ahrelay.scenario import Grid


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def summary(out):
    return dict(kv.split("=", 1) for kv in out.split())


def test_range_summary(capsys):
    code, out, _ = call(capsys, "range", "--mcs", "10", "--tx", "ap-eu", "--deploy", "macro", "--pout", "0")
    assert code == 0
    assert float(summary(out)["max_range_m"]) == pytest.approx(549, rel=0.01)


def test_fade_margin_summary(capsys):
    code, out, _ = call(capsys, "fade-margin", "--model", "rayleigh", "--pout", "0.1")
    assert (code, out) == (0, "fm_db=9.77")


def test_relay_rate_summary(capsys, scenario_dir):
    code, out, _ = call(capsys, "relay-rate", "--scenario", str(scenario_dir / "dl_850m_macro_macro.cfg"), "--target", "1e5")
    assert code == 0
    assert float(summary(out)["hop2_max_m"]) == pytest.approx(428, rel=0.01)


def test_relay_range_csv(capsys, tmp_path, scenario_dir):
    out_path = tmp_path / "r.csv"
    code, out, _ = call(capsys, "relay-range", "-s", str(scenario_dir / "dl_400m_macro_macro.cfg"), "-o", str(out_path))
    assert code == 0
    rows = out_path.read_text().splitlines()
    assert rows[0] == "rs_st_distance_m,min_prx_dbm,ap_rs_prx_dbm,rs_st_prx_dbm,mds_dbm"
    assert len(rows) == 1 + 60  # grid 10:600:10


def test_json_and_gnuplot(capsys, tmp_path):
    out_path = tmp_path / "fm.json"
    code, _, _ = call(capsys, "fade-margin", "--pout", "0.1", "--grid", "0.05:0.4:0.05", "-o", str(out_path),
                      "--format", "json", "--gnuplot-stub")
    assert code == 0
    data = json.loads(out_path.read_text())
    assert len(data["rows"]) == 8
    assert data["rows"][1]["fm_db"] == pytest.approx(9.77, abs=0.01)
    stub = (tmp_path / "fm.gp").read_text()
    assert "fm.json" in stub and "plot" in stub


def test_infeasible_exit_code(capsys, scenario_dir):
    code, _, err = call(capsys, "relay-range", "-s", str(scenario_dir / "dl_400m_macro_macro.cfg"), "--ap-rs-distance", "3000")
    assert code == 3
    fields = summary(err.split(" message=")[0])
    assert fields["error"] == "infeasible" and fields["hop"] == "1" and float(fields["deficit_db"]) > 0


def test_config_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("[scenario]\nmcs = ten\n")
    code, _, err = call(capsys, "relay-range", "-s", str(bad))
    assert code == 2
    assert "error=config" in err and "line=2" in err


def test_not_defined_is_config_error(capsys):
    code, _, err = call(capsys, "catalog", "--mcs", "9", "--bw", "2")
    assert code == 2 and "not defined" in err


def test_missing_output_dir(capsys, tmp_path):
    code, _, err = call(capsys, "fade-margin", "--pout", "0.1", "-o", str(tmp_path / "nope" / "x.csv"))
    assert code == 2


def test_bad_grid(capsys):
    code, _, _ = call(capsys, "range", "--grid", "5:1:1")
    assert code == 2


def test_numeric_failure_exit_code(capsys, monkeypatch):
    from ahrelay import fading

    monkeypatch.setattr(fading, "BISECT_MAX_ITER", 2)
    code, _, err = call(capsys, "fade-margin", "--model", "rician", "--pout", "0.1")
    assert code == 4 and "error=numeric" in err


def test_catalog_region(capsys):
    code, out, _ = call(capsys, "catalog", "--region", "Europe")
    assert code == 0 and "max_erp_dbm=10.00" in out


def test_catalog_env(capsys, tmp_path, monkeypatch):
    from ahrelay.catalog import dumps, load_catalog

    alt = tmp_path / "c.ini"
    alt.write_text(dumps(load_catalog()).replace("mds.1.0 = -98.0", "mds.1.0 = -101.0"))
    monkeypatch.setenv("AHRELAY_CATALOG", str(alt))
    code, out, _ = call(capsys, "catalog", "--mcs", "10")
    assert "mds_dbm=-101.00" in out
    monkeypatch.delenv("AHRELAY_CATALOG")
    code, out, _ = call(capsys, "--catalog", str(alt), "catalog", "--mcs", "10")
    assert "mds_dbm=-101.00" in out


def test_ber_sim_byte_identical(capsys, tmp_path, scenario_dir):
    cfg = str(scenario_dir / "sim_dl_mcs0.cfg")
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert call(capsys, "ber-sim", "-s", cfg, "--trials", "4096", "-o", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert paths[0].read_text().splitlines()[0] == "distance_m,ber,bits,ci95"


def test_sweep_request_validation(tmp_path):
    with pytest.raises(ConfigError):
        SweepRequest("plot").validate()
    with pytest.raises(ConfigError):
        SweepRequest("range", format="xml").validate()
    with pytest.raises(ConfigError):
        Grid(1.0, 1.0, 1.0)


def test_run_direct(tmp_path, capsys):
    req = SweepRequest("fade-margin", options={"model": "rayleigh", "k_db": 9.0, "pout": 0.05})
    assert run(req) == 0
    assert capsys.readouterr().out.strip() == "fm_db=12.90"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ahrelay", "fade-margin", "--pout", "0.4"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "fm_db=2.92"


def test_help_lists_commands():
    text = build_parser().format_help()
    for cmd in ("fade-margin", "range", "rate", "relay-range", "relay-rate", "ber-sim", "catalog"):
        assert cmd in text
