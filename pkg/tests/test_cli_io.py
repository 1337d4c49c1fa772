import json
import logging

import numpy as np
import pytest

from triaxdamage import cli, io
from triaxdamage import drivers as dv
from triaxdamage import material_model as mm


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_cfg(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


@pytest.mark.parametrize("args, expect", [
    (["100", "0", "0", "0", "0", "0"], {"eta": "0.333333", "theta0": "1"}),
    (["0", "0", "0", "100", "0", "0"], {"eta": "0", "theta0": "0"}),
    (["100", "50", "0", "0", "0", "0"], {"sigma_eq": "86.6025"}),
])
def test_invariants(capsys, args, expect):
    code, out, _ = run(["invariants", *args], capsys)
    assert code == 0
    fields = dict(kv.split("=") for kv in out.strip().split(","))
    for k, v in expect.items():
        assert fields[k] == v


def test_invariants_parse_errors(capsys):
    code, _, err = run(["invariants", "1", "x", "0", "0", "0", "0"], capsys)
    assert code == 1 and "not a number" in err
    with pytest.raises(SystemExit) as exc:
        cli.main(["invariants", "1", "2"])
    assert exc.value.code == 1


def test_unknown_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 1


def test_simulate_writes_records_and_summary(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, stdout, _ = run(["simulate", "--preset", "uniaxial_tension", "--steps", "100",
                           "--out", str(out)], capsys)
    assert code == 0
    assert stdout.startswith("peak_stress=")
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == io.UNITS_LINE
    assert lines[1].startswith("# params: ")
    header = [l for l in lines if not l.startswith("#")][0]
    assert tuple(header.split(",")) == io.RECORD_COLUMNS
    recs, truncated = io.read_records_csv(str(out))
    assert len(recs) == 100 and not truncated
    peak = float(stdout.split()[0].split("=")[1])
    assert peak == pytest.approx(dv.summarize(recs).peak_stress, rel=1e-5)


def test_records_csv_round_trip(tmp_path):
    recs = dv.run_path(mm.REFERENCE, dv.PathSpec.uniaxial_tension(0.1, 30))
    p = tmp_path / "r.csv"
    io.write_text(p, io.records_text(recs, mm.REFERENCE))
    back, _ = io.read_records_csv(str(p))
    for a, b in zip(recs, back):
        assert np.allclose(a.sigma, b.sigma, rtol=1e-12, atol=0)
        assert np.allclose(a.eps, b.eps, rtol=1e-12, atol=0)
        for name in ("ebar_p", "D", "h", "eta", "theta0", "f_res"):
            assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-12, abs=0)
        assert (a.plastic, a.fractured) == (b.plastic, b.fractured)


def test_byte_identical_reruns(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"path": {"preset": "simple_shear", "strain": 0.1, "steps": 40}})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["simulate", "--config", cfg, "--out", str(a)], capsys)[0] == 0
    assert run(["simulate", "--config", cfg, "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_elastic_only_path(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"path": {"preset": "uniaxial_tension", "strain": 0.004,
                                        "steps": 8}})
    out = tmp_path / "e.csv"
    assert run(["simulate", "--config", cfg, "--out", str(out)], capsys)[0] == 0
    recs, _ = io.read_records_csv(str(out))
    assert recs and not any(r.plastic for r in recs)


def test_corrupted_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "never.csv"
    code, _, err = run(["simulate", "--config", str(bad), "--out", str(out)], capsys)
    assert code == 1 and "not valid JSON" in err
    assert not out.exists()


def test_unknown_keys_rejected(tmp_path, capsys):
    for data in ({"material": {"youngs": 1.0}}, {"pth": {}}, {"path": {"stepz": 3}}):
        cfg = write_cfg(tmp_path, data)
        code, _, err = run(["simulate", "--config", cfg], capsys)
        assert code == 1 and "unknown key" in err


def test_missing_material_keys_are_defaulted(caplog):
    with caplog.at_level(logging.INFO, logger="triaxdamage"):
        cfg = io.parse_config({"material": {"e": 70000.0, "dc": 0.95}})
    assert cfg.material.E == 70000.0 and cfg.material.Dc == 0.95
    assert cfg.material.A == mm.REFERENCE.A
    assert "using defaults" in caplog.text


def test_material_round_trip():
    d = io.material_to_dict(mm.LODE_DEMO)
    assert io.material_from_dict(d) == mm.LODE_DEMO
    assert set(d) == {"e", "nu", "a", "b", "n", "y0", "alpha", "beta", "gamma", "c_eta",
                      "c_theta_t", "c_theta_s", "c_theta_c", "d_eta_t", "d_theta_s",
                      "d_eta_c", "m", "eta0", "dc", "tol_f", "max_iter"}


def test_non_convergence_writes_truncated_file(tmp_path, capsys, monkeypatch):
    real = dv.run_path

    def failing(params, path, **kw):
        recs = real(params, dv.PathSpec.uniaxial_tension(0.01, 10))
        raise dv.MixedControlError("mixed control did not converge", 1.0, 2, recs[:4])

    monkeypatch.setattr(dv, "run_path", failing)
    out = tmp_path / "t.csv"
    code, _, err = run(["simulate", "--out", str(out)], capsys)
    assert code == 2 and "mixed control" in err
    recs, truncated = io.read_records_csv(str(out))
    assert truncated and len(recs) == 4
    assert out.read_text().rstrip().splitlines()[-1].startswith(io.TRUNCATED)


def test_stress_control_beyond_limit_fractures(tmp_path, capsys):
    # plane strain with a stress target above the limit load: damage runs away
    modes = ["stress", "strain", "stress", "stress", "stress", "stress"]
    targets = [3000.0, 0.0, 0.0, 0.0, 0.0, 0.0]
    cfg = write_cfg(tmp_path, {"path": {"modes": modes, "targets": targets, "steps": 30}})
    out = tmp_path / "t.csv"
    code, stdout, _ = run(["simulate", "--config", cfg, "--out", str(out)], capsys)
    assert code == 0 and "fracture_strain=none" not in stdout
    recs, truncated = io.read_records_csv(str(out))
    last = recs[-1]
    assert not truncated and last.fractured
    assert last.sigma[0] == pytest.approx(3000.0 * last.step / 30, abs=1e-6 * 2e5)


def test_json_output(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["simulate", "--steps", "20", "--format", "json", "--out", str(out)], capsys)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["columns"] == list(io.RECORD_COLUMNS)
    assert len(doc["rows"]) == 20 and doc["params"]["a"] == 370.0


def test_yield_surface_von_mises(capsys):
    code, out, _ = run(["yield-surface", "--preset", "von_mises"], capsys)
    assert code == 0
    rows = [l.split(",") for l in out.splitlines() if not l.startswith("#")][1:]
    assert rows and all(float(r[2]) == 1.0 for r in rows)


def test_locus_reference_pairs(tmp_path, capsys):
    pairs = [[0.0124, 0.0355], [0.1173, 0.3381], [0.9274, 0.9984]]
    cfg = write_cfg(tmp_path, {"sweep": {"mode": "power_law", "pairs": pairs}})
    code, out, _ = run(["locus", "--config", cfg], capsys)
    assert code == 0
    rows = [l.split(",") for l in out.splitlines() if not l.startswith("#")]
    assert rows[0] == ["eta", "theta0", "h", "ebar_f", "status"]
    got = [float(r[3]) for r in rows[1:]]
    assert got == pytest.approx([0.210227, 0.236951, 0.185272], rel=5e-4)


def test_calibrate_hardening_round_trip(tmp_path, capsys):
    e = np.linspace(0, 0.45, 25)
    data = tmp_path / "pts.csv"
    data.write_text("ebar_p,sigma_bar\n" + "".join(f"{float(a)!r},{370 + 620 * float(a)**0.396!r}\n" for a in e))
    code, out, _ = run(["calibrate", "--kind", "hardening", "--data", str(data)], capsys)
    assert code == 0
    vals = dict(l.split(",") for l in out.splitlines() if not l.startswith("#"))
    assert float(vals["a"]) == pytest.approx(370, rel=1e-6)
    assert float(vals["b"]) == pytest.approx(620, rel=1e-6)
    assert float(vals["n"]) == pytest.approx(0.396, rel=1e-6)


def test_calibrate_power_law_from_config(tmp_path, capsys):
    pts = [[h, dv.locus_from_h(h)] for h in (1.0, 1.3, 1.6)]
    cfg = write_cfg(tmp_path, {"fit": {"kind": "power_law", "points": pts}})
    code, out, _ = run(["calibrate", "--config", cfg], capsys)
    assert code == 0
    vals = dict(l.split(",") for l in out.splitlines() if not l.startswith("#"))
    assert float(vals["coefficient"]) == pytest.approx(0.44717, rel=1e-9)


def test_calibrate_insufficient_data(tmp_path, capsys):
    cfg = write_cfg(tmp_path, {"fit": {"kind": "hardening", "points": [[0, 370], [0.1, 600]]}})
    code, _, err = run(["calibrate", "--config", cfg], capsys)
    assert code == 1 and "at least 3" in err
