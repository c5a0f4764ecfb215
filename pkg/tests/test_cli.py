import json

import pytest

from wehler import materialize
from wehler.cli import entry, spec_from_obj
from wehler.scalars import Context


@pytest.fixture(autouse=True)
def _no_env_config(monkeypatch):
    monkeypatch.delenv("WEHLER_CONFIG", raising=False)


def _write_divergent_spec(path, coeffs={"0": "1"}):
    path.write_text(json.dumps({"n": 3, "word": [], "divergent": coeffs}))
    return str(path)


def _write_schedule_spec(path):
    obj = {
        "n": 3,
        "word": [],
        "divergent": {},
        "recurrent": {
            "type": "schedule",
            "support": [0, 1, 2],
            "steps": [[0, 1, "20"], [0, 2, "8103"]],
        },
    }
    path.write_text(json.dumps(obj))
    return str(path)


def _data_lines(text):
    # CSV body: skip comment lines, stop at a trailing JSON block
    out = []
    for line in text.splitlines():
        if line.startswith("{"):
            break
        if line and not line.startswith("#"):
            out.append(line)
    return out


def test_reduce_prints_reduced_class(capsys):
    rc = entry(["reduce", "--n", "3", "--", "-1,2,2,2"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "reduced: 1,0,0,0" in out
    assert "word: [0]" in out
    assert "steps: 1" in out
    assert "clamped: false" in out


def test_reduce_exact_backend_by_default(capsys):
    rc = entry(["reduce", "--n", "3", "1/2,1,1,1"])
    out = capsys.readouterr().out
    assert rc == 0
    # rational input stays rational: no decimal expansion
    assert "reduced: 1/2,1,1,1" in out


def test_usage_errors_exit_1(capsys):
    assert entry(["reduce", "--n", "3"]) == 1
    assert entry([]) == 1
    assert entry(["ray-scan", "--spec", "/nonexistent.json"]) == 1
    capsys.readouterr()


def test_ray_scan_deterministic_across_workers(tmp_path):
    spec = _write_divergent_spec(tmp_path / "d.json")
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["ray-scan", "--spec", spec, "--q-min", "4", "--q-max", "9"]
    assert entry(args + ["--workers", "1", "--out", str(out1)]) == 0
    assert entry(args + ["--workers", "2", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = _data_lines(out1.read_text())
    assert lines[0].startswith("s,t,vol,")
    assert len(lines) == 1 + 6  # header plus one row per q


def test_ray_scan_estimates_json(tmp_path, capsys):
    spec = _write_divergent_spec(tmp_path / "d.json")
    rc = entry(
        [
            "ray-scan",
            "--spec",
            spec,
            "--q-min",
            "4",
            "--q-max",
            "14",
            "--estimates",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    est = json.loads(out[out.rindex("\n{") :])
    for key in (
        "slope_min",
        "slope_max",
        "delta_inf_hat",
        "delta_sup_hat",
        "nu_vol",
        "window",
        "horizon_t",
    ):
        assert key in est
    # single divergent face at N=3 decays with exponent about 2
    assert 1.4 < float(est["delta_sup_hat"]) <= 2.05


def test_empty_grid_emits_header_only(tmp_path, capsys):
    spec = _write_divergent_spec(tmp_path / "d.json")
    rc = entry(["ray-scan", "--spec", spec, "--q-min", "9", "--q-max", "4"])
    out = capsys.readouterr().out
    assert rc == 0
    assert _data_lines(out) == ["s,t,vol,log_vol_over_log_s,phi,word_length,clamped,fitted_slope,error"]


def test_construct_spec_roundtrip(tmp_path):
    spec_path = tmp_path / "spec.json"
    cert_path = tmp_path / "cert.json"
    rc = entry(
        [
            "construct",
            "--n",
            "3",
            "--delta-target",
            "1.25",
            "--count",
            "3",
            "--out",
            str(spec_path),
            "--certificate",
            str(cert_path),
        ]
    )
    assert rc == 0
    obj = json.loads(spec_path.read_text())
    # delta 5/4 at N = 3 inverts to the length ratio L = 3 exactly
    assert obj["generator"]["kind"] == "geometric"
    assert obj["generator"]["L"] == "3"
    assert obj["recurrent"]["type"] == "schedule"
    assert [s[2] for s in obj["recurrent"]["steps"]] == [
        "20",
        "8103",
        "532048240602",
    ]
    cert = json.loads(cert_path.read_text())
    assert len(cert["increments"]) == 2
    assert cert["rate"] is not None
    spec = spec_from_obj(obj, Context("float", 256))
    vec = materialize(spec)
    assert abs(float(sum(vec.coords)) - 1.0) < 1e-30


def test_h0_scan_designated_and_kappa(tmp_path, capsys):
    spec = _write_schedule_spec(tmp_path / "s.json")
    rc = entry(
        [
            "h0-scan",
            "--spec",
            spec,
            "--m-exp-max",
            "18",
            "--include-designated",
            "--kappa",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    lines = _data_lines(out)
    ms = [int(l.split(",")[0]) for l in lines[1:] if not l.startswith("m,")]
    assert 400 in ms  # first hill
    assert 160000 in ms  # first valley
    est = json.loads(out[out.rindex("\n{") :])
    assert est["hill_ms"] == [400]
    assert est["valley_ms"] == [160000]
    assert float(est["kappa_R_plus_hat"]) > float(est["kappa_R_minus_hat"])
    # sandwich columns hold on every emitted row
    for line in lines[1:]:
        cells = line.split(",")
        if cells[0] == "m" or cells[-1]:
            continue
        m, h0, lower, upper = (
            int(cells[0]),
            int(cells[1]),
            int(cells[4]),
            int(cells[5]),
        )
        assert lower <= h0 <= upper


def test_kappa_needs_schedule(tmp_path, capsys):
    spec = _write_divergent_spec(tmp_path / "d.json")
    rc = entry(["h0-scan", "--spec", spec, "--kappa"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "schedule" in err


def test_figure1_grid_and_arc_symmetry(tmp_path):
    out = tmp_path / "fig.csv"
    rc = entry(
        [
            "figure1",
            "--t-count",
            "3",
            "--q-min",
            "4",
            "--q-max",
            "6",
            "--out",
            str(out),
        ]
    )
    assert rc == 0
    lines = _data_lines(out.read_text())
    assert lines[0] == "t,s,vol,error"
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == 3 * 3
    by_t = {}
    for t, s, vol, err in rows:
        assert err == ""
        by_t.setdefault(t, []).append(vol)
    # the endpoints are cusp rays related by a coordinate permutation, so
    # their volume columns agree; the midpoint is a wall-crossing translate
    # of the third cusp ray and decays with a different constant
    assert by_t["0.0"] == by_t["1.0"]
    assert by_t["0.5"] != by_t["0.0"]


def test_config_file_layering_and_unknown_key(tmp_path, capsys):
    ini = tmp_path / "w.ini"
    ini.write_text("[wehler]\nprec = 128\nq_max = 6\n")
    spec = _write_divergent_spec(tmp_path / "d.json")
    rc = entry(["ray-scan", "--spec", spec, "--config", str(ini)])
    out = capsys.readouterr().out
    assert rc == 0
    assert "# cfg.prec: 128" in out
    assert "# cfg.q_max: 6" in out
    # explicit flag beats the file
    rc = entry(
        ["ray-scan", "--spec", spec, "--config", str(ini), "--prec", "64"]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "# cfg.prec: 64" in out
    bad = tmp_path / "bad.ini"
    bad.write_text("[wehler]\nnot_a_key = 1\n")
    assert entry(["ray-scan", "--spec", spec, "--config", str(bad)]) == 1
    capsys.readouterr()


def _hash_of(text):
    for line in text.splitlines():
        if line.startswith("# config: "):
            return line.split(": ")[1]
    raise AssertionError("no config hash line")


def test_config_hash_tracks_semantics_only(tmp_path):
    spec = _write_divergent_spec(tmp_path / "d.json")
    outs = []
    for i, extra in enumerate(
        (
            ["--workers", "1"],
            ["--workers", "3", "--format", "csv"],
            ["--prec", "128"],
        )
    ):
        path = tmp_path / f"o{i}.csv"
        args = [
            "ray-scan",
            "--spec",
            spec,
            "--q-min",
            "4",
            "--q-max",
            "6",
            "--out",
            str(path),
        ]
        assert entry(args + extra) == 0
        outs.append(_hash_of(path.read_text()))
    assert outs[0] == outs[1]  # workers and format are not semantic
    assert outs[2] != outs[0]  # precision is


def test_json_format_document(tmp_path, capsys):
    spec = _write_divergent_spec(tmp_path / "d.json")
    rc = entry(
        [
            "ray-scan",
            "--spec",
            spec,
            "--q-min",
            "4",
            "--q-max",
            "6",
            "--format",
            "json",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    doc = json.loads(out)
    assert doc["columns"][0] == "s"
    assert len(doc["rows"]) == 3
    assert doc["run_config"]["prec"] == 256
    assert "config" in doc and "tool" in doc
