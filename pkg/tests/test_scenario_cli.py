import csv
import json
import os

import numpy as np
import pytest

from nfchan import experiments
from nfchan.cli import main
from nfchan.errors import ValidationError
from nfchan.experiments import REGIMES_COLUMNS, write_atomic
from nfchan.scenario import load_scenario, parse_scenario

TINY = {
    "name": "tiny",
    "frequency_hz": 28e9,
    "seed": 5,
    "tx_m": [0.0, 0.0, 3.0],
    "surface": {"center_m": [0, 0, 0], "normal": [0, 0, 1], "length_u_m": 0.2, "length_v_m": 0.2},
    "regimes": {"rx_m": [0.05, 0.0, 1.0], "kappa_sigma_z": [0.0, 1.0], "realizations": 4},
}


def test_bundled_reference_scenarios(va, vb):
    assert va.frequency_hz == 28e9 and va.tx_m == (0.0, 0.0, 90.0)
    assert va.surface.length_u_m == 3.0 and va.regimes.rx_m == (0.5, 0.0, 10.0)
    assert va.correlation.d_over_lambda == (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
    assert vb.frequency_hz == 60e9 and vb.bs_array().n == 4000
    assert vb.users_m == ((13.0, -13.0, -5.0), (11.0, -11.0, -5.0))
    assert vb.path_loss.beta_db == -68.0 and vb.noise.noise_figure_db == 6.0


def test_missing_frequency_rejected():
    data = {k: v for k, v in TINY.items() if k != "frequency_hz"}
    with pytest.raises(ValidationError, match="frequency_hz"):
        parse_scenario(data)


def test_unknown_field_reports_path():
    data = json.loads(json.dumps(TINY))
    data["surface"]["lenght_u_m"] = 1.0
    with pytest.raises(ValidationError, match=r"surface\.lenght_u_m"):
        parse_scenario(data)


@pytest.mark.parametrize("token", ["NaN", "Infinity", "-Infinity"])
def test_non_finite_json_rejected(tmp_path, token):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(TINY).replace("28000000000.0", token))
    with pytest.raises(ValidationError):
        load_scenario(p)


def test_transmitter_below_surface_rejected():
    data = dict(TINY, tx_m=[0.0, 0.0, -1.0])
    with pytest.raises(ValidationError):
        parse_scenario(data)


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["run", "sinr-tradeoff", "--scenario", "downlink_60ghz", "--out", str(tmp_path)]) == 0
    assert main(["run", "sinr-tradeoff", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == 1
    # a 28 GHz reflection scenario has no base station section
    assert main(["run", "smr", "--scenario", "reflection_28ghz", "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("experiment", ["sinr-tradeoff", "smr"])
def test_repeated_runs_are_byte_identical(tmp_path, experiment):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", experiment, "--scenario", "downlink_60ghz", "--out", str(a), "--fast"]) == 0
    assert main(["run", experiment, "--scenario", "downlink_60ghz", "--out", str(b), "--fast"]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        if n.endswith(".csv"):
            raw = (a / n).read_bytes()
            assert raw == (b / n).read_bytes()
            assert b"\r" not in raw
            raw.decode("utf-8")


def test_atomic_write_cleans_up(tmp_path, monkeypatch):
    target = tmp_path / "t.csv"
    write_atomic(target, b"old\n")

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(experiments.os, "replace", boom)
    with pytest.raises(OSError):
        write_atomic(target, b"new\n")
    assert target.read_bytes() == b"old\n"
    assert os.listdir(tmp_path) == ["t.csv"]


def test_regimes_schema(tmp_path):
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps(TINY))
    assert main(["run", "regimes", "--scenario", str(p), "--out", str(tmp_path / "out")]) == 0
    with open(tmp_path / "out" / "regimes.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == REGIMES_COLUMNS
    assert len(rows) == 3
    flat = dict(zip(rows[0], rows[1]))
    assert float(flat["mean_re"]) == 1.0 and float(flat["theory_exp"]) == 1.0
    side = json.loads((tmp_path / "out" / "regimes.json").read_text())
    assert side["experiment"] == "regimes" and side["seed"] == 5
    assert side["outputs"] == ["regimes.csv"]


def test_seed_override_changes_rough_rows(tmp_path):
    p = tmp_path / "tiny.json"
    p.write_text(json.dumps(TINY))
    main(["run", "regimes", "--scenario", str(p), "--out", str(tmp_path / "a")])
    main(["run", "regimes", "--scenario", str(p), "--out", str(tmp_path / "b"), "--seed", "6"])
    a = (tmp_path / "a" / "regimes.csv").read_text().splitlines()
    b = (tmp_path / "b" / "regimes.csv").read_text().splitlines()
    assert a[:2] == b[:2] and a[2] != b[2]


def test_sumrate_one_table_per_rician_factor(tmp_path):
    assert main(["run", "sumrate", "--scenario", "downlink_60ghz", "--out", str(tmp_path), "--fast"]) == 0
    for kb in ("1", "0.6", "0.2"):
        with open(tmp_path / f"sumrate_kbar_{kb}.csv", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["Pt_dBm", "rate_los", "rate_nlos"]
        p = np.array([float(r[0]) for r in rows[1:]])
        np.testing.assert_allclose(np.diff(p), 1.0)
        rates = np.array([[float(r[1]), float(r[2])] for r in rows[1:]])
        assert np.all(np.diff(rates, axis=0) >= -1e-9)
    side = json.loads((tmp_path / "sumrate.json").read_text())
    assert set(side["summary"]["per_k_bar"]) == {"1", "0.6", "0.2"}
