import json
import math

import pytest

from relaycap import cli, selftest


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def _full_gains(t):
    return [[0.0 if i == j else 1.0 for j in range(t)] for i in range(t)]


def _ref_doc(**over):
    doc = {
        "nodes": [
            {"id": 1, "role": "source", "power": 1.0},
            {"id": 2, "role": "relay", "power": 1.0, "noise": 1.0},
            {"id": 3, "role": "relay", "power": 1.0, "noise": 1.0},
            {"id": 4, "role": "destination", "noise": 1.0},
        ],
        "gains": _full_gains(4),
    }
    doc.update(over)
    return doc


def _single_relay_doc(**relay_over):
    relay = {"id": 2, "role": "relay", "power": 1000.0, "noise": 1.0}
    relay.update(relay_over)
    return {
        "nodes": [
            {"id": 1, "role": "source", "power": 1.0},
            relay,
            {"id": 3, "role": "destination", "noise": 1.0},
        ],
        "gains": _full_gains(3),
    }


def _big_doc(t=12):
    nodes = [{"id": 1, "role": "source", "power": 1.0}]
    nodes += [{"id": j, "role": "relay", "power": 1.0, "noise": 1.0} for j in range(2, t)]
    nodes.append({"id": t, "role": "destination", "noise": 1.0})
    return {"nodes": nodes, "gains": _full_gains(t)}


_SMALL_VERIFY = {
    "verify": {
        "alpha_offsets": [-1.0, -0.5, 0.0, 0.5, 1.0],
        "beta_grid": [-0.5, 0.0, 0.5],
        "det_samples": 40,
        "network_samples": 8,
        "seed": 7,
    }
}

_CSV_HEADER = "gamma,upper_bound_bits,cf_rate_bits,gap_bits,q_uniform,feasible"


def _value_after(out, label):
    for line in out.splitlines():
        if line.startswith(label):
            return float(line[len(label) :].split()[0])
    raise AssertionError(f"no line starting with {label!r} in output:\n{out}")


class TestCommandsSucceed:
    def test_bound_reference(self, tmp_path, capsys):
        cfg = _write(tmp_path, "ref.json", _ref_doc())
        assert cli.main(["bound", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert _value_after(out, "source-cut bound:") == pytest.approx(1.0, abs=1e-11)
        assert "min cut:" in out
        assert "{1,2,3}" in out  # every cut listed

    def test_cfrate_reference(self, tmp_path, capsys):
        cfg = _write(tmp_path, "ref.json", _ref_doc())
        assert cli.main(["cfrate", "--config", cfg, "--top-k", "3"]) == 0
        out = capsys.readouterr().out
        bound = _value_after(out, "upper bound:")
        rate = _value_after(out, "cf rate:")
        gap = _value_after(out, "gap:")
        assert bound == pytest.approx(1.0, abs=1e-11)
        assert 0.0 < rate < bound
        assert gap == pytest.approx(bound - rate, abs=1e-9)
        assert "relay 2: Q =" in out
        assert "S={2,3}" in out
        assert out.count("margin_log2") == 3

    def test_sweep_csv_shape(self, tmp_path, capsys):
        cfg = _write(tmp_path, "ref.json", _ref_doc(sweep={"gammas": [1, 10, 100]}))
        assert cli.main(["sweep", "--config", cfg]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == _CSV_HEADER
        assert len(lines) == 4
        assert all(line.endswith(",true") for line in lines[1:])
        assert lines[1].startswith("1,")

    def test_verify_small_config(self, tmp_path, capsys):
        cfg = _write(tmp_path, "v.json", _SMALL_VERIFY)
        assert cli.main(["verify", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "5/5 suites passed" in out
        assert out.count("PASS") == 5


class TestExitCodes:
    def test_missing_config_file(self, tmp_path, capsys):
        assert cli.main(["bound", "--config", str(tmp_path / "nope.json")]) == 2
        assert "config error:" in capsys.readouterr().err

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{nope", encoding="utf-8")
        assert cli.main(["bound", "--config", str(path)]) == 2
        assert "not valid JSON" in capsys.readouterr().err

    def test_two_sources(self, tmp_path, capsys):
        doc = _ref_doc()
        doc["nodes"][1] = {"id": 2, "role": "source", "power": 1.0}
        cfg = _write(tmp_path, "two.json", doc)
        assert cli.main(["bound", "--config", cfg]) == 2
        assert "invalid network" in capsys.readouterr().err

    def test_empty_gammas(self, tmp_path):
        cfg = _write(tmp_path, "s.json", _ref_doc(sweep={"gammas": []}))
        assert cli.main(["sweep", "--config", cfg]) == 2

    def test_unsorted_gammas(self, tmp_path):
        cfg = _write(tmp_path, "s.json", _ref_doc(sweep={"gammas": [10, 1]}))
        assert cli.main(["sweep", "--config", cfg]) == 2

    def test_gamma_below_one(self, tmp_path):
        cfg = _write(tmp_path, "s.json", _ref_doc(sweep={"gammas": [0.5, 1]}))
        assert cli.main(["sweep", "--config", cfg]) == 2

    def test_power_and_power_db_conflict(self, tmp_path, capsys):
        doc = _single_relay_doc(power_db=30.0)
        cfg = _write(tmp_path, "p.json", doc)
        assert cli.main(["bound", "--config", cfg]) == 2
        assert "not both" in capsys.readouterr().err

    def test_gains_and_path_loss_conflict(self, tmp_path):
        doc = _ref_doc(path_loss={"kappa": 1.0, "eta": 2.0})
        cfg = _write(tmp_path, "g.json", doc)
        assert cli.main(["bound", "--config", cfg]) == 2

    def test_neither_gains_nor_path_loss(self, tmp_path):
        doc = _ref_doc()
        del doc["gains"]
        cfg = _write(tmp_path, "g.json", doc)
        assert cli.main(["bound", "--config", cfg]) == 2

    def test_unknown_node_key(self, tmp_path, capsys):
        doc = _ref_doc()
        doc["nodes"][0]["powr"] = 2.0
        cfg = _write(tmp_path, "k.json", doc)
        assert cli.main(["bound", "--config", cfg]) == 2
        assert "unknown keys" in capsys.readouterr().err

    def test_size_guard(self, tmp_path, capsys):
        cfg = _write(tmp_path, "big.json", _big_doc())
        assert cli.main(["bound", "--config", cfg]) == 3
        assert "size guard:" in capsys.readouterr().err

    def test_size_guard_override(self, tmp_path, capsys):
        cfg = _write(tmp_path, "big.json", _big_doc())
        assert cli.main(["bound", "--config", cfg, "--override-guard"]) == 0
        assert "min cut:" in capsys.readouterr().out

    def test_cfrate_guard(self, tmp_path):
        cfg = _write(tmp_path, "big.json", _big_doc())
        assert cli.main(["cfrate", "--config", cfg]) == 3

    def test_powerless_relay_infeasible(self, tmp_path, capsys):
        cfg = _write(tmp_path, "z.json", _single_relay_doc(power=0.0))
        assert cli.main(["cfrate", "--config", cfg]) == 4
        assert "infeasible:" in capsys.readouterr().err

    def test_verify_detects_injected_fault(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(selftest.FAULT_ENV, "flip-sign")
        cfg = _write(tmp_path, "v.json", _SMALL_VERIFY)
        assert cli.main(["verify", "--config", cfg]) == 1
        out = capsys.readouterr().out
        assert "FAIL" in out
        assert "4/5 suites passed" in out

    def test_bad_verify_section(self, tmp_path):
        cfg = _write(tmp_path, "v.json", {"verify": {"det_samples": 0}})
        assert cli.main(["verify", "--config", cfg]) == 2


class TestOutputDiscipline:
    def test_sweep_runs_are_byte_identical(self, tmp_path):
        cfg = _write(
            tmp_path, "ref.json", _ref_doc(sweep={"gammas": [1, 10, 100, 1000]})
        )
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(["sweep", "--config", cfg, "--out", str(a)]) == 0
        assert cli.main(["sweep", "--config", cfg, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text(encoding="utf-8").splitlines()[0] == _CSV_HEADER

    def test_out_file_matches_stdout(self, tmp_path, capsys):
        cfg = _write(tmp_path, "ref.json", _ref_doc(sweep={"gammas": [1, 10]}))
        assert cli.main(["sweep", "--config", cfg]) == 0
        streamed = capsys.readouterr().out
        path = tmp_path / "o.csv"
        assert cli.main(["sweep", "--config", cfg, "--out", str(path)]) == 0
        assert path.read_text(encoding="utf-8") == streamed

    def test_db_fields_match_linear(self, tmp_path):
        lin = _write(tmp_path, "lin.json", _single_relay_doc(power=1000.0))
        db_doc = _single_relay_doc()
        del db_doc["nodes"][1]["power"]
        db_doc["nodes"][1]["power_db"] = 30.0
        db_doc["nodes"][2] = {"id": 3, "role": "destination", "noise_db": 0.0}
        db = _write(tmp_path, "db.json", db_doc)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        assert cli.main(["cfrate", "--config", lin, "--out", str(a)]) == 0
        assert cli.main(["cfrate", "--config", db, "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestGeometryConfig:
    def test_path_loss_network(self, tmp_path, capsys):
        doc = {
            "nodes": [
                {"id": 1, "role": "source", "power": 1.0, "position": [0.0, 0.0]},
                {"id": 2, "role": "relay", "power": 1.0, "noise": 1.0, "position": [0.0, 1.0]},
                {"id": 3, "role": "destination", "noise": 1.0, "position": [0.0, 2.0]},
            ],
            "path_loss": {"kappa": 1.0, "eta": 2.0},
        }
        cfg = _write(tmp_path, "geo.json", doc)
        assert cli.main(["bound", "--config", cfg]) == 0
        out = capsys.readouterr().out
        # lambda_12 = 1, lambda_13 = 1/4, so 1/2 log2(1 + 1 + 1/4)
        want = 0.5 * math.log2(2.25)
        assert _value_after(out, "source-cut bound:") == pytest.approx(want, abs=1e-9)

    def test_coincident_positions_rejected(self, tmp_path, capsys):
        doc = {
            "nodes": [
                {"id": 1, "role": "source", "power": 1.0, "position": [0.0, 0.0]},
                {"id": 2, "role": "relay", "power": 1.0, "noise": 1.0, "position": [0.0, 0.0]},
                {"id": 3, "role": "destination", "noise": 1.0, "position": [0.0, 2.0]},
            ],
            "path_loss": {"kappa": 1.0, "eta": 2.0},
        }
        cfg = _write(tmp_path, "geo.json", doc)
        assert cli.main(["bound", "--config", cfg]) == 2
        assert "CoincidentNodes" in capsys.readouterr().err

    def test_missing_position_rejected(self, tmp_path):
        doc = {
            "nodes": [
                {"id": 1, "role": "source", "power": 1.0, "position": [0.0, 0.0]},
                {"id": 2, "role": "relay", "power": 1.0, "noise": 1.0},
                {"id": 3, "role": "destination", "noise": 1.0, "position": [0.0, 2.0]},
            ],
            "path_loss": {"kappa": 1.0, "eta": 2.0},
        }
        cfg = _write(tmp_path, "geo.json", doc)
        assert cli.main(["bound", "--config", cfg]) == 2


class TestFlagsAndConfig:
    def test_exists_rate_at_least_forall(self, tmp_path, capsys):
        cfg = _write(tmp_path, "ref.json", _ref_doc())
        assert cli.main(["cfrate", "--config", cfg, "--quantifier", "forall"]) == 0
        forall = _value_after(capsys.readouterr().out, "cf rate:")
        assert cli.main(["cfrate", "--config", cfg, "--quantifier", "exists"]) == 0
        exists = _value_after(capsys.readouterr().out, "cf rate:")
        assert exists >= forall - 1e-12

    def test_flag_overrides_config_quantifier(self, tmp_path, capsys):
        doc = _ref_doc(cf={"quantifier": "exists"})
        cfg = _write(tmp_path, "ref.json", doc)
        assert cli.main(["cfrate", "--config", cfg]) == 0
        assert "quantifier: exists" in capsys.readouterr().out
        assert cli.main(["cfrate", "--config", cfg, "--quantifier", "forall"]) == 0
        assert "quantifier: forall" in capsys.readouterr().out

    def test_coordinate_mode_accepted(self, tmp_path, capsys):
        cfg = _write(tmp_path, "ref.json", _ref_doc())
        assert cli.main(["cfrate", "--config", cfg, "--mode", "coordinate"]) == 0
        assert "mode: coordinate_descent" in capsys.readouterr().out

    def test_bad_mode_in_config(self, tmp_path):
        cfg = _write(tmp_path, "ref.json", _ref_doc(cf={"mode": "annealing"}))
        assert cli.main(["cfrate", "--config", cfg]) == 2

    def test_bad_tol_in_config(self, tmp_path):
        cfg = _write(tmp_path, "ref.json", _ref_doc(cf={"tol": -1.0}))
        assert cli.main(["cfrate", "--config", cfg]) == 2
