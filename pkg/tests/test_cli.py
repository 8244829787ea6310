import json
import subprocess
import sys

import pytest

from dcmpoles.cli import ConfigError, main, parse_config_text


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestConfig:
    def test_key_value(self):
        cfg = parse_config_text("# boost\ntopology = boost\nvs = 5  # volts\n\nL=5e-6\n")
        assert cfg == {"topology": "boost", "vs": "5", "L": "5e-6"}

    def test_json_with_config_key(self):
        assert parse_config_text('{"config": {"vs": 5, "topology": "buck"}}') == {"vs": "5", "topology": "buck"}

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="frequency"):
            parse_config_text("frequency = 1e5\n")

    def test_malformed_line(self):
        with pytest.raises(ConfigError):
            parse_config_text("vs 5\n")

    def test_file_and_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("topology = boost\nvs = 5\nL = 5e-6\nC = 40e-6\nfs = 100e3\nR0 = 20\nD = 0.5\n")
        code, out, _ = run(capsys, "steady", "--config", str(cfg), "--D", "0.7", "--json")
        assert code == 0
        assert json.loads(out)["points"][0]["M"] == pytest.approx(3.67017349683, rel=1e-11)


class TestSteady:
    def test_example_text(self, capsys):
        code, out, _ = run(capsys, "steady", "--preset", "ex1")
        assert code == 0
        assert "M: 3.67017349683" in out
        assert "dcm_valid: true" in out

    def test_zero_duty_warns(self, capsys):
        code, out, err = run(capsys, "steady", "--preset", "ex1", "--D", "0")
        assert code == 0
        assert "warning" in err
        assert "M: 1" in out

    @pytest.mark.parametrize("flag, value, field", [("--L", "-1", "L"), ("--vs", "abc", "vs"),
                                                    ("--topology", "cuk", "topology")])
    def test_bad_field(self, capsys, flag, value, field):
        code, _, err = run(capsys, "steady", "--preset", "ex1", flag, value)
        assert code == 2
        assert f"field '{field}'" in err

    def test_missing_field(self, capsys):
        code, _, err = run(capsys, "steady", "--topology", "boost", "--vs", "5", "--C", "1e-5", "--R0", "5")
        assert code == 2 and "field 'L'" in err

    def test_ccm_is_an_error(self, capsys):
        code, _, err = run(capsys, "steady", "--preset", "ex1", "--R0", "1")
        assert code == 2 and "error" in err

    def test_multiple_points(self, capsys):
        code, out, _ = run(capsys, "steady", "--preset", "ex6", "--json")
        pts = json.loads(out)["points"]
        assert [round(p["M"], 3) for p in pts] == [0.282, 0.718]


class TestPole:
    def test_example_json(self, capsys):
        code, out, _ = run(capsys, "pole", "--preset", "ex1", "--json")
        assert code == 0
        rec = json.loads(out)["points"][0]
        assert rec["p0"] == pytest.approx(0.9703, abs=1e-4)
        assert rec["p_exact"] == pytest.approx(0.9707, abs=5e-4)
        assert rec["classification"] == "stable"

    def test_vmc_subharmonic(self, capsys):
        code, out, _ = run(capsys, "pole", "--preset", "ex2", "--scheme", "vmc", "--g", "0.08", "--no-exact")
        assert code == 0
        assert "classification: subharmonic" in out
        p = float(next(line for line in out.splitlines() if line.startswith("p: ")).split()[1])
        assert p == pytest.approx(-1.08, abs=0.01)

    def test_vcotc_deadbeat(self, capsys):
        code, out, _ = run(capsys, "pole", "--preset", "ex1", "--scheme", "vcotc", "--v", "18", "--ma", "0",
                           "--no-exact", "--json")
        assert code == 0
        assert abs(json.loads(out)["points"][0]["p"]) <= 1e-8

    def test_saddle_node_orbit(self, capsys):
        code, out, _ = run(capsys, "pole", "--preset", "ex6", "--json")
        kinds = [p["classification"] for p in json.loads(out)["points"]]
        assert kinds == ["stable", "saddle-node"]


class TestBode:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, "bode", "--preset", "ex1", "--points", "10")
        lines = out.splitlines()
        assert code == 0
        assert lines[0] == "omega_rad_s,mag_db,phase_deg"
        assert len(lines) == 11

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "b.csv"
        code, _, _ = run(capsys, "bode", "--preset", "ex3", "--which", "source", "--out", str(path))
        assert code == 0
        assert len(path.read_text().splitlines()) == 201

    def test_bcm_cot_has_no_control(self, capsys):
        code, _, err = run(capsys, "bode", "--preset", "ex7")
        assert code == 2 and "control" in err


class TestSim:
    def test_exact(self, capsys):
        code, out, _ = run(capsys, "sim", "--preset", "ex4", "--v0", "19", "--cycles", "20")
        rows = out.splitlines()
        assert code == 0 and rows[0] == "n,v_n,d1_s,Tn_s"
        assert float(rows[-1].split(",")[1]) == pytest.approx(18.83, abs=0.01)

    def test_map(self, capsys):
        code, out, _ = run(capsys, "sim", "--preset", "ex4", "--v0", "19", "--cycles", "20", "--model", "map")
        assert float(out.splitlines()[-1].split(",")[1]) == pytest.approx(18.8165, abs=1e-3)

    def test_dense(self, capsys):
        code, out, _ = run(capsys, "sim", "--preset", "ex1", "--cycles", "1", "--dense")
        assert out.splitlines()[0] == "t_s,iL_A,v_V,stage_id"

    def test_failure_exit_code(self, capsys):
        code, _, err = run(capsys, "sim", "--preset", "ex1", "--D", "0.95", "--v0", "120", "--cycles", "200")
        assert code == 2 and "cycle" in err


class TestReproduce:
    def test_passing_target(self, capsys):
        code, out, _ = run(capsys, "reproduce", "1")
        assert code == 0
        assert out.count("PASS") == 3

    def test_two_word_target(self, capsys):
        code, out, _ = run(capsys, "reproduce", "table", "3")
        assert code == 0 and "checks passed" in out

    def test_failing_target(self, capsys):
        code, out, _ = run(capsys, "reproduce", "6")
        assert code == 1 and "FAIL" in out

    def test_unknown_target(self, capsys):
        code, _, _ = run(capsys, "reproduce", "9")
        assert code == 2


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "dcmpoles.cli", "steady", "--preset", "ex3", "--json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["points"][0]["M"] == pytest.approx(2.0)
