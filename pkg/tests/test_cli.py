import json
import math

import numpy as np
import pytest

from ellipstream import cli


class TestParsePoints:
    def test_two_2d_points(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("1,0\n0,1\n")
        pts = cli.parse_points(str(f))
        assert pts.shape == (2, 2)
        assert np.array_equal(pts, [[1.0, 0.0], [0.0, 1.0]])

    def test_comment_and_blank_lines(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("# c\n1,2,3\n\n")
        pts = cli.parse_points(str(f))
        assert pts.shape == (1, 3)

    def test_inline_comment(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("1,2 # trailing\n3,4\n")
        assert cli.parse_points(str(f)).shape == (2, 2)

    def test_ragged_row_reports_line(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("1,2\n1\n")
        with pytest.raises(cli.InputError, match="line 2"):
            cli.parse_points(str(f))

    def test_non_numeric_reports_line(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("1,2\nx,3\n")
        with pytest.raises(cli.InputError, match="line 2"):
            cli.parse_points(str(f))

    def test_missing_file(self):
        with pytest.raises(cli.InputError):
            cli.parse_points("/nonexistent/file.csv")

    def test_empty_file(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("# only a comment\n")
        with pytest.raises(cli.InputError, match="no points"):
            cli.parse_points(str(f))


class TestGenerate:
    def test_ball_inside_unit_ball_and_deterministic(self):
        a = cli.generate("ball", 2, 3, seed=7)
        b = cli.generate("ball", 2, 3, seed=7)
        assert np.array_equal(a, b)
        assert np.all(np.linalg.norm(a, axis=1) <= 1.0)

    def test_lattice_integer_coordinates(self):
        pts = cli.generate("lattice", 3, 200, seed=1, lattice_n=5)
        assert np.array_equal(pts, np.round(pts))
        assert pts.min() >= -5 and pts.max() <= 5

    def test_gaussian_shape(self):
        assert cli.generate("gaussian", 4, 10, seed=0).shape == (10, 4)

    def test_simplex_shell_replays_adversary(self):
        pts = cli.generate("simplex-shell", 3, 100, seed=0, r_big=16.0)
        # the first d+1 points are the simplex vertices at norm d
        assert np.allclose(np.linalg.norm(pts[:4], axis=1), 3.0, atol=1e-9)

    def test_unknown_generator(self):
        with pytest.raises(cli.InputError):
            cli.generate("torus", 2, 10, seed=0)


class TestRunConfig:
    def test_requires_one_source(self):
        with pytest.raises(cli.InputError):
            cli.RunConfig(mode="online")
        with pytest.raises(cli.InputError):
            cli.RunConfig(mode="online", gen="ball", input_path="x.csv")

    def test_verify_every_default_tracks_dimension(self):
        small = cli.RunConfig(mode="online", gen="ball", d=4)
        big = cli.RunConfig(mode="online", gen="ball", d=12)
        assert small.effective_verify_every == 1
        assert big.effective_verify_every == 0

    def test_unknown_mode(self):
        with pytest.raises(cli.InputError):
            cli.RunConfig(mode="banana", gen="ball")


class TestRun:
    def run_cli(self, tmp_path, *args):
        return cli.main(list(args) + ["--out", str(tmp_path)])

    def test_online_writes_reports(self, tmp_path):
        code = self.run_cli(tmp_path, "--mode", "online", "--gen", "gaussian",
                            "--d", "3", "--n", "40", "--seed", "5")
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert set(report) == {"mode", "d", "n", "final_alpha_inv", "steps",
                               "certificates", "constants"}
        assert report["n"] == 40
        assert len(report["steps"]) == 40
        header = (tmp_path / "trace.csv").read_text().splitlines()[0]
        assert header == "t,kind,alpha_inv,log_vol,gamma"

    def test_report_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            cli.main(["--mode", "online", "--gen", "ball", "--d", "3",
                      "--n", "60", "--seed", "11", "--out", str(out)])
        assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
        assert (a / "trace.csv").read_bytes() == (b / "trace.csv").read_bytes()

    def test_report_round_trips(self, tmp_path):
        self.run_cli(tmp_path, "--mode", "online", "--gen", "gaussian",
                     "--d", "2", "--n", "30", "--seed", "1")
        raw = (tmp_path / "report.json").read_text()
        parsed = json.loads(raw)
        assert cli.to_json(parsed) + "\n" == raw

    def test_lattice_logs_empirical_constant(self, tmp_path):
        self.run_cli(tmp_path, "--mode", "online", "--gen", "lattice",
                     "--d", "2", "--n", "100", "--N", "10", "--seed", "3")
        report = json.loads((tmp_path / "report.json").read_text())
        c = report["constants"]["c_empirical"]
        assert c == pytest.approx(
            report["final_alpha_inv"] / (2 * math.log(20)))

    def test_seeded_requires_seed_ball(self, tmp_path):
        code = self.run_cli(tmp_path, "--mode", "seeded", "--gen", "ball",
                            "--d", "2", "--n", "10")
        assert code == 1

    def test_seeded_runs(self, tmp_path):
        code = self.run_cli(tmp_path, "--mode", "seeded", "--gen", "gaussian",
                            "--d", "3", "--n", "50", "--seed", "2",
                            "--c0", "0,0,0", "--r0", "0.3")
        assert code == 0

    def test_coreset_writes_selection(self, tmp_path):
        code = self.run_cli(tmp_path, "--mode", "coreset", "--gen", "gaussian",
                            "--d", "3", "--n", "80", "--seed", "4")
        assert code == 0
        sel = [int(x) for x in
               (tmp_path / "selected.txt").read_text().split()]
        assert sel == sorted(sel)
        assert sel[0] == 1

    def test_adversary_mode(self, tmp_path):
        code = self.run_cli(tmp_path, "--mode", "adversary", "--d", "3",
                            "--R", "8")
        assert code == 0
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["certificates"]["stop_reason"] == "volume_reached"

    def test_verify_mode_on_clean_stream(self, tmp_path):
        code = self.run_cli(tmp_path, "--mode", "verify", "--gen", "gaussian",
                            "--d", "3", "--n", "50", "--seed", "6")
        assert code == 0

    def test_input_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("1,2\n3\n")
        code = cli.main(["--mode", "online", "--input", str(bad),
                         "--out", str(tmp_path)])
        assert code == 1


class TestJsonFormatter:
    def test_sorted_keys_and_17_digits(self):
        out = cli.to_json({"b": 1.0 / 3.0, "a": 1})
        assert out.index('"a"') < out.index('"b"')
        assert "0.33333333333333331" in out

    def test_float_round_trip(self):
        rng = np.random.default_rng(8)
        for x in rng.standard_normal(100) * 10.0**rng.integers(-8, 8, 100):
            assert float(json.loads(cli.to_json(float(x)))) == x
