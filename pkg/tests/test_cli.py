import contextlib
import io
import subprocess
import sys

import numpy as np
import pytest

from frontals.cli import main


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        rc = main(argv)
    return rc, out.getvalue(), err.getvalue()


def parse_csv(text):
    lines = [l for l in text.strip().splitlines() if l]
    header = lines[0].split(",")
    rows = np.array([[float(x) for x in l.split(",")] for l in lines[1:]])
    return header, rows


class TestInvariantsCommand:
    def test_example22_kappa_column(self):
        rc, out, _ = run_cli(["invariants", "--curve", "example22"])
        assert rc == 0
        header, rows = parse_csv(out)
        assert header == ["t", "a", "kappa", "ell_1"]
        t = rows[:, 0]
        expected = 2.0 / (2.0 + t * t)
        assert np.abs(rows[:, 2] - expected).max() <= 1e-6
        assert np.abs(rows[:, 3] - expected).max() <= 1e-6

    def test_line_zero_curvature(self):
        rc, out, _ = run_cli(["invariants", "--curve", "line",
                              "--t-steps", "51"])
        assert rc == 0
        _, rows = parse_csv(out)
        assert np.abs(rows[:, 2]).max() <= 1e-9

    def test_helix_constant_columns(self):
        rc, out, _ = run_cli(["invariants", "--curve", "helix",
                              "--t-steps", "101"])
        assert rc == 0
        _, rows = parse_csv(out)
        for col in range(1, rows.shape[1]):
            assert np.std(rows[:, col]) <= 1e-8


class TestSurfaceCommand:
    def test_tangent_obj_marks_cuspidal_edge(self, tmp_path):
        path = tmp_path / "tan.obj"
        rc, _, _ = run_cli([
            "surface", "--curve", "example22", "--kind", "tan",
            "--t-steps", "21", "--s-steps", "11", "--out", str(path),
        ])
        assert rc == 0
        lines = path.read_text().splitlines()
        vs = [l for l in lines if l.startswith("v ")]
        fs = [l for l in lines if l.startswith("f ")]
        singular = [l for l in lines if l.startswith("# singular")]
        assert len(vs) == 21 * 11
        assert len(fs) == 2 * 20 * 10
        # s = 0 is column index 5 of the 11-point s-grid
        assert singular == [f"# singular {i} 5" for i in range(21)]

    def test_flat_curve_mesh_exports(self, tmp_path):
        path = tmp_path / "flat.obj"
        rc, _, _ = run_cli([
            "surface", "--curve", "example21", "--kind", "tan",
            "--t-steps", "41", "--s-steps", "11", "--out", str(path),
        ])
        assert rc == 0
        assert len([l for l in path.read_text().splitlines()
                    if l.startswith("v ")]) == 41 * 11

    def test_canal_keeps_distance(self):
        rc, out, _ = run_cli([
            "surface", "--curve", "circle", "--kind", "can", "--r", "0.3",
            "--t-steps", "41", "--s-steps", "17", "--export", "csv",
        ])
        assert rc == 0
        _, rows = parse_csv(out)
        t = rows[:, 0]
        center = np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=1)
        dist = np.linalg.norm(rows[:, 2:5] - center, axis=1)
        assert np.abs(dist - 0.3).max() <= 1e-9

    def test_directrix_tangent_surface(self):
        rc, out, _ = run_cli([
            "surface", "--curve", "example22", "--kind", "directrix-tan",
            "--u", "0.5", "--t-steps", "21", "--s-steps", "5",
            "--export", "csv",
        ])
        assert rc == 0
        _, rows = parse_csv(out)
        # at s = 0 the surface passes through the directrix (t+u, t^2/2, t^3/6+u)
        at_zero = rows[np.abs(rows[:, 1]) < 1e-14]
        t = at_zero[:, 0]
        expected = np.stack([t + 0.5, t * t / 2, t ** 3 / 6 + 0.5], axis=1)
        assert np.abs(at_zero[:, 2:5] - expected).max() <= 1e-6

    def test_normal_map_csv_full_grid(self):
        rc, out, _ = run_cli([
            "surface", "--curve", "line", "--kind", "nor", "--export", "csv",
            "--t-steps", "5", "--s-steps", "3",
        ])
        assert rc == 0
        header, rows = parse_csv(out)
        assert header[:3] == ["t", "u1", "u2"]
        assert rows.shape[0] == 5 * 3 * 3
        assert (rows[:, -1] == 3).all()

    def test_obj_rejected_for_r4(self):
        rc, _, err = run_cli([
            "surface", "--curve", "r4curve", "--kind", "tan",
            "--t-steps", "5", "--s-steps", "3",
        ])
        assert rc == 1
        assert "R^3" in err


class TestVerifyCommand:
    def test_theorem22_passes(self, tmp_path):
        log = tmp_path / "log.jsonl"
        rc, out, _ = run_cli([
            "verify", "--curve", "example22", "--check", "theorem22",
            "--u", "0.5", "--out", str(log),
        ])
        assert rc == 0
        assert "PASS" in out
        import json

        record = json.loads(log.read_text().splitlines()[0])
        assert record["pass"] is True
        assert record["residual"] <= 1e-6

    def test_theorem22_inflection_precondition(self):
        rc, _, err = run_cli([
            "verify", "--curve", "example23", "--check", "theorem22",
            "--u", "0.5",
        ])
        assert rc == 2
        assert "inflection" in err

    def test_theorem21_r4(self):
        rc, out, _ = run_cli([
            "verify", "--curve", "r4curve", "--check", "theorem21",
        ])
        assert rc == 0
        assert "PASS" in out

    def test_theorem21_line_vacuous(self):
        rc, out, _ = run_cli([
            "verify", "--curve", "line", "--check", "theorem21",
            "--t-steps", "51",
        ])
        assert rc == 0
        assert "vacuous" in out

    def test_symplectic(self):
        rc, out, _ = run_cli([
            "verify", "--curve", "circle", "--check", "symplectic",
            "--t-steps", "101",
        ])
        assert rc == 0
        assert "PASS" in out

    def test_structure(self):
        rc, out, _ = run_cli([
            "verify", "--curve", "cusp", "--check", "structure",
        ])
        assert rc == 0
        assert "PASS" in out and "worst residual" in out


class TestFrontalityCommand:
    def test_regular_curve(self):
        rc, out, _ = run_cli(["frontality", "--curve", "example22",
                              "--t-steps", "21"])
        assert rc == 0
        assert "rank 2 attained at all sampled points" in out

    def test_single_point(self):
        rc, out, _ = run_cli(["frontality", "--curve", "example23",
                              "--t0", "0"])
        assert rc == 0
        assert "a1=1 a2=3" in out

    def test_flat_curve_reports_flip(self):
        rc, out, _ = run_cli(["frontality", "--curve", "example21",
                              "--t-steps", "41"])
        assert rc == 2
        assert "sign flips near t = 0" in out


class TestBishopCommand:
    def test_circle_fields_orthonormal(self):
        rc, out, _ = run_cli(["bishop", "--curve", "circle",
                              "--t-steps", "101"])
        assert rc == 0
        header, rows = parse_csv(out)
        assert header[0] == "t" and len(header) == 7
        nu1 = rows[:, 1:4]
        nu2 = rows[:, 4:7]
        assert np.abs(np.linalg.norm(nu1, axis=1) - 1).max() <= 1e-12
        assert np.abs(np.sum(nu1 * nu2, axis=1)).max() <= 1e-12


class TestExitCodes:
    def test_unknown_curve(self):
        rc, _, err = run_cli(["invariants", "--curve", "nope"])
        assert rc == 1 and "unknown corpus curve" in err

    def test_missing_config(self):
        rc, _, err = run_cli(["invariants", "--config", "/no/such/file.cfg"])
        assert rc == 1 and "cannot read config" in err

    def test_offset_count_mismatch(self):
        rc, _, err = run_cli([
            "verify", "--curve", "r4curve", "--check", "theorem22",
            "--u", "0.5",
        ])
        assert rc == 1 and "expected 2 offset" in err

    def test_io_error(self, tmp_path):
        rc, _, err = run_cli([
            "invariants", "--curve", "line", "--t-steps", "5",
            "--out", str(tmp_path / "missing" / "file.csv"),
        ])
        assert rc == 3

    def test_config_curve_pipeline(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(
            "name = scaled\ndim = 3\ncomponents = [t, u*t^2, t^3/6]\n"
            "domain = [-1, 1]\nparams.u = 0.5\ngrid.t_steps = 31\n",
            encoding="utf-8",
        )
        rc, out, _ = run_cli(["invariants", "--config", str(cfg)])
        assert rc == 0
        _, rows = parse_csv(out)
        assert rows.shape == (31, 4)


class TestDeterminism:
    COMMANDS = [
        ["invariants", "--curve", "example22", "--t-steps", "31"],
        ["surface", "--curve", "example22", "--kind", "tan",
         "--t-steps", "11", "--s-steps", "7"],
        ["surface", "--curve", "circle", "--kind", "can", "--r", "0.3",
         "--t-steps", "21", "--s-steps", "9", "--export", "csv"],
        ["verify", "--curve", "example22", "--check", "theorem22",
         "--u", "0.5", "--t-steps", "51", "--s-steps", "11"],
        ["frontality", "--curve", "cusp", "--t-steps", "11"],
        ["bishop", "--curve", "helix", "--t-steps", "51"],
    ]

    @pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0] + "-" + a[2])
    def test_repeated_runs_byte_identical(self, argv):
        rc1, out1, _ = run_cli(argv)
        rc2, out2, _ = run_cli(argv)
        assert rc1 == rc2
        assert out1.encode() == out2.encode()

    def test_subprocess_runs_byte_identical(self):
        argv = [sys.executable, "-m", "frontals", "invariants", "--curve",
                "cusp", "--t-steps", "21"]
        a = subprocess.run(argv, capture_output=True, check=True)
        b = subprocess.run(argv, capture_output=True, check=True)
        assert a.stdout == b.stdout
