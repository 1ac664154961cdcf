import json

import numpy as np
import pytest

from conftest import column, parse_csv, run_cli
from ptqsim.cli import main


def invoke(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSpectrumCommand:
    def test_diagonal_case_json(self, capsys):
        code, out, _ = invoke(capsys, "spectrum", "--omega", 0, "--j", 0.3)
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"params", "results", "diagnostics"}
        values = sorted(
            (e["re"], e["im"]) for e in payload["results"]["eigenvalues"]
        )
        expected = sorted([(-0.3, 0.0), (-0.3, 0.0), (0.3, 1.0), (0.3, -1.0)])
        assert np.allclose(values, expected, atol=1e-9)

    def test_csv_format(self, capsys):
        code, out, _ = invoke(capsys, "spectrum", "--omega", 2, "--j", 0.4, "--format", "csv")
        assert code == 0
        meta, header, cols = parse_csv(out)
        assert header[:3] == ["label", "re_e", "im_e"]
        assert cols["label"] == ["E1", "E2", "E3", "E4"]
        assert meta["phase"] == "pt-symmetric"


class TestEpCommands:
    def test_locate_json(self, capsys):
        code, out, _ = invoke(
            capsys, "ep-locate", "--sweep-axis", "j", "--omega", 2.0,
            "--sweep-range", "0.3:0.9",
        )
        assert code == 0
        results = json.loads(out)["results"]
        assert 0.586 <= results["j_c"] <= 0.591
        assert abs(results["gap"]) <= 1e-6

    def test_locate_no_sign_change_exits_3(self, capsys):
        code, _, err = invoke(
            capsys, "ep-locate", "--sweep-axis", "j", "--omega", 2.0,
            "--sweep-range", "0.1:0.2",
        )
        assert code == 3
        assert json.loads(err)["error"] == "NoSignChangeError"

    def test_curve_csv_marks_failures(self, capsys):
        code, out, _ = invoke(
            capsys, "ep-curve", "--sweep-range", "0.5:2.0", "--n", 4, "--format", "csv",
        )
        assert code == 0
        meta, header, cols = parse_csv(out)
        assert "failure" in header
        assert cols["failure"][0] == "NoSignChangeError"
        assert cols["failure"][-1] == ""


class TestConcurrenceCommand:
    def test_point_json(self, capsys):
        code, out, _ = invoke(capsys, "concurrence", "--omega", 2.0, "--j", 0.7)
        results = json.loads(out)["results"]
        assert code == 0
        assert results["c_psi3"] == pytest.approx(results["c_psi4"], abs=1e-9)
        assert results["max_closed_form_discrepancy"] > 1e-6

    def test_sweep_csv(self, capsys):
        code, out, _ = invoke(
            capsys, "concurrence", "--omega", 2.0, "--sweep-axis", "j",
            "--sweep-range", "0.3:0.5", "--n", 5, "--format", "csv",
        )
        assert code == 0
        _, header, cols = parse_csv(out)
        assert header == ["j", "c_psi3", "c_psi4", "c_closed_psi3", "c_closed_psi4"]
        c3 = column(cols, "c_psi3")
        assert np.all(np.diff(c3) < 0)  # falls with j below the critical point


class TestEvolveCommand:
    def test_csv_layout_and_magic(self, capsys):
        code, out, _ = invoke(
            capsys, "evolve", "--omega", 2.0, "--j", 0.7, "--theta", 1.5707963,
            "--tmax", 5, "--record-every", 100,
        )
        assert code == 0
        assert out.startswith("# ptq-sim v1\n# params: ")
        _, header, cols = parse_csv(out)
        assert header == ["t", "concurrence", "coherence_x", "norm_log"]
        assert column(cols, "t")[-1] == pytest.approx(5.0)

    def test_validation_error_exits_2(self, capsys):
        code, _, err = invoke(
            capsys, "evolve", "--omega", 2.0, "--j", 0.7, "--tmax", 5, "--dt", "-0.1",
        )
        assert code == 2
        assert "error" in json.loads(err)


class TestSenseCommand:
    def test_two_endpoints_one_phase(self, capsys):
        code, out, _ = invoke(
            capsys, "sense", "--sweep-axis", "j", "--omega", 2.0,
            "--sweep-range", "0.30:0.35", "--n", 2,
        )
        assert code == 0
        meta, header, cols = parse_csv(out)
        assert meta["n_flagged"] == "0"
        assert cols["flag"] == ["", ""]
        assert np.all(column(cols, "inv_variance_sq") <= column(cols, "qfi") * (1 + 1e-6))

    def test_requires_axis(self, capsys):
        code, _, err = invoke(capsys, "sense", "--sweep-range", "0.3:0.4", "--n", 4)
        assert code == 2


class TestRevivalsCommand:
    def test_metadata(self, capsys):
        code, out, _ = invoke(
            capsys, "revivals", "--omega", 1.7, "--j", 0.337, "--tmax", 300,
            "--dt", 0.02, "--collapse-fraction", 0.45,
        )
        assert code == 0
        meta, header, cols = parse_csv(out)
        assert header == ["revival_index", "revival_time"]
        assert int(meta["n_revivals"]) >= 1
        assert float(meta["first_revival"]) == pytest.approx(128.0, abs=10.0)


class TestReproduce:
    def test_fig3a_metadata_and_shape(self, tmp_path, capsys):
        out_file = tmp_path / "fig3a.csv"
        code, _, _ = invoke(capsys, "reproduce", "fig3a", "--out", out_file)
        assert code == 0
        meta, header, cols = parse_csv(out_file.read_text())
        assert header == ["j", "c_psi3", "c_psi4"]
        assert float(meta["j_c"]) == pytest.approx(0.58998, abs=1e-4)
        assert len(cols["j"]) == 121

    def test_byte_identical_reruns(self, tmp_path, capsys):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            assert invoke(capsys, "reproduce", "fig3b", "--out", path)[0] == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestQfiCommand:
    def test_point_json(self, capsys):
        code, out, _ = invoke(
            capsys, "qfi", "--omega", 2.0, "--j", 0.45, "--sweep-axis", "j",
        )
        assert code == 0
        results = json.loads(out)["results"]
        assert results["cr_bound"] == pytest.approx(1 / np.sqrt(results["qfi"]))
        assert results["inv_variance_sq"] <= results["qfi"] * (1 + 1e-6)

    def test_sweep_delegates_to_sense(self, capsys):
        code, out, _ = invoke(
            capsys, "qfi", "--omega", 2.0, "--sweep-axis", "j",
            "--sweep-range", "0.40:0.45", "--n", 3, "--format", "csv",
        )
        assert code == 0
        _, header, _ = parse_csv(out)
        assert header[0] == "j" and "qfi" in header


class TestRemainingPresets:
    def test_fig2_surface_grid(self, tmp_path, capsys):
        out_file = tmp_path / "fig2.csv"
        assert invoke(capsys, "reproduce", "fig2", "--out", out_file)[0] == 0
        _, header, cols = parse_csv(out_file.read_text())
        assert header == ["omega", "j", "re_e3", "im_e3", "re_e4", "im_e4"]
        assert len(cols["omega"]) == 61 * 61
        im3 = column(cols, "im_e3")
        im4 = column(cols, "im_e4")
        # conjugate partners: imaginary parts mirror each other
        assert np.max(np.abs(im3 + im4)) < 1e-9

    def test_fig5b_runs(self, tmp_path, capsys):
        out_file = tmp_path / "fig5b.csv"
        assert invoke(capsys, "reproduce", "fig5b", "--out", out_file)[0] == 0
        _, header, cols = parse_csv(out_file.read_text())
        assert header == ["t", "concurrence_omega1901", "concurrence_omega1902"]
        assert column(cols, "t")[-1] == pytest.approx(2000.0)


class TestProcessLevel:
    def test_version_runs(self):
        proc = run_cli(["--version"])
        assert proc.returncode == 0
        assert "ptq-sim" in proc.stdout

    def test_unknown_flag_exits_2(self):
        proc = run_cli(["spectrum", "--bogus", "1"])
        assert proc.returncode == 2

    def test_unknown_preset_exits_2(self):
        proc = run_cli(["reproduce", "fig99"])
        assert proc.returncode == 2
