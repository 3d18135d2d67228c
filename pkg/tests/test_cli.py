import pytest

import hexkerr
from src.workflows.artifacts import read_csv


def _run(capsys, *argv):
    code = hexkerr.main(list(argv))
    return code, capsys.readouterr()


class TestOracleCommand:
    def test_passes_at_default_cutoffs(self, tmp_path, capsys):
        code, out = _run(capsys, "oracle", "--out-dir", str(tmp_path))
        assert code == 0
        header, rows = read_csv(tmp_path / "oracle.csv")
        assert header == ["observable", "operator", "norm", "expected", "passed"]
        assert all(r[4] == "1" for r in rows)
        assert (tmp_path / "oracle.csv").read_text().startswith("# schema: observable[name]")
        assert "oracle.csv" in out.out

    def test_deterministic_output(self, tmp_path, capsys):
        _run(capsys, "oracle", "--out-dir", str(tmp_path / "a"))
        _run(capsys, "oracle", "--out-dir", str(tmp_path / "b"))
        assert (tmp_path / "a" / "oracle.csv").read_bytes() == (tmp_path / "b" / "oracle.csv").read_bytes()

    def test_failed_check_exit_status(self, tmp_path, capsys):
        code, out = _run(capsys, "oracle", "--out-dir", str(tmp_path), "--set", "oracle_tol=1e-30",
                         "--set", "fock_cutoffs=3,2,2,2,2,2,2")
        # sqrt(n)^2 rounding in the ladder algebra exceeds a 1e-30 tolerance
        assert code == 1
        assert "failed" in out.out

    def test_mode_zero_cutoff_error(self, tmp_path, capsys):
        code, out = _run(capsys, "oracle", "--out-dir", str(tmp_path), "--set", "fock_cutoffs=1,1,1,1,1,1,1")
        assert code == 2
        assert out.err.strip().splitlines()[-1].startswith("error code=basis message=")


class TestErrors:
    def test_unknown_key(self, tmp_path, capsys):
        code, out = _run(capsys, "oracle", "--out-dir", str(tmp_path), "--set", "colour=blue")
        assert code == 2
        assert "error code=config" in out.err
        assert len(out.err.strip().splitlines()) == 1

    def test_malformed_set(self, tmp_path, capsys):
        code, out = _run(capsys, "oracle", "--out-dir", str(tmp_path), "--set", "colour")
        assert code == 2
        assert "error code=config" in out.err

    def test_detuning_without_critical_wavenumber(self, tmp_path, capsys):
        code, out = _run(capsys, "spectrum", "--out-dir", str(tmp_path), "--delta", "2.5")
        assert code == 2
        assert "error code=physics_domain" in out.err

    def test_unwritable_output_directory(self, tmp_path, capsys):
        blocker = tmp_path / "taken"
        blocker.write_text("not a directory")
        code, out = _run(capsys, "oracle", "--out-dir", str(blocker / "sub"))
        assert code == 2
        assert out.err.strip().splitlines()[-1].startswith("error code=io message=cannot write")

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit):
            hexkerr.main(["plot"])


class TestSpectrumCommands:
    def test_x_spectrum_artifacts(self, tmp_path, capsys):
        code, _ = _run(capsys, "spectrum", "--out-dir", str(tmp_path), "--observable", "X1",
                       "--drive", "1.2", "--angle", "0", "--angle", "0.05",
                       "--set", "omegas=0,0.5,1,2", "--set", "dump_drift=true")
        assert code == 0
        header, rows = read_csv(tmp_path / "spectrum_X1_1.2.csv")
        assert header == ["angle_label", "psi", "omega_over_gamma", "s"]
        on_phase = {float(r[2]): float(r[3]) for r in rows if r[0] == "phi+0"}
        for omega, s in on_phase.items():
            assert s == pytest.approx(omega**2 / (4 + omega**2), abs=1e-9)
        off_phase = [float(r[3]) for r in rows if r[0] == "phi+0.05" and float(r[2]) == 0.0]
        assert off_phase[0] > 1.0
        assert (tmp_path / "angle_scan_X1_1.2.csv").exists()
        assert len(read_csv(tmp_path / "drift_1.2.csv")[1]) == 196

    def test_best_squeeze_below_fold_is_empty(self, tmp_path, capsys):
        code, _ = _run(capsys, "best-squeeze", "--out-dir", str(tmp_path),
                       "--set", "drive_range=0.5,0.7", "--set", "drive_points=2")
        assert code == 0
        header, rows = read_csv(tmp_path / "best_squeeze_W.csv")
        assert header == ["e_in_sq", "observable_label", "psi_opt", "s_min"]
        assert rows == []

    @pytest.mark.slow
    def test_best_squeeze_lines(self, tmp_path, capsys):
        for observable in ("W", "Q1", "X1"):
            code, _ = _run(capsys, "best-squeeze", "--out-dir", str(tmp_path), "--preset", "quick",
                           "--observable", observable, "--set", "drive_range=1.0,1.3", "--set", "drive_points=4")
            assert code == 0
            _, rows = read_csv(tmp_path / f"best_squeeze_{observable}.csv")
            assert len(rows) == 4
            limit = 1e-8 if observable == "X1" else 1.0
            assert all(float(r[3]) < limit for r in rows)


class TestSteadyCommand:
    def test_branch_and_trajectory(self, tmp_path, capsys):
        code, _ = _run(capsys, "steady", "--out-dir", str(tmp_path),
                       "--set", "drive_range=1.0,1.3", "--set", "drive_points=4",
                       "--set", "trajectory_time=1", "--set", "trajectory_every=100")
        assert code == 0
        header, rows = read_csv(tmp_path / "steady_branch.csv")
        assert header[0] == "e0s_sq" and header[-1] == "residual"
        assert [float(r[0]) for r in rows] == pytest.approx([1.0, 1.1, 1.2, 1.3])
        assert all(float(r[-1]) < 1e-12 for r in rows)
        header, frames = read_csv(tmp_path / "trajectory.csv")
        assert len(header) == 15
        assert len(frames) == 11


@pytest.mark.slow
class TestHysteresisCommand:
    def test_threshold_and_window(self, tmp_path, capsys):
        code, _ = _run(capsys, "hysteresis", "--out-dir", str(tmp_path))
        assert code == 0
        _, rows = read_csv(tmp_path / "hysteresis_summary.csv")
        jump, drop, width = (float(x) for x in rows[0])
        assert jump == pytest.approx(1.0, abs=0.02)
        assert width > 0
