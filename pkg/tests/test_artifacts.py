import math

import pytest

from src.config.run_config import RunConfig
from src.models.errors import ArtifactError, PhysicsDomainError
from src.workflows.artifacts import read_csv, write_csv
from src.workflows.operating_point import operating_point


def test_schema_header_and_formatting(tmp_path):
    path = write_csv(tmp_path / "nested" / "x.csv", [("omega", "1"), ("s", "shot noise"), ("ok", "0|1")],
                     [(0.5, math.inf, True), (1.0, 0.25, False)])
    lines = path.read_text().splitlines()
    assert lines[0] == "# schema: omega[1],s[shot noise],ok[0|1]"
    assert lines[2] == "5.000000000000e-01,inf,1"
    header, rows = read_csv(path)
    assert header == ["omega", "s", "ok"]
    assert rows[1] == ["1.000000000000e+00", "2.500000000000e-01", "0"]


def test_row_width_checked(tmp_path):
    with pytest.raises(ValueError):
        write_csv(tmp_path / "x.csv", [("a", "1")], [(1.0, 2.0)])


def test_unwritable_path(tmp_path):
    blocker = tmp_path / "taken"
    blocker.write_text("")
    with pytest.raises(ArtifactError) as info:
        write_csv(blocker / "sub" / "x.csv", [("a", "1")], [(1.0,)])
    assert info.value.code == "io"


class TestOperatingPoint:
    def test_detuning_follows_drive(self):
        params = operating_point(RunConfig(), 1.15)
        assert params.delta == pytest.approx(1.15)
        assert params.drive_intensity == pytest.approx(1.15)
        assert params.hex_detuning == pytest.approx(2.0)

    def test_fixed_detuning(self):
        params = operating_point(RunConfig(delta=0.5), 1.15)
        assert params.delta == 0.5
        assert params.hex_detuning == pytest.approx(2.0)

    def test_fixed_detuning_out_of_domain(self):
        with pytest.raises(PhysicsDomainError):
            operating_point(RunConfig(delta=2.0), 1.15)
