"""Unit tests for the cv_teleportation_lab.commands.sweep_command module."""

import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from cv_teleportation_lab.commands.sweep_command import build_config, run_sweep
from cv_teleportation_lab.lab import TeleportationLab
from cv_teleportation_lab.models import (
    BeamSplitterBell,
    ExitCode,
    ScalarGain,
    SweepSpec,
    ToleranceConfigModel,
    UnityGain,
)
from cv_teleportation_lab.symplectic_core import make_bell_qnd

UNITY_FIDELITIES = [2 / 3, 2 * math.sqrt(6) / 7]


class TestRunSweep:
    """Unit tests for the run_sweep function."""

    def test_unity_gain(self, mock_sweep_spec: SweepSpec) -> None:
        """Test the unity-gain fidelities at g = 1, g' in {1, 4/3}."""
        rows = run_sweep(mock_sweep_spec)
        assert [row.g_prime for row in rows] == [1.0, 4 / 3]
        assert [row.metrics.fidelity for row in rows] == pytest.approx(UNITY_FIDELITIES)
        assert all((row.g_x, row.g_p) == (1.0, 1.0) for row in rows)

    def test_grid_order(self) -> None:
        """Test that g is the outer loop of the grid."""
        rows = run_sweep(SweepSpec(g_values=[0.5, 1.0], g_prime_values=[1.0, 2.0]))
        assert [(row.g, row.g_prime) for row in rows] == [(0.5, 1.0), (0.5, 2.0), (1.0, 1.0), (1.0, 2.0)]

    def test_beamsplitter_matches_qnd(self) -> None:
        """Test that a beam splitter with R/T = g' reproduces the QND sweep."""
        qnd = run_sweep(SweepSpec(g_values=[1.0, 2.5], g_prime_values=[0.7, 4 / 3]))
        bs = run_sweep(SweepSpec(g_values=[1.0, 2.5], g_prime_values=[0.7, 4 / 3], bell="bs"))
        for qnd_row, bs_row in zip(qnd, bs, strict=True):
            assert bs_row.metrics.fidelity == pytest.approx(qnd_row.metrics.fidelity, rel=1e-12)
            assert bs_row.metrics.photon_noise == pytest.approx(qnd_row.metrics.photon_noise, rel=1e-12)

    def test_minimum_variance_gains(self) -> None:
        """Test that the V-minimizing gains reach 1/29 at g = 2.5 and are reported."""
        (row,) = run_sweep(SweepSpec(g_values=[2.5], gains="minv"))
        assert row.metrics.conditional_variance == pytest.approx(1 / 29)
        assert (row.g_x, row.g_p) == pytest.approx((2.5, 2.5 / 7.25))

    def test_scalar_gains(self) -> None:
        """Test that fixed scalar gains are applied and reported."""
        (row,) = run_sweep(SweepSpec(g_values=[1.0], gains="scalar", g_x=2.0, g_p=0.5))
        assert (row.g_x, row.g_p) == (2.0, 0.5)

    def test_improved_squeezers(self) -> None:
        """Test F_S(g = 1) = 1/sqrt(2)."""
        (row,) = run_sweep(SweepSpec(g_values=[1.0], local_ops="improved"))
        assert row.metrics.fidelity == pytest.approx(1 / math.sqrt(2))

    @pytest.mark.parametrize("bell", ["qnd", "bs"])
    def test_optimal_local_ops(self, bell: str) -> None:
        """Test N_min(g = 1) = sqrt(2) - 1 for either Bell family."""
        (row,) = run_sweep(SweepSpec(g_values=[1.0], g_prime_values=[0.7], bell=bell, local_ops="optimal"))
        assert row.metrics.photon_noise == pytest.approx(math.sqrt(2) - 1, abs=1e-10)

    def test_matrix_bell(self) -> None:
        """Test that a matrix Bell interaction sweeps g alone."""
        spec = SweepSpec(g_values=[1.0, 2.5], g_prime_values=[1.0, 2.0], bell="matrix", matrix=make_bell_qnd(4 / 3))
        rows = run_sweep(spec)
        assert [row.g_prime for row in rows] == [None, None]
        assert rows[0].metrics.fidelity == pytest.approx(2 * math.sqrt(6) / 7)


class TestBuildConfig:
    """Unit tests for the build_config function."""

    def test_beamsplitter(self, mock_tolerance_config: ToleranceConfigModel) -> None:
        """Test the beam splitter chosen for a Bell constant."""
        config = build_config(SweepSpec(g_values=[1.0], bell="bs"), 1.0, 4 / 3, mock_tolerance_config)
        assert isinstance(config.bell, BeamSplitterBell)
        assert config.bell.transmissivity == pytest.approx(0.6)
        assert config.bell.reflectivity == pytest.approx(0.8)
        assert config.gains == UnityGain()

    def test_maximum_transfer_gains(self, mock_tolerance_config: ToleranceConfigModel) -> None:
        """Test that the T-maximizing gains are built as scalar gains."""
        config = build_config(SweepSpec(g_values=[1.0], gains="maxt"), 1.0, 1.0, mock_tolerance_config)
        assert config.gains == ScalarGain(g_x=2.0, g_p=1.0)
        np.testing.assert_array_equal(config.s_a, np.eye(2))


class TestSweepCommand:
    """Unit tests for the SweepCommand class."""

    def test_csv(self, mock_lab: TeleportationLab, tmp_path: Path) -> None:
        """Test a CSV sweep written to a file."""
        filepath = tmp_path / "sweep.csv"
        exit_code = mock_lab.run(["sweep", "--g", "1", "--g-prime", "1", repr(4 / 3), "--out", str(filepath)])

        records = list(csv.DictReader(filepath.read_text().splitlines()))
        assert exit_code == ExitCode.OK
        assert [float(record["F"]) for record in records] == pytest.approx(UNITY_FIDELITIES)

    def test_csv_and_json_agree(self, mock_lab: TeleportationLab, tmp_path: Path) -> None:
        """Test that both formats carry identical values."""
        arguments = ["sweep", "--g", "0.5", "2.5", "--g-prime", "0.7", "1.64", "--gains", "maxt"]
        csv_path, json_path = tmp_path / "sweep.csv", tmp_path / "sweep.json"
        assert mock_lab.run([*arguments, "--out", str(csv_path)]) == ExitCode.OK
        assert mock_lab.run([*arguments, "--format", "json", "--out", str(json_path)]) == ExitCode.OK

        records = list(csv.DictReader(csv_path.read_text().splitlines()))
        document = json.loads(json_path.read_text())
        for record, row in zip(records, document, strict=True):
            assert float(record["V"]) == row["metrics"]["conditional_variance"]
            assert float(record["T"]) == row["metrics"]["signal_transfer"]
            assert float(record["F"]) == row["metrics"]["fidelity"]
            assert float(record["Gx"]) == row["g_x"]

    def test_matrix_file(self, mock_lab: TeleportationLab, tmp_path: Path) -> None:
        """Test a sweep through a Bell interaction read from a file."""
        matrix_path, out_path = tmp_path / "bell.json", tmp_path / "sweep.json"
        matrix_path.write_text(json.dumps(make_bell_qnd(4 / 3).tolist()))

        exit_code = mock_lab.run(
            ["sweep", "--g", "1", "--bell", "matrix-file", "--matrix-file", str(matrix_path)]
            + ["--format", "json", "--out", str(out_path)]
        )

        (row,) = json.loads(out_path.read_text())
        assert exit_code == ExitCode.OK
        assert row["g_prime"] is None
        assert row["metrics"]["fidelity"] == pytest.approx(2 * math.sqrt(6) / 7)

    def test_config_file(self, mock_lab: TeleportationLab, tmp_path: Path) -> None:
        """Test a sweep read from a JSON specification."""
        spec_path, out_path = tmp_path / "spec.json", tmp_path / "sweep.json"
        spec_path.write_text(
            json.dumps({"g_values": [2.5], "gains": "minv", "output_format": "json", "out": str(out_path)})
        )

        exit_code = mock_lab.run(["sweep", "--config", str(spec_path)])

        (row,) = json.loads(out_path.read_text())
        assert exit_code == ExitCode.OK
        assert row["metrics"]["conditional_variance"] == pytest.approx(1 / 29)

    def test_empty_grid(self, mock_lab: TeleportationLab) -> None:
        """Test that a sweep without entangling constants is a usage error."""
        assert mock_lab.run(["sweep"]) == ExitCode.USAGE_ERROR

    def test_matrix_file_missing(self, mock_lab: TeleportationLab) -> None:
        """Test that a matrix Bell interaction needs its file."""
        assert mock_lab.run(["sweep", "--g", "1", "--bell", "matrix-file"]) == ExitCode.USAGE_ERROR

    def test_non_symplectic_matrix(self, mock_lab: TeleportationLab, tmp_path: Path) -> None:
        """Test that a non-symplectic Bell interaction is a usage error."""
        matrix_path = tmp_path / "bell.json"
        matrix_path.write_text(json.dumps((2 * np.eye(4)).tolist()))
        arguments = ["sweep", "--g", "1", "--bell", "matrix-file", "--matrix-file", str(matrix_path)]
        assert mock_lab.run(arguments) == ExitCode.USAGE_ERROR

    def test_bad_choice(self, mock_lab: TeleportationLab) -> None:
        """Test that the parser rejects unknown policies with exit code 2."""
        with pytest.raises(SystemExit) as exc_info:
            mock_lab.run(["sweep", "--g", "1", "--gains", "best"])
        assert exc_info.value.code == ExitCode.USAGE_ERROR
