"""
Unit tests for ExperimentService and its profile helpers.

Commands run against real repositories in the test's temporary directory
with small instances.
"""

import math

import pytest

from lpnkit.repositories.dataset_repository import expected_file_size, key_path
from lpnkit.schemas.experiment import ExperimentConfig
from lpnkit.schemas.profile import HyperProfile
from lpnkit.schemas.report import TuneEntry, TuneResult
from lpnkit.services.experiment_service import ExperimentService, build_profile, format_tune_table, grid_profiles


@pytest.fixture
def experiment_service():
    """ExperimentService with default repositories."""
    return ExperimentService()


def _gen_config(out, **overrides) -> ExperimentConfig:
    values = {"command": "gen", "seed": 5, "n": 16, "tau": 0.1, "m": 100, "out": out}
    values.update(overrides)
    return ExperimentConfig(**values)


class TestProfiles:
    """Test suite for profile construction from configurations."""

    def test_flags_override_setting_defaults(self):
        """
        Test hyperparameter and stop overrides.

        Arrange: lr 0.01, full batch, 50 steps, 5 s time cap
        Act: Build the restricted profile
        Assert: Overrides applied, untouched fields keep the restricted defaults
        """
        # Arrange
        config = ExperimentConfig(
            command="solve", setting="restricted", seed=1, n=8, tau=0.1, m=64,
            lr="0.01", batch="full", width=16, steps=50, time_cap=5,
        )

        # Act
        profile = build_profile(config, "restricted")

        # Assert
        assert profile.lr == 0.01
        assert profile.batch_size is None
        assert profile.weight_decay == pytest.approx(2e-3)
        assert profile.width == 16
        assert profile.stop.max_steps == 50
        assert profile.stop.max_seconds == 5

    def test_stop_text_and_gamma_in_abundant_setting(self):
        """Test that --stop replaces the default and --gamma sets the target accuracy."""
        # Arrange
        config = ExperimentConfig(
            command="solve", setting="abundant", seed=1, n=8, tau=0.1, stop="acc:0.9+step:10", gamma=0.95,
        )

        # Act
        profile = build_profile(config, "abundant")

        # Assert
        assert profile.stop.target_accuracy == 0.95
        assert profile.stop.max_steps == 10
        assert profile.stop.max_seconds is None

    def test_grid_profiles_form_product(self):
        """Test the lr x batch product in lr-major order."""
        # Arrange
        config = ExperimentConfig(command="tune", setting="abundant", seed=1, n=8, tau=0.1,
                                  lr="0.1,0.01", batch="256,full")

        # Act
        profiles = grid_profiles(config, "abundant")

        # Assert
        assert [(p.lr, p.batch_size) for p in profiles] == [(0.1, 256), (0.1, None), (0.01, 256), (0.01, None)]
        assert all(p.weight_decay == 0.0 for p in profiles)

    def test_tune_table_stars_best_row(self):
        """Test the starred argmin row and the inf rendering."""
        # Arrange
        result = TuneResult(
            setting="restricted",
            entries=[
                TuneEntry(profile=HyperProfile(lr=0.1), value=math.inf),
                TuneEntry(profile=HyperProfile(lr=0.01), value=512),
            ],
            best_index=1,
        )

        # Act
        lines = format_tune_table(result).splitlines()

        # Assert
        assert "samples" in lines[0]
        assert lines[1].startswith(" ") and lines[1].rstrip().endswith("inf")
        assert lines[2].startswith("*") and lines[2].rstrip().endswith("512")


class TestGenerate:
    """Test suite for the gen command."""

    def test_gen_writes_dataset_and_log(self, experiment_service, dataset_path, run_log):
        """
        Test that gen writes the file, the key sidecar and the run log.

        Arrange: n=16, tau=0.1, m=100
        Act: Run gen
        Assert: Exit 0, exact file size, config record first and result record last
        """
        # Act
        outcome = experiment_service.run(_gen_config(dataset_path), run_log)

        # Assert
        assert outcome.exit_code == 0
        assert dataset_path.stat().st_size == expected_file_size(16, 100, True)
        assert key_path(dataset_path).exists()
        records = run_log.records
        assert records[0]["record"] == "config"
        assert records[0]["config"]["n"] == 16
        assert records[-1]["record"] == "result"
        assert records[-1]["status"] == "written"
        assert records[-1]["secret_hex"] == outcome.payload.secret.to_hex()

    def test_gen_is_deterministic(self, experiment_service, tmp_path, run_log):
        """Test that equal seeds write byte-identical files."""
        # Arrange
        first, second = tmp_path / "a.lpn", tmp_path / "b.lpn"

        # Act
        experiment_service.run(_gen_config(first), run_log)
        experiment_service.run(_gen_config(second), run_log)

        # Assert
        assert first.read_bytes() == second.read_bytes()

    def test_public_gen_keeps_secret_out_of_file(self, experiment_service, dataset_path, run_log):
        """Test --public."""
        # Act
        experiment_service.run(_gen_config(dataset_path, public=True), run_log)

        # Assert
        assert dataset_path.stat().st_size == expected_file_size(16, 100, False)
        assert experiment_service.dataset_repository.load(dataset_path).secret is None


class TestSolve:
    """Test suite for the solve command."""

    def test_gauss_solves_generated_file(self, experiment_service, dataset_path, run_log, checkpoint_path):
        """
        Test solving a written dataset with the Gauss baseline.

        Arrange: Public n=12, tau=0.05 file with a weight-3 secret, 3000 rows
        Act: Solve with --data, asking for a checkpoint
        Assert: Exit 0, secret matches the sidecar truth, no checkpoint written
        """
        # Arrange
        experiment_service.run(
            _gen_config(dataset_path, n=12, tau=0.05, m=3000, sparsity=3, public=True), run_log
        )
        config = ExperimentConfig(command="solve", setting="gauss", seed=9, data=dataset_path, out=checkpoint_path)

        # Act
        outcome = experiment_service.run(config, run_log)

        # Assert
        assert outcome.exit_code == 0
        result = run_log.records[-1]
        assert result["status"] == "success"
        assert result["details"]["matches_truth"] is True
        assert outcome.payload.secret.popcount() == 3
        assert not checkpoint_path.exists()
        assert any(r["record"] == "phase" and r["name"] == "load" for r in run_log.records)

    def test_restricted_with_few_samples_is_inconclusive(self, experiment_service, run_log):
        """Test that m = 8 exits with 2."""
        # Arrange
        config = ExperimentConfig(command="solve", setting="restricted", seed=1, n=16, tau=0.1, m=8)

        # Act
        outcome = experiment_service.run(config, run_log)

        # Assert
        assert outcome.exit_code == 2
        assert run_log.records[-1]["status"] == "inconclusive"
        assert run_log.records[-1]["exit_code"] == 2


class TestVerifyTheory:
    """Test suite for the verify-theory command."""

    def test_parity_check_passes(self, experiment_service, run_log):
        """Test the parity-network check through the service."""
        # Arrange
        config = ExperimentConfig(command="verify-theory", check="parity-net", seed=1, n=6, repeat=5)

        # Act
        outcome = experiment_service.run(config, run_log)

        # Assert
        assert outcome.exit_code == 0
        assert outcome.payload.cases == 5
        assert run_log.records[-1]["status"] == "pass"
