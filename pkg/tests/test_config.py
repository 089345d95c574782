import pytest

from zetalab.core.config import RunConfig, activate_settings, get_settings, load_run_config
from zetalab.core.errors import UsageError


class TestRunConfig:
    def test_defaults(self, monkeypatch):
        """Should fall back to the documented defaults"""
        monkeypatch.delenv("ZETALAB_THREADS", raising=False)
        config = RunConfig()
        assert config.SIEVE_LIMIT == 1_000_000
        assert config.ZETA_TOLERANCE == 1e-12
        assert config.CHECK_SLACK == 1e-9
        assert config.OUTPUT_FORMAT == "json"
        assert config.THREADS == 1

    def test_environment_override(self, monkeypatch):
        """Should read ZETALAB_-prefixed environment variables"""
        monkeypatch.setenv("ZETALAB_THREADS", "3")
        assert RunConfig().THREADS == 3

    def test_rejects_bad_values(self):
        """Should validate tolerances and counts"""
        with pytest.raises(ValueError):
            RunConfig(ZETA_TOLERANCE=0.0)
        with pytest.raises(ValueError):
            RunConfig(THREADS=0)


class TestLoadRunConfig:
    def test_file_then_overrides(self, tmp_path):
        """Should let explicit overrides win over the config file"""
        path = tmp_path / "run.env"
        path.write_text("ZETALAB_SIEVE_LIMIT=5000\nTHREADS=2\nQUAD_TOLERANCE=1e-4\n")
        config = load_run_config(str(path), {"THREADS": 4, "OUTPUT_PATH": None})
        assert config.SIEVE_LIMIT == 5000
        assert config.THREADS == 4
        assert config.QUAD_TOLERANCE == 1e-4
        assert config.OUTPUT_PATH == "-"

    def test_missing_file(self, tmp_path):
        """Should raise UsageError for a missing config file"""
        with pytest.raises(UsageError):
            load_run_config(str(tmp_path / "nope.env"))

    def test_invalid_value(self, tmp_path):
        """Should raise UsageError for values that fail validation"""
        path = tmp_path / "run.env"
        path.write_text("OUTPUT_FORMAT=xml\n")
        with pytest.raises(UsageError):
            load_run_config(str(path))


class TestActiveSettings:
    def test_activate_and_reset(self, monkeypatch):
        """Should serve the activated config until reset"""
        monkeypatch.delenv("ZETALAB_THREADS", raising=False)
        activate_settings(RunConfig(THREADS=7))
        assert get_settings().THREADS == 7
        activate_settings(None)
        assert get_settings().THREADS == 1
