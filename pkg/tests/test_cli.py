import json

import pytest
from click.testing import CliRunner

from netbank.cli import main
from netbank.store import recover


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    config = {
        "data_dir": str(tmp_path / "data"),
        "kdf_iterations": 1200,
        "journal_sync": False,
        "admin_username": "admin",
        "admin_password": "Adm1n!Secure",
    }
    path = tmp_path / "bank.json"
    path.write_text(json.dumps(config))
    return str(path)


@pytest.fixture
def fixture_file(tmp_path):
    fixture = {
        "customers": [{
            "full_name": "Demo User",
            "ic_passport_no": "IC-DEMO",
            "username": "demo",
            "password": "Dem0!secure",
            "must_change": False,
            "accounts": [
                {"kind": "current", "opening_minor": 500_000, "account_id": "DEMO-CUR"},
                {"kind": "saving", "opening_minor": 100_000, "account_id": "DEMO-SAV"},
            ],
            "cheque_books": [{"account_index": 0, "leaves": 25}],
        }],
    }
    path = tmp_path / "fixture.json"
    path.write_text(json.dumps(fixture))
    return str(path)


def seed(runner, config_file, fixture_file):
    result = runner.invoke(main, ["seed", "--fixture", fixture_file, "--config", config_file])
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


class TestSeed:
    def test_seed_creates_customers_and_cheques(self, runner, config_file, fixture_file, tmp_path):
        out = seed(runner, config_file, fixture_file)
        assert out["customers"][0]["account_ids"] == ["DEMO-CUR", "DEMO-SAV"]
        bank, _ = recover(str(tmp_path / "data"))
        assert bank.ledger.balance_minor("DEMO-CUR", "MYR") == 500_000
        assert len(bank.cheques.cheques) == 25


class TestBackupRecoverOffsite:
    def test_backup_then_recover_verifies(self, runner, config_file, fixture_file, tmp_path):
        seed(runner, config_file, fixture_file)
        result = runner.invoke(main, ["backup", "--config", config_file, "--mode", "complete"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["mode"] == "complete"

        result = runner.invoke(main, ["recover", "--data-dir", str(tmp_path / "data"), "--verify"])
        assert result.exit_code == 0, result.output
        report = json.loads(result.output)
        assert report["last_seq"] > 0
        assert report["snapshots_used"], "complete snapshot should drive recovery"
        assert report["verified"]["snapshots"] == 1

    def test_incremental_without_base_fails(self, runner, config_file, fixture_file):
        seed(runner, config_file, fixture_file)
        result = runner.invoke(main, ["backup", "--config", config_file, "--mode", "incremental"])
        assert result.exit_code == 1
        assert json.loads(result.output)["error"]["code"] == "NO_BASE"

    def test_offsite_round_trip(self, runner, config_file, fixture_file, tmp_path):
        seed(runner, config_file, fixture_file)
        runner.invoke(main, ["backup", "--config", config_file, "--mode", "complete"])
        target = str(tmp_path / "offsite")
        result = runner.invoke(main, ["offsite", "--config", config_file, "--target", target])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["verified"] is True
        original, _ = recover(str(tmp_path / "data"))
        copy, _ = recover(target)
        assert copy.to_state_dict() == original.to_state_dict()


class TestRunValueDate:
    def test_cli_executes_pending_items(self, runner, config_file, fixture_file, tmp_path):
        seed(runner, config_file, fixture_file)
        # queue a future transfer directly against the store
        from netbank import Money
        from netbank.clock import DAY_MS, ms_to_date
        from netbank.store import BankStore

        store = BankStore(str(tmp_path / "data"), sync=False, kdf_iterations=1200)
        token = store.bank.login("demo", "Dem0!secure")["token"]
        tomorrow = ms_to_date(store.clock.now_ms() + DAY_MS)
        tac = store.bank.issue_tac(token)["code"]
        store.bank.create_transfer(token, "DEMO-CUR", Money(1_000), tomorrow, tac,
                                   target_account_id="DEMO-SAV")
        store.close()

        result = runner.invoke(main, ["run-value-date", tomorrow, "--config", config_file])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["executed_count"] == 1
        bank, _ = recover(str(tmp_path / "data"))
        assert bank.ledger.balance_minor("DEMO-SAV", "MYR") == 101_000

    def test_date_regression_reported(self, runner, config_file, fixture_file):
        seed(runner, config_file, fixture_file)
        runner.invoke(main, ["run-value-date", "2030-01-02", "--config", config_file])
        result = runner.invoke(main, ["run-value-date", "2030-01-01", "--config", config_file])
        assert result.exit_code == 1
        assert json.loads(result.output)["error"]["code"] == "DATE_REGRESSION"


class TestConfig:
    def test_env_var_overrides_path(self, runner, tmp_path, fixture_file, monkeypatch):
        config = {"data_dir": str(tmp_path / "env-data"), "kdf_iterations": 1200,
                  "journal_sync": False}
        env_path = tmp_path / "env.json"
        env_path.write_text(json.dumps(config))
        monkeypatch.setenv("BANK_CONFIG", str(env_path))
        result = runner.invoke(main, ["seed", "--fixture", fixture_file])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "env-data" / "journal.log").exists()

    def test_invalid_config_values_rejected(self, tmp_path):
        from netbank.config import load_config
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"idle_timeout_s": 0}))
        with pytest.raises(ValueError):
            load_config(str(bad))
        bad.write_text(json.dumps({"mystery_knob": 1}))
        with pytest.raises(ValueError):
            load_config(str(bad))
