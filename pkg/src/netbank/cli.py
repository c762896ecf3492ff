"""The `bank` command line.

    bank serve --config FILE        run the HTTP service
    bank recover --data-dir D       rebuild state and print a report
    bank backup --mode M            take a complete/incremental snapshot
    bank offsite --target T         copy + verify the latest chain off-site
    bank run-value-date DATE        execute pending items up to DATE
    bank seed --fixture FILE        load customers/accounts from a fixture

BANK_CONFIG overrides the --config path when set.
"""

from __future__ import annotations

import json
import sys
import threading
import time

import click

from .api import create_app
from .config import load_config, resolve_config_path
from .errors import BankError
from .store import BankStore, recover as recover_dir, verify_backup


def _open_store(config) -> BankStore:
    return BankStore(
        config.data_dir,
        sync=config.journal_sync,
        policy=config.password_policy(),
        idle_timeout_s=config.idle_timeout_s,
        tac_ttl_s=config.tac_ttl_s,
        kdf_iterations=config.kdf_iterations,
    )


def _load(config_path: str | None):
    return load_config(resolve_config_path(config_path))


@click.group()
def main():
    """Internet banking service and its operational tools."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON config file (see README).")
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(config_path, host):
    """Run the HTTP API with the backup scheduler and daily value dates."""
    import uvicorn

    config = _load(config_path)
    store = _open_store(config)
    store.bank.ensure_admin(config.admin_username, config.admin_password)
    app = create_app(store.bank)

    stop = threading.Event()

    def housekeeping():
        from .clock import ms_to_date
        last_date = ms_to_date(store.clock.now_ms())
        while not stop.is_set():
            store.scheduled_backup_tick(
                config.backup_interval_s,
                complete_every=config.backup_complete_every,
                offsite_target=config.offsite_target,
            )
            store.bank.sweep_sessions()
            today = ms_to_date(store.clock.now_ms())
            if today != last_date:
                store.bank.run_value_date(today)
                last_date = today
            stop.wait(min(30, config.backup_interval_s))

    worker = threading.Thread(target=housekeeping, daemon=True)
    worker.start()
    try:
        uvicorn.run(app, host=host, port=config.listen_port, log_level="info")
    finally:
        stop.set()
        store.close()


@main.command()
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--verify", is_flag=True, help="Also checksum-verify every snapshot and the journal.")
def recover(data_dir, verify):
    """Rebuild state from the journal and snapshots; print a report."""
    try:
        bank, report = recover_dir(data_dir)
        out = report.to_dict()
        if verify:
            out["verified"] = verify_backup(data_dir, expected_state=bank.to_state_dict())
        click.echo(json.dumps(out, indent=2))
    except BankError as exc:
        click.echo(json.dumps({"error": exc.to_dict()}, indent=2))
        sys.exit(1)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", default=None, type=click.Path(), help="Overrides the config data_dir.")
@click.option("--mode", type=click.Choice(["complete", "incremental"]), default="complete",
              show_default=True)
def backup(config_path, data_dir, mode):
    """Take a snapshot of the current state."""
    config = _load(config_path)
    if data_dir:
        config.data_dir = data_dir
    store = _open_store(config)
    try:
        info = store.snapshot(mode)
        click.echo(json.dumps(info.to_dict(), indent=2))
    except BankError as exc:
        click.echo(json.dumps({"error": exc.to_dict()}, indent=2))
        sys.exit(1)
    finally:
        store.close()


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", default=None, type=click.Path())
@click.option("--target", required=True, type=click.Path())
def offsite(config_path, data_dir, target):
    """Copy the latest snapshot chain and journal to an off-site directory."""
    config = _load(config_path)
    if data_dir:
        config.data_dir = data_dir
    store = _open_store(config)
    try:
        click.echo(json.dumps(store.offsite_copy(target), indent=2))
    except BankError as exc:
        click.echo(json.dumps({"error": exc.to_dict()}, indent=2))
        sys.exit(1)
    finally:
        store.close()


@main.command("run-value-date")
@click.argument("date")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", default=None, type=click.Path())
def run_value_date(date, config_path, data_dir):
    """Execute all pending transfers and payments due on or before DATE."""
    config = _load(config_path)
    if data_dir:
        config.data_dir = data_dir
    store = _open_store(config)
    try:
        click.echo(json.dumps(store.bank.run_value_date(date), indent=2))
    except BankError as exc:
        click.echo(json.dumps({"error": exc.to_dict()}, indent=2))
        sys.exit(1)
    finally:
        store.close()


@main.command()
@click.option("--fixture", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--data-dir", default=None, type=click.Path())
def seed(fixture, config_path, data_dir):
    """Load a fixture file of customers, accounts and cheque books."""
    config = _load(config_path)
    if data_dir:
        config.data_dir = data_dir
    store = _open_store(config)
    try:
        with open(fixture, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        store.bank.ensure_admin(config.admin_username, config.admin_password)
        result = store.bank.seed_fixture(payload)
        click.echo(json.dumps(result, indent=2))
    except BankError as exc:
        click.echo(json.dumps({"error": exc.to_dict()}, indent=2))
        sys.exit(1)
    finally:
        store.close()


if __name__ == "__main__":
    main()
