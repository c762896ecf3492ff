"""Durable store: journal plus snapshots plus recovery and backups.

Recovery loads the newest usable snapshot chain (falling back to older
chains, or to pure journal replay, when members fail their checksums)
and replays the journal tail past the chain. Off-site copies replicate
the latest chain and the journal to another directory and are verified
by checksum and by an actual recover of the copy.
"""

from __future__ import annotations

import os
import shutil
from dataclasses import dataclass, field

from .bank import Bank
from .clock import SystemClock
from .errors import BankError
from .journal import JOURNAL_FILE, Journal, read_journal
from .snapshots import (
    COMPLETE,
    INCREMENTAL,
    SNAPSHOT_DIR,
    SnapshotInfo,
    load_snapshot,
    read_manifest,
    resolve_chain,
    write_snapshot,
)


@dataclass
class RecoveryReport:
    events: int = 0
    discarded_tail: int = 0
    snapshots_used: list = field(default_factory=list)
    snapshot_fallbacks: int = 0
    last_seq: int = 0
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "events": self.events,
            "discarded_tail": self.discarded_tail,
            "snapshots_used": list(self.snapshots_used),
            "snapshot_fallbacks": self.snapshot_fallbacks,
            "last_seq": self.last_seq,
            "warnings": list(self.warnings),
        }


def _journal_path(data_dir: str) -> str:
    return os.path.join(data_dir, JOURNAL_FILE)


def recover(data_dir: str, clock=None, **bank_kwargs) -> tuple[Bank, RecoveryReport]:
    """Rebuild a Bank from a data directory.

    Precedence: newest valid snapshot chain, then the journal tail. A
    torn final journal record is discarded with a warning; mid-stream
    corruption aborts.
    """
    clock = clock or SystemClock()
    report = RecoveryReport()
    records, scan = read_journal(_journal_path(data_dir))
    report.discarded_tail = scan.discarded_tail
    report.warnings.extend(scan.warnings)

    infos = read_manifest(data_dir)
    bank = Bank(clock, **bank_kwargs)
    chain_upto = 0
    if infos:
        chain = _usable_chain(data_dir, infos, report)
        if chain is not None:
            payloads = [load_snapshot(data_dir, info) for info in chain]
            bank.load_state_dict(payloads[0]["state"])
            for payload in payloads[1:]:
                for item in payload["events"]:
                    bank.apply(item["event"])
            chain_upto = chain[-1].upto_seq
            report.snapshots_used = [info.snapshot_id for info in chain]
        elif not records or records[0][0] != 1:
            raise BankError("CORRUPT_SNAPSHOT",
                            "no usable snapshot chain and journal does not start at 1")
        else:
            report.warnings.append("all snapshot chains unusable; replaying full journal")

    if records:
        first_seq = records[0][0]
        if first_seq > chain_upto + 1:
            raise BankError("CORRUPT_JOURNAL",
                            f"journal starts at {first_seq}, snapshot covers up to {chain_upto}")
        for seq, _ts, event in records:
            if seq <= chain_upto:
                continue
            bank.apply(event)
            report.events += 1
        report.last_seq = records[-1][0]
    else:
        report.last_seq = chain_upto
    return bank, report


def _usable_chain(data_dir: str, infos: list[SnapshotInfo], report: RecoveryReport):
    for head in sorted(infos, key=lambda i: i.snapshot_id, reverse=True):
        chain = resolve_chain(infos, head)
        if chain is None:
            report.snapshot_fallbacks += 1
            continue
        try:
            for info in chain:
                load_snapshot(data_dir, info)
        except BankError:
            report.snapshot_fallbacks += 1
            continue
        return chain
    return None


def verify_backup(data_dir: str, expected_state: dict | None = None) -> dict:
    """Checksum-verify a data directory and prove it recovers.

    Raises VERIFY_FAILED on any checksum mismatch, unreadable member or,
    when expected_state is given, state divergence.
    """
    try:
        records, scan = read_journal(_journal_path(data_dir))
        infos = read_manifest(data_dir)
        for info in infos:
            load_snapshot(data_dir, info)
        bank, report = recover(data_dir)
    except BankError as exc:
        raise BankError("VERIFY_FAILED", f"backup verification failed: {exc.message}") from exc
    if scan.discarded_tail:
        raise BankError("VERIFY_FAILED", "backup journal has a torn tail")
    if expected_state is not None and bank.to_state_dict() != expected_state:
        raise BankError("VERIFY_FAILED", "recovered state differs from the source state")
    return {"records": len(records), "snapshots": len(infos), "last_seq": report.last_seq}


class BankStore:
    """A recovered Bank bound to its data directory, journal attached."""

    def __init__(self, data_dir: str, clock=None, *, sync: bool = True, **bank_kwargs):
        self.data_dir = data_dir
        self.clock = clock or SystemClock()
        os.makedirs(data_dir, exist_ok=True)
        self.bank, self.recovery_report = recover(data_dir, self.clock, **bank_kwargs)
        self.journal = Journal(_journal_path(data_dir), sync=sync)
        self.bank.journal = self.journal
        # backup scheduling state (per process; a restart starts a fresh cycle)
        self.backup_runs = 0
        self.last_backup_ms: int | None = None
        self.last_tick_report: dict = {}

    # ---------- snapshots ----------

    def _next_snapshot_id(self) -> int:
        infos = read_manifest(self.data_dir)
        return max((i.snapshot_id for i in infos), default=0) + 1

    def snapshot(self, mode: str) -> SnapshotInfo:
        if mode not in (COMPLETE, INCREMENTAL):
            raise BankError("SCHEMA_VIOLATION", f"mode must be {COMPLETE} or {INCREMENTAL}")
        with self.bank._lock:
            upto = self.journal.last_seq
            snapshot_id = self._next_snapshot_id()
            now = self.clock.now_ms()
            if mode == COMPLETE:
                payload = {
                    "snapshot_id": snapshot_id,
                    "mode": COMPLETE,
                    "upto_seq": upto,
                    "state": self.bank.to_state_dict(),
                }
                base_id = None
            else:
                infos = read_manifest(self.data_dir)
                if not infos:
                    raise BankError("NO_BASE", "incremental snapshot requires a prior snapshot")
                base = max(infos, key=lambda i: i.snapshot_id)
                records, _ = read_journal(_journal_path(self.data_dir))
                events = [{"seq": seq, "event": event}
                          for seq, _ts, event in records if base.upto_seq < seq <= upto]
                payload = {
                    "snapshot_id": snapshot_id,
                    "mode": INCREMENTAL,
                    "base_snapshot_id": base.snapshot_id,
                    "upto_seq": upto,
                    "events": events,
                }
                base_id = base.snapshot_id
            return write_snapshot(self.data_dir, snapshot_id, mode, base_id, upto, now, payload)

    # ---------- off-site copies ----------

    def offsite_copy(self, target: str) -> dict:
        with self.bank._lock:
            try:
                os.makedirs(target, exist_ok=True)
                probe = os.path.join(target, ".write-probe")
                with open(probe, "w") as fh:
                    fh.write("ok")
                os.remove(probe)
            except OSError as exc:
                raise BankError("TARGET_UNWRITABLE", f"cannot write to {target}: {exc}") from exc

            copied = []
            source_journal = _journal_path(self.data_dir)
            if os.path.exists(source_journal):
                shutil.copy2(source_journal, _journal_path(target))
                copied.append(JOURNAL_FILE)

            infos = read_manifest(self.data_dir)
            chain = _usable_chain(self.data_dir, infos, RecoveryReport()) if infos else None
            target_snapdir = os.path.join(target, SNAPSHOT_DIR)
            if chain:
                os.makedirs(target_snapdir, exist_ok=True)
                manifest_lines = []
                for info in chain:
                    shutil.copy2(os.path.join(self.data_dir, SNAPSHOT_DIR, info.filename),
                                 os.path.join(target_snapdir, info.filename))
                    copied.append(f"{SNAPSHOT_DIR}/{info.filename}")
                    manifest_lines.append(info)
                import json as _json
                with open(os.path.join(target_snapdir, "manifest"), "w", encoding="ascii") as fh:
                    for info in manifest_lines:
                        fh.write(_json.dumps(info.to_dict(), sort_keys=True, separators=(",", ":")) + "\n")
                copied.append(f"{SNAPSHOT_DIR}/manifest")

            result = verify_backup(target, expected_state=self.bank.to_state_dict())
            return {"target": target, "copied": copied, "verified": True, **result}

    # ---------- automated backups ----------

    def scheduled_backup_tick(self, interval_s: int, complete_every: int = 4,
                              offsite_target: str | None = None) -> SnapshotInfo | None:
        """Take a backup when the interval has elapsed; never raises.

        Failures are recorded in last_tick_report and retried on the next
        due tick. An off-site failure does not undo the local snapshot.
        """
        now = self.clock.now_ms()
        if self.last_backup_ms is not None and now - self.last_backup_ms < interval_s * 1000:
            return None
        has_base = bool(read_manifest(self.data_dir))
        mode = COMPLETE if (self.backup_runs % complete_every == 0 or not has_base) else INCREMENTAL
        report: dict = {"mode": mode, "at_ms": now}
        try:
            info = self.snapshot(mode)
        except BankError as exc:
            report["snapshot_error"] = exc.code
            self.last_tick_report = report
            return None
        self.backup_runs += 1
        self.last_backup_ms = now
        report["snapshot_id"] = info.snapshot_id
        if offsite_target:
            try:
                self.offsite_copy(offsite_target)
                report["offsite"] = "ok"
            except BankError as exc:
                report["offsite_error"] = exc.code
        self.last_tick_report = report
        return info

    def close(self) -> None:
        self.journal.close()
