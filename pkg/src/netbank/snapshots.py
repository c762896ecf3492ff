"""Snapshot files and the snapshot manifest.

A complete snapshot captures the whole durable state; an incremental one
carries only the events since its base. Chains of incrementals always
terminate at a complete snapshot. Files live in <data_dir>/snapshots/ as
<id>.snap next to a text manifest with one descriptor per line.

Snapshot payloads use the same canonical JSON encoding as journal
records, and every file is covered by a CRC recorded in the manifest.
"""

from __future__ import annotations

import json
import os
import zlib
from dataclasses import dataclass

from .errors import BankError
from .journal import encode_event

SNAPSHOT_DIR = "snapshots"
MANIFEST_FILE = "manifest"

COMPLETE, INCREMENTAL = "complete", "incremental"


@dataclass(frozen=True)
class SnapshotInfo:
    snapshot_id: int
    mode: str
    base_snapshot_id: int | None
    upto_seq: int
    created_ms: int
    checksum: int
    filename: str

    def to_dict(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "mode": self.mode,
            "base_snapshot_id": self.base_snapshot_id,
            "upto_seq": self.upto_seq,
            "created_ms": self.created_ms,
            "checksum": self.checksum,
            "filename": self.filename,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SnapshotInfo":
        return cls(**d)


def _snapshot_dir(data_dir: str) -> str:
    return os.path.join(data_dir, SNAPSHOT_DIR)


def _manifest_path(data_dir: str) -> str:
    return os.path.join(_snapshot_dir(data_dir), MANIFEST_FILE)


def read_manifest(data_dir: str) -> list[SnapshotInfo]:
    path = _manifest_path(data_dir)
    if not os.path.exists(path):
        return []
    infos = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if line:
                infos.append(SnapshotInfo.from_dict(json.loads(line)))
    return infos


def write_snapshot(data_dir: str, snapshot_id: int, mode: str,
                   base_snapshot_id: int | None, upto_seq: int,
                   created_ms: int, payload: dict) -> SnapshotInfo:
    body = encode_event(payload)
    checksum = zlib.crc32(body) & 0xFFFFFFFF
    os.makedirs(_snapshot_dir(data_dir), exist_ok=True)
    filename = f"{snapshot_id}.snap"
    with open(os.path.join(_snapshot_dir(data_dir), filename), "wb") as fh:
        fh.write(body)
        fh.flush()
        os.fsync(fh.fileno())
    info = SnapshotInfo(
        snapshot_id=snapshot_id,
        mode=mode,
        base_snapshot_id=base_snapshot_id,
        upto_seq=upto_seq,
        created_ms=created_ms,
        checksum=checksum,
        filename=filename,
    )
    with open(_manifest_path(data_dir), "a", encoding="ascii") as fh:
        fh.write(json.dumps(info.to_dict(), sort_keys=True, separators=(",", ":")) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    return info


def load_snapshot(data_dir: str, info: SnapshotInfo) -> dict:
    path = os.path.join(_snapshot_dir(data_dir), info.filename)
    try:
        with open(path, "rb") as fh:
            body = fh.read()
    except OSError as exc:
        raise BankError("CORRUPT_SNAPSHOT", f"snapshot {info.snapshot_id} unreadable: {exc}") from exc
    if zlib.crc32(body) & 0xFFFFFFFF != info.checksum:
        raise BankError("CORRUPT_SNAPSHOT", f"snapshot {info.snapshot_id} fails its checksum")
    payload = json.loads(body.decode("ascii"))
    if payload.get("snapshot_id") != info.snapshot_id:
        raise BankError("CORRUPT_SNAPSHOT", f"snapshot {info.snapshot_id} id mismatch")
    return payload


def resolve_chain(infos: list[SnapshotInfo], head: SnapshotInfo) -> list[SnapshotInfo] | None:
    """Chain from the terminating complete snapshot up to head, or None if broken."""
    by_id = {i.snapshot_id: i for i in infos}
    chain = [head]
    node = head
    while node.mode == INCREMENTAL:
        if node.base_snapshot_id is None:
            return None
        node = by_id.get(node.base_snapshot_id)
        if node is None:
            return None
        chain.append(node)
    chain.reverse()
    for earlier, later in zip(chain, chain[1:]):
        if later.upto_seq < earlier.upto_seq:
            return None
    return chain
