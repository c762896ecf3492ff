"""Append-only event journal.

Every state-mutating command is serialized canonically and appended here
before it is applied, so the journal is the single durable source of
truth. Record layout (all little-endian):

    u64 seq | u64 unix-millis | u32 payload-length | payload | u32 crc

The CRC covers the whole record up to itself (seq, timestamp, length and
payload), so a single flipped bit anywhere in a record is detected.
Payloads are canonical JSON: sorted keys, no whitespace, ASCII only,
newline-free - byte-stable across runs for identical events.

Failure policy on read: a torn or checksum-failing FINAL record is an
expected crash artifact and is discarded with a warning; a corrupt record
with intact records after it means data loss mid-stream and aborts with
CORRUPT_JOURNAL.
"""

from __future__ import annotations

import json
import os
import struct
import zlib
from dataclasses import dataclass, field

from .errors import BankError

_HEADER = struct.Struct("<QQI")  # seq, ts_ms, payload_len
_CRC = struct.Struct("<I")
HEADER_SIZE = _HEADER.size
CRC_SIZE = _CRC.size
MAX_PAYLOAD = 16 * 1024 * 1024

JOURNAL_FILE = "journal.log"


def encode_event(event: dict) -> bytes:
    return json.dumps(event, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("ascii")


def encode_record(seq: int, ts_ms: int, payload: bytes) -> bytes:
    head = _HEADER.pack(seq, ts_ms, len(payload))
    crc = zlib.crc32(head + payload) & 0xFFFFFFFF
    return head + payload + _CRC.pack(crc)


@dataclass
class ScanReport:
    """Outcome of reading a journal file."""

    records: int = 0
    first_seq: int = 0
    last_seq: int = 0
    discarded_tail: int = 0
    valid_bytes: int = 0
    warnings: list = field(default_factory=list)


def _try_parse(buf: bytes, offset: int):
    """Parse one record at offset. Returns (seq, ts, payload, end) or an error tag."""
    if offset + HEADER_SIZE > len(buf):
        return "short"
    seq, ts_ms, length = _HEADER.unpack_from(buf, offset)
    if length > MAX_PAYLOAD:
        return "short"
    end = offset + HEADER_SIZE + length + CRC_SIZE
    if end > len(buf):
        return "short"
    payload = buf[offset + HEADER_SIZE : offset + HEADER_SIZE + length]
    (crc,) = _CRC.unpack_from(buf, offset + HEADER_SIZE + length)
    if zlib.crc32(buf[offset : offset + HEADER_SIZE + length]) & 0xFFFFFFFF != crc:
        return "badsum"
    return seq, ts_ms, payload, end


def _intact_record_after(buf: bytes, start: int, min_seq: int) -> bool:
    """True if any well-formed record with a plausible seq exists at or past start.

    Distinguishes a torn tail (nothing valid follows) from mid-stream
    corruption (later records are still intact).
    """
    limit = len(buf) - HEADER_SIZE - CRC_SIZE
    for pos in range(start, limit + 1):
        parsed = _try_parse(buf, pos)
        if isinstance(parsed, tuple):
            seq = parsed[0]
            if min_seq < seq <= min_seq + len(buf):
                return True
    return False


def read_journal(path: str) -> tuple[list[tuple[int, int, dict]], ScanReport]:
    """Read all valid records from a journal file.

    Returns (records, report) where records are (seq, ts_ms, event) tuples.
    Raises CORRUPT_JOURNAL on mid-stream corruption or a sequence gap.
    """
    report = ScanReport()
    if not os.path.exists(path):
        return [], report
    with open(path, "rb") as fh:
        buf = fh.read()

    records: list[tuple[int, int, dict]] = []
    offset = 0
    expected = None  # first record fixes the starting seq (prefix may be archived)
    while offset < len(buf):
        parsed = _try_parse(buf, offset)
        if isinstance(parsed, tuple):
            seq, ts_ms, payload, end = parsed
            if expected is not None and seq != expected:
                # an intact record with the wrong seq means records vanished
                # mid-stream; crashes only ever tear the tail
                raise BankError(
                    "CORRUPT_JOURNAL",
                    f"sequence gap at byte {offset}: expected {expected}, found {seq}",
                )
        else:
            if _intact_record_after(buf, offset + 1, expected or 0):
                raise BankError(
                    "CORRUPT_JOURNAL",
                    f"corrupt record at byte {offset} with intact records after it",
                )
            report.discarded_tail = 1
            report.warnings.append(f"discarded torn tail at byte {offset}")
            break
        try:
            event = json.loads(payload.decode("ascii"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise BankError("CORRUPT_JOURNAL", f"undecodable payload at seq {seq}") from exc
        records.append((seq, ts_ms, event))
        offset = end
        expected = seq + 1

    report.records = len(records)
    report.valid_bytes = offset if report.discarded_tail else len(buf)
    if records:
        report.first_seq = records[0][0]
        report.last_seq = records[-1][0]
    return records, report


class MemoryJournal:
    """Journal contract without the disk: for tests and throwaway banks."""

    def __init__(self):
        self.records: list[tuple[int, int, dict]] = []
        self.fail_writes = False

    @property
    def last_seq(self) -> int:
        return len(self.records)

    @property
    def healthy(self) -> bool:
        return not self.fail_writes

    def append(self, event: dict, ts_ms: int) -> int:
        if self.fail_writes:
            raise BankError("STORAGE_FAILURE", "journal write failed (injected)")
        # round-trip through the canonical encoding so stored events are
        # exactly what a file journal would replay
        event = json.loads(encode_event(event))
        seq = len(self.records) + 1
        self.records.append((seq, ts_ms, event))
        return seq

    def events(self) -> list[dict]:
        return [event for _seq, _ts, event in self.records]

    def close(self) -> None:
        pass


class Journal:
    """Single-writer append handle over a journal file.

    append() is acknowledge-after-flush: the record is flushed (and
    fsynced when sync=True) before the sequence number is returned, so an
    acknowledged event survives a crash.
    """

    def __init__(self, path: str, *, sync: bool = True):
        self.path = path
        self.sync = sync
        self.fail_writes = False  # test hook: simulate a full/failed disk
        self._healthy = True
        records, report = read_journal(path)
        if report.discarded_tail:
            # repair: drop the torn tail so new records append cleanly
            with open(path, "rb+") as fh:
                fh.truncate(report.valid_bytes)
        self._next_seq = (records[-1][0] + 1) if records else 1
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        self._fh = open(path, "ab")

    @property
    def last_seq(self) -> int:
        return self._next_seq - 1

    @property
    def healthy(self) -> bool:
        return self._healthy and not self.fail_writes

    def append(self, event: dict, ts_ms: int) -> int:
        if self.fail_writes:
            raise BankError("STORAGE_FAILURE", "journal write failed (injected)")
        if not self._healthy:
            raise BankError("STORAGE_FAILURE", "journal in failed state; recover first")
        record = encode_record(self._next_seq, ts_ms, encode_event(event))
        try:
            self._fh.write(record)
            self._fh.flush()
            if self.sync:
                os.fsync(self._fh.fileno())
        except OSError as exc:
            self._healthy = False
            raise BankError("STORAGE_FAILURE", f"journal write failed: {exc}") from exc
        seq = self._next_seq
        self._next_seq += 1
        return seq

    def close(self) -> None:
        try:
            self._fh.close()
        except OSError:
            pass
