"""Server configuration, loaded once at startup from a JSON file.

The BANK_CONFIG environment variable overrides the config path given on
the command line.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .identity import DEFAULT_KDF_ITERATIONS, PasswordPolicy


@dataclass
class ServerConfig:
    listen_port: int = 8433
    data_dir: str = "bankdata"
    idle_timeout_s: int = 300
    max_failed_attempts: int = 3
    min_password_length: int = 8
    require_special: bool = True
    max_age_days: int | None = 90
    tac_ttl_s: int = 300
    kdf_iterations: int = DEFAULT_KDF_ITERATIONS
    backup_interval_s: int = 3600
    backup_complete_every: int = 4
    offsite_target: str | None = None
    admin_username: str = "admin"
    admin_password: str = "ChangeMe!Now1"
    journal_sync: bool = True

    def __post_init__(self):
        positives = {
            "listen_port": self.listen_port,
            "idle_timeout_s": self.idle_timeout_s,
            "max_failed_attempts": self.max_failed_attempts,
            "min_password_length": self.min_password_length,
            "tac_ttl_s": self.tac_ttl_s,
            "kdf_iterations": self.kdf_iterations,
            "backup_interval_s": self.backup_interval_s,
            "backup_complete_every": self.backup_complete_every,
        }
        for name, value in positives.items():
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.max_age_days is not None and self.max_age_days <= 0:
            raise ValueError("max_age_days must be positive or null")

    def password_policy(self) -> PasswordPolicy:
        return PasswordPolicy(
            min_length=self.min_password_length,
            require_special=self.require_special,
            max_age_days=self.max_age_days,
            max_failed_attempts=self.max_failed_attempts,
        )


def resolve_config_path(cli_path: str | None) -> str | None:
    return os.environ.get("BANK_CONFIG") or cli_path


def load_config(path: str | None) -> ServerConfig:
    if path is None:
        return ServerConfig()
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    known = {f for f in ServerConfig.__dataclass_fields__}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ServerConfig(**raw)
