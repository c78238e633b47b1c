"""Run manifests and input checksums.

Every CLI run writes a manifest recording what was executed against which
inputs; deterministic output files embed the input checksum chain and
reference the manifest by name, so volatile details (wall time, worker
count) never leak into files that must be byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return f"sha256:{h.hexdigest()}"


@dataclass
class RunManifest:
    command: str
    config: dict
    input_checksums: dict[str, str]
    seed: int | None = None
    tool_version: str = ""
    wall_time_s: float | None = None
    workers: int | None = None
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "format": "benchsel-manifest/1",
            "command": self.command,
            "config": self.config,
            "input_checksums": self.input_checksums,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "wall_time_s": self.wall_time_s,
            "workers": self.workers,
            "notes": self.notes,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def checksum_chain(checksums: dict[str, str]) -> str:
    """One-line rendering of the input checksum chain for embedding in
    deterministic output files."""
    return " -> ".join(f"{k}={v}" for k, v in checksums.items())
