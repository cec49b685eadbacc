"""Deterministic output files and run manifests.

Every CLI run writes its artifacts plus a ``manifest.json`` recording the
command, the full parameter set and the SHA-256 of each output, so a rerun
with the same arguments can be checked byte for byte.  Numbers are printed
with 17 significant digits and ``-inf`` literally, which makes the CSV
round-trip exact for binary64.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

TOOL_VERSION = "0.1.0"


def format_value(v: float) -> str:
    return f"{float(v):.17g}"


def write_csv(path: Path, header: Iterable[str], rows: Iterable[Iterable[float]]) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def sha256_of(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    parameters: dict
    outputs: dict = field(default_factory=dict)

    def record(self, path: Path) -> None:
        self.outputs[path.name] = sha256_of(path)

    def write(self, out_dir: Path) -> Path:
        payload = {
            "tool": "bicascade",
            "version": TOOL_VERSION,
            "command": self.command,
            "parameters": self.parameters,
            "outputs": self.outputs,
        }
        path = out_dir / "manifest.json"
        write_json(path, payload)
        return path
