"""Provenance manifests for emitted reports.

Every report records the tool version, the exact command, hashes of its
inputs, and a flag asserting the pipeline is free of random number use.
JSON reports embed the manifest under a "manifest" key; CSV and JSON-lines
outputs get a sidecar file next to them, since their formats have no room
for nesting.
"""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__


def hash_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_manifest(
    command: Sequence[str],
    inputs: Mapping[str, str | Path],
    config_path: str | Path | None = None,
    notes: Sequence[str] = (),
) -> dict:
    """Describe one run: tool, command, input hashes, and notes."""
    return {
        "tool": "smelloc",
        "version": __version__,
        "command": list(command),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "inputs": {
            name: {"path": str(path), "sha256": hash_file(path)}
            for name, path in inputs.items()
        },
        "config_hash": hash_file(config_path) if config_path else None,
        "random_free": True,
        "notes": list(notes),
    }


def write_json_report(payload: dict, path: str | Path, manifest: dict) -> None:
    """Write a JSON report with the manifest embedded."""
    document = dict(payload)
    document["manifest"] = manifest
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2, allow_nan=False)
        fh.write("\n")


def sidecar_path(path: str | Path) -> Path:
    return Path(f"{path}.manifest.json")


def write_sidecar_manifest(path: str | Path, manifest: dict) -> None:
    """Write the manifest next to a CSV or JSON-lines report."""
    with open(sidecar_path(path), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
