"""Run manifests: reproducibility records written next to every artifact.

A manifest captures the exact argv, the config echo, the seed, and sha256
hashes of all inputs and outputs, so `actlex rerun --manifest <file>` can
re-execute the command and verify the outputs come out byte-identical.
All artifact writes go through atomic temp-and-rename.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def atomic_write_bytes(path: str | Path, data: bytes):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path: str | Path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


class RunManifest:
    def __init__(self, command: str, argv: list[str], seed: int | None,
                 config: dict | None = None):
        self.doc = {
            "tool": "actlex",
            "tool_version": _tool_version(),
            "command": command,
            "argv": list(argv),
            "seed": seed,
            "config": config or {},
            "inputs": {},
            "outputs": {},
        }

    def add_input(self, path: str | Path):
        self.doc["inputs"][str(path)] = sha256_file(path)

    def write_output(self, path: str | Path, data: bytes | str):
        if isinstance(data, str):
            data = data.encode("utf-8")
        atomic_write_bytes(path, data)
        self.doc["outputs"][str(path)] = hashlib.sha256(data).hexdigest()

    def save(self, path: str | Path):
        atomic_write_text(path, json.dumps(self.doc, indent=1, sort_keys=True) + "\n")

    @staticmethod
    def path_for(primary_output: str | Path) -> Path:
        return Path(str(primary_output) + ".manifest.json")


def load_manifest(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _tool_version() -> str:
    from . import __version__

    return __version__
