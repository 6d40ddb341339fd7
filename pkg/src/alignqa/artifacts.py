"""On-disk artifact helpers: canonical JSON, atomic writes, JSONL, manifests.

Every pipeline output is written atomically (temp file + rename) and is
byte-deterministic: keys are sorted, no timestamps, record order follows
input order. Each output gets a sibling ``<stem>.manifest.json`` recording
input hashes, seeds, backend identifiers, and config, so a run can be
audited and reproduced exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import SchemaViolation


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: Path, obj: Any) -> None:
    atomic_write_text(path, canonical_json(obj) + "\n")


def write_jsonl(path: Path, records: Iterable[Any]) -> int:
    lines = [canonical_json(r) for r in records]
    atomic_write_text(path, "".join(line + "\n" for line in lines))
    return len(lines)


def read_jsonl(path: Path) -> Iterator[dict]:
    """Yield one object per non-empty line; malformed lines are data errors."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"{path}: line {lineno}: {exc}") from exc


def read_json(path: Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def audit_path(out_path: Path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.stem + ".audit.jsonl")


def manifest_path(out_path: Path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.stem + ".manifest.json")


def write_manifest(
    out_path: Path,
    subcommand: str,
    inputs: dict[str, str | os.PathLike],
    config: dict[str, Any],
    counts: dict[str, int],
    backends: dict[str, str] | None = None,
    seed: int | None = None,
) -> Path:
    """Record everything needed to reproduce ``out_path`` byte-for-byte."""
    manifest = {
        "tool": "alignqa",
        "subcommand": subcommand,
        "inputs": {name: {"path": str(p), "sha256": sha256_file(Path(p))} for name, p in inputs.items()},
        "config": config,
        "counts": counts,
        "backends": backends or {},
        "seed": seed,
    }
    path = manifest_path(out_path)
    write_json(path, manifest)
    return path
