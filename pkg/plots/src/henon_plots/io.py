"""Readers for the henon CLI's CSV/JSON artifacts.

Files are self-describing: CSV artifacts start with ``#`` comment lines
carrying ``schema_version``, ``kind`` and scalar metadata, followed by a
column-name header row; JSON artifacts carry ``schema_version`` and
``kind`` keys.  Readers validate the version and the expected kind and
never recompute any numerics.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1"


class SchemaMismatchError(ValueError):
    """Input file is missing the schema version or carries the wrong one."""


class MissingColumnsError(ValueError):
    """Input file lacks columns the figure needs."""


def read_table(path, expected_kind: str | None = None):
    """Parse a schema-tagged CSV into (meta, columns).

    ``meta`` maps the ``#`` header keys to strings; ``columns`` maps column
    names to float arrays.
    """
    meta = {}
    header = None
    rows = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
        elif header is None:
            header = [c.strip() for c in line.split(",")]
        elif line.strip():
            rows.append([float(x) for x in line.split(",")])
    if meta.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"{path}: schema_version {meta.get('schema_version')!r}, "
            f"expected {SCHEMA_VERSION!r}"
        )
    if expected_kind is not None and meta.get("kind") != expected_kind:
        raise SchemaMismatchError(
            f"{path}: kind {meta.get('kind')!r}, expected {expected_kind!r}"
        )
    if header is None or not rows:
        raise MissingColumnsError(f"{path}: no tabular data found")
    data = np.asarray(rows, dtype=float)
    return meta, {name: data[:, j] for j, name in enumerate(header)}


def read_document(path, expected_kind: str | None = None) -> dict:
    doc = json.loads(Path(path).read_text())
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"{path}: schema_version {doc.get('schema_version')!r}, "
            f"expected {SCHEMA_VERSION!r}"
        )
    if expected_kind is not None and doc.get("kind") != expected_kind:
        raise SchemaMismatchError(
            f"{path}: kind {doc.get('kind')!r}, expected {expected_kind!r}"
        )
    return doc


def file_kind(path) -> str:
    """Peek at a file's self-declared kind (CSV comment or JSON key)."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return json.loads(text).get("kind", "")
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            if key.strip() == "kind":
                return value.strip()
        else:
            break
    return ""


def require_columns(columns: dict, names, path="input") -> None:
    missing = [n for n in names if n not in columns]
    if missing:
        raise MissingColumnsError(f"{path}: missing columns {missing}")
