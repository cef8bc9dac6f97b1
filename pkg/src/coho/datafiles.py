"""Access to the bundled data files, verified against content hashes.

Every transcribed table (relations, restriction tables, series rows,
Steenrod identities, representation matrices, subgroup words) ships as a
data file in ``coho/data``; ``checksums.json`` pins the SHA-256 of each.
A fix to a table is a data change: edit the file, append to
``data/CHANGELOG.md`` and refresh the checksums.  Loading fails loudly on
any mismatch so a silent local edit cannot skew a verification run.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources


class DataIntegrityError(Exception):
    """A bundled data file is missing or does not match its pinned hash."""


def _data_root():
    return resources.files("coho").joinpath("data")


def read_bytes(name: str) -> bytes:
    path = _data_root().joinpath(name)
    try:
        return path.read_bytes()
    except FileNotFoundError:
        raise DataIntegrityError(f"data file {name!r} is missing")


def sha256(name: str) -> str:
    return hashlib.sha256(read_bytes(name)).hexdigest()


def pinned_hashes() -> dict:
    return json.loads(read_bytes("checksums.json"))


def verify(name: str) -> str:
    """Check one file against its pinned hash; returns the hash."""
    pins = pinned_hashes()
    if name not in pins:
        raise DataIntegrityError(f"data file {name!r} has no pinned checksum")
    digest = sha256(name)
    if digest != pins[name]:
        raise DataIntegrityError(
            f"data file {name!r} hash mismatch: {digest} != pinned {pins[name]}"
        )
    return digest


def verify_all() -> dict:
    """Check every pinned file; returns {name: hash} for report embedding."""
    return {name: verify(name) for name in sorted(pinned_hashes())}


def load_text(name: str, check: bool = True) -> str:
    if check:
        verify(name)
    return read_bytes(name).decode("utf-8")


def load_json(name: str, check: bool = True):
    return json.loads(load_text(name, check=check))
