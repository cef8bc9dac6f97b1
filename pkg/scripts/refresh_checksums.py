#!/usr/bin/env python3
"""Regenerate the pinned SHA-256 checksums for the bundled data files.

Run after any deliberate data-file change, together with an entry in
data/CHANGELOG.md describing the change.
"""

import hashlib
import json
import pathlib

DATA = pathlib.Path(__file__).resolve().parent.parent / "src" / "coho" / "data"


def main() -> None:
    pins = {}
    for path in sorted(DATA.iterdir()):
        if path.name in {"checksums.json", "CHANGELOG.md"} or path.is_dir():
            continue
        pins[path.name] = hashlib.sha256(path.read_bytes()).hexdigest()
    out = DATA / "checksums.json"
    out.write_text(json.dumps(pins, indent=2) + "\n")
    print(f"pinned {len(pins)} files into {out}")


if __name__ == "__main__":
    main()
