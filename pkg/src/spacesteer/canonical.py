"""Canonical JSON and digest helpers.

Digests must be stable across processes and platforms, so everything that is
hashed goes through one serializer: compact separators, sorted keys, raw
unicode (no \\uXXXX escapes).
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_json(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def digest_of(value: Any) -> str:
    return sha256_hex(canonical_json(value))
