"""Stream-seed derivation.

Every random stream in the engine (per-agent proposal streams, per-round
pairing permutations) is derived from the master seed and a label, so adding
or removing one stream never reshuffles the others.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, label: object) -> int:
    """Stable 64-bit seed for the stream named ``label`` under ``master``."""
    digest = hashlib.sha256(f"{master}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
