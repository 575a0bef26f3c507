"""Deterministic seed derivation.

Child seeds are derived by hashing, never by Python's built-in hash,
so runs reproduce across processes and platforms.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *parts) -> int:
    text = str(int(master)) + "".join(f"|{p}" for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def trial_seed(master: int, trial: int) -> int:
    """Per-trial seed: master xor trial index."""
    return int(master) ^ int(trial)
