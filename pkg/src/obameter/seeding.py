"""Deterministic seed derivation.

One master seed per experiment fans out into independent substream seeds,
one per labeled purpose (world build, each session, each tag source). The
derivation is a keyed blake2b digest, so it is stable across processes and
Python versions and never depends on PYTHONHASHSEED.
"""

from __future__ import annotations

import hashlib

_SEED_BYTES = 8


def derive_seed(master: int, *labels: str) -> int:
    """Derive a 64-bit substream seed from a master seed and labels.

    Same master and labels always give the same value. Distinct label
    tuples give independent streams for all practical purposes.
    """
    key = (master & 0xFFFFFFFFFFFFFFFF).to_bytes(_SEED_BYTES, "little")
    h = hashlib.blake2b(digest_size=_SEED_BYTES, key=key)
    h.update("\x1f".join(labels).encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def hash_uniform(master: int, *labels: str) -> float:
    """Deterministic uniform in [0, 1) keyed by seed and labels.

    Used to couple random decisions across parameter sweeps: a decision
    taken as `hash_uniform(...) < rate` flips in one direction only as the
    rate grows, which makes rate sweeps monotone by construction.
    """
    return derive_seed(master, *labels) / 2.0**64
