"""Seed derivation.

All randomness in the package flows from one integer seed.  A stream for a
particular consumer is obtained by hashing the seed together with a path of
names/indices::

    derive_seed(7, "augmenter", "pos", 12)
        == int.from_bytes(sha256(b"7/augmenter/pos/12").digest()[:8], "big")

so streams are independent of the order in which they are requested and can
be created in parallel workers.
"""
import hashlib
import random


def derive_seed(seed, *path):
    key = "/".join(str(p) for p in (seed, *path)).encode("utf-8")
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")


def derive_rng(seed, *path):
    """Return a ``random.Random`` seeded from ``seed`` and ``path``."""
    return random.Random(derive_seed(seed, *path))
