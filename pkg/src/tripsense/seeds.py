"""Deterministic RNG derivation.

Every random choice in the toolkit flows from one top-level seed. Parallel
units (forest trees, generated trips, CV folds) get their own generator
derived from (seed, unit index) so that serial and parallel execution
produce identical results.
"""

import hashlib

import numpy as np


def _to_entropy(part) -> int:
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big")
    return int(part) % 2**63


def rng_for(*parts) -> np.random.Generator:
    """Generator seeded from an ordered tuple of ints and/or tag strings."""
    if not parts:
        raise ValueError("at least one seed part required")
    return np.random.default_rng(np.random.SeedSequence([_to_entropy(p) for p in parts]))
