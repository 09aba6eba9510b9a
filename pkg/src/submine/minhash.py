"""MinHash scheduling keys.

A task's key is a tuple of minhash signatures of its remote pull set plus
a sequence tie-break.  Tasks with overlapping pull sets agree on each
signature with probability equal to the Jaccard similarity of the sets,
so sorting tasks by key places tasks that want the same vertices next to
each other -- that is the whole locality story of the disk queue.

Tasks with an empty pull set get an all-max sentinel key, which sorts
last; ordering among them falls to the tie-break.
"""

from dataclasses import dataclass

from .graph import MASK64, mix64

DEFAULT_NUM_HASHES = 4
GOLDEN64 = 0x9E3779B97F4A7C15
SENTINEL_SIG = MASK64


def derive_seeds(run_seed: int, ell: int):
    """Derive `ell` signature seeds from one run seed (splitmix stream)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    out = []
    s = run_seed & MASK64
    for _ in range(ell):
        s = (s + GOLDEN64) & MASK64
        out.append(mix64(s))
    return tuple(out)


@dataclass(frozen=True, order=True)
class TaskKey:
    """Total order: signatures lexicographically, then tie-break."""

    sigs: tuple
    tiebreak: int

    @property
    def is_sentinel(self):
        return all(s == SENTINEL_SIG for s in self.sigs)


def minhash_signature(pull_ids, seeds):
    """Signature tuple of a pull set; all-sentinel for the empty set."""
    if not pull_ids:
        return (SENTINEL_SIG,) * len(seeds)
    ids = list(pull_ids)
    return tuple(min(mix64(v ^ s) for v in ids) for s in seeds)


def minhash_key(pull_ids, ell, seeds, tiebreak=0) -> TaskKey:
    """Build a TaskKey; validates that `seeds` matches `ell`."""
    if len(seeds) != ell:
        raise ValueError(f"expected {ell} seeds, got {len(seeds)}")
    return TaskKey(minhash_signature(pull_ids, seeds), tiebreak)
