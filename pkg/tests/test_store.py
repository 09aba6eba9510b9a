"""VertexCache: reservation, pinning, LRU eviction, overflow episodes.

The randomized section replays every operation against a simple
dict-based model and checks the residency bound after each step, which
is the property the whole engine leans on.
"""

import random

import pytest

from submine.graph import Vertex
from submine.store import CacheError, VertexCache


def _v(vid):
    return Vertex(vid, None, [])


def _fill(cache, ids):
    assert cache.reserve(ids) == set(ids)
    for vid in ids:
        cache.insert_pulled(_v(vid))
    cache.unpin_batch(ids)


# -- reserve -----------------------------------------------------------------


def test_reserve_all_or_nothing_accept():
    c = VertexCache(10)
    _fill(c, range(3))  # 3 resident, unpinned
    got = c.reserve(range(100, 107))  # 7 new
    assert got == set(range(100, 107))
    assert c.resident == 10


def test_reserve_rejected_when_everything_pinned():
    c = VertexCache(10)
    assert c.reserve(range(10)) == set(range(10))  # 10 pinned placeholders
    assert c.reserve({99}) == set()
    # rejection touched nothing
    assert c.resident == 10
    assert c.pins_of(99) == 0


def test_reserve_evicts_lru_first():
    c = VertexCache(3)
    _fill(c, [1, 2, 3])
    c.get(1)  # refresh 1; LRU order now 2, 3, 1
    assert c.reserve({50, 51}) == {50, 51}
    assert c.has_data(1)
    assert not c.has_data(2) and not c.has_data(3)


def test_reserve_never_evicts_its_own_ids():
    # regression: a full cache asked to re-reserve a resident unpinned id
    # must not pick that id as an eviction victim (it would be double
    # counted and push residency over capacity)
    c = VertexCache(4)
    _fill(c, [1, 2, 3, 4])  # full, all unpinned, LRU order 1 2 3 4
    got = c.reserve({1, 50})  # 1 is resident and oldest
    assert got == {1, 50}
    assert c.resident == 4
    assert c.has_data(1)  # survived, pinned in place
    assert c.pins_of(1) == 1


def test_reserve_feasibility_excludes_own_ids():
    # 2 resident both wanted by the reservation: they are not evictable
    # room for the third id, so the reserve must reject, not half-apply
    c = VertexCache(2)
    _fill(c, [1, 2])
    assert c.reserve({1, 2, 3}) == set()
    assert c.resident == 2
    assert c.pins_of(1) == 0 and c.pins_of(2) == 0


def test_reserve_local_id_is_protocol_error():
    c = VertexCache(4, is_local=lambda vid: vid == 7)
    with pytest.raises(CacheError, match="locally-owned"):
        c.reserve({7})


# -- insert / unpin -----------------------------------------------------------


def test_insert_requires_reservation():
    c = VertexCache(4)
    with pytest.raises(CacheError, match="unreserved"):
        c.insert_pulled(_v(1))


def test_insert_is_idempotent():
    c = VertexCache(4)
    c.reserve({1})
    c.insert_pulled(_v(1))
    c.insert_pulled(_v(1))  # no-op
    assert c.resident == 1
    assert c.get(1, count=False).id == 1


def test_insert_local_id_is_protocol_error():
    c = VertexCache(4, is_local=lambda vid: vid == 3)
    with pytest.raises(CacheError, match="locally-owned"):
        c.insert_pulled(_v(3))


def test_unpin_unpinned_is_protocol_error():
    c = VertexCache(4)
    with pytest.raises(CacheError, match="unpin"):
        c.unpin_batch({5})
    _fill(c, [5])
    with pytest.raises(CacheError, match="unpin"):
        c.unpin_batch({5})  # already back to zero


def test_shared_pin_counts():
    c = VertexCache(1)
    c.reserve({9})
    c.insert_pulled(_v(9))
    c.reserve({9})  # second task pins the same entry
    assert c.pins_of(9) == 2
    c.unpin_batch({9})
    # still pinned by the other task: reserve of a new id must reject
    assert c.reserve({10}) == set()
    c.unpin_batch({9})
    assert c.reserve({10}) == {10}


def test_get_refreshes_and_counts():
    c = VertexCache(4)
    _fill(c, [1, 2])
    h0, m0 = c.hits, c.misses
    assert c.get(1).id == 1
    assert c.get(99) is None
    assert (c.hits, c.misses) == (h0 + 1, m0 + 1)
    # count=False probes silently
    c.get(2, count=False)
    assert (c.hits, c.misses) == (h0 + 1, m0 + 1)


# -- overflow -----------------------------------------------------------------


def test_overflow_episode_roundtrip():
    c = VertexCache(5)
    _fill(c, [1, 2, 3])
    need = list(range(100, 112))  # 12 vertices, way over capacity
    c.enter_overflow(len(need))
    assert c.in_overflow
    assert c.reserve(need) == set(need)
    for vid in need:
        c.insert_pulled(_v(vid))
    assert c.resident >= 12
    c.unpin_batch(need)
    c.exit_overflow()
    assert not c.in_overflow
    assert c.resident <= 5
    assert c.capacity == 5


def test_overflow_exit_without_excess_keeps_entries():
    c = VertexCache(5)
    _fill(c, [1, 2, 3])
    c.enter_overflow(10)
    c.exit_overflow()
    assert c.resident == 3
    assert c.has_data(1) and c.has_data(2) and c.has_data(3)


def test_overflow_misuse():
    c = VertexCache(2)
    c.enter_overflow(3)
    with pytest.raises(CacheError, match="nested"):
        c.enter_overflow(1)
    c.exit_overflow()
    with pytest.raises(CacheError, match="outside"):
        c.exit_overflow()
    with pytest.raises(ValueError):
        c.enter_overflow(-1)


def test_overflow_exit_with_pinned_residue_fails():
    c = VertexCache(2)
    c.enter_overflow(3)
    c.reserve({1, 2, 3, 4})
    for vid in (1, 2, 3, 4):
        c.insert_pulled(_v(vid))
    with pytest.raises(CacheError, match="pinned residue"):
        c.exit_overflow()


# -- quiescence and metrics ---------------------------------------------------


def test_assert_quiescent_failures():
    c = VertexCache(4)
    c.reserve({1})
    with pytest.raises(CacheError, match="leftover pin"):
        c.assert_quiescent()
    c.unpin_batch({1})  # unpinned but never filled
    with pytest.raises(CacheError, match="unfilled"):
        c.assert_quiescent()
    c.insert_pulled(_v(1))
    c.assert_quiescent()
    c.enter_overflow(2)
    with pytest.raises(CacheError, match="inside an overflow"):
        c.assert_quiescent()
    c.exit_overflow()
    c.assert_quiescent()


def test_metrics_shape():
    c = VertexCache(4)
    _fill(c, [1, 2])
    c.get(1)
    m = c.metrics()
    assert m["cache_hits"] >= 1
    assert m["cache_misses"] >= 2
    assert m["cache_peak_residency"] == 2
    assert m["cache_evictions"] == 0


def test_capacity_validation():
    with pytest.raises(ValueError):
        VertexCache(0)


# -- randomized model check ----------------------------------------------------


def test_randomized_against_model():
    """Random reserve/fill/unpin/overflow traffic, checked step by step."""
    rng = random.Random(1234)
    for trial in range(30):
        cap = rng.randint(1, 8)
        c = VertexCache(cap, trace=None)
        pinned_sets = []  # reserved batches not yet released
        in_overflow = False
        limit = cap
        for _ in range(300):
            op = rng.random()
            if op < 0.45:
                size = rng.randint(1, min(6, max(1, limit)))
                ids = set(rng.sample(range(40), size))
                if in_overflow or not pinned_sets or rng.random() < 0.8:
                    got = c.reserve(ids)
                    assert got in (set(), ids)
                    if got:
                        for vid in got:
                            c.insert_pulled(_v(vid))
                        pinned_sets.append(got)
            elif op < 0.8 and pinned_sets:
                batch = pinned_sets.pop(rng.randrange(len(pinned_sets)))
                c.unpin_batch(batch)
            elif op < 0.9 and not in_overflow and not pinned_sets:
                extra = rng.randint(1, 12)
                c.enter_overflow(extra)
                in_overflow = True
                limit = cap + extra
            elif in_overflow and not pinned_sets:
                c.exit_overflow()
                in_overflow = False
                limit = cap
            assert c.resident <= limit, (trial, c.resident, limit)
            assert c.total_pins() == sum(len(s) for s in pinned_sets)
        for batch in pinned_sets:
            c.unpin_batch(batch)
        if in_overflow:
            c.exit_overflow()
        c.assert_quiescent()
