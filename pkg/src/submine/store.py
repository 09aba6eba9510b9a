"""Per-worker vertex storage: the read-only local table plus a bounded
LRU cache of vertices pulled from other workers.

The cache is the memory guarantee of the whole engine: outside explicit
overflow episodes its residency (filled entries plus reserved slots)
never exceeds capacity.  Entries a running batch depends on are pinned
and cannot be evicted; reservation is all-or-nothing per task so a task
either gets every remote vertex it needs held down for the round or
touches nothing.

A single oversized task (pull set larger than the whole cache) is handled
by an overflow episode: capacity is raised just for that task and the
cache is shrunk back by LRU eviction immediately after.
"""

import threading
from collections import OrderedDict


class CacheError(RuntimeError):
    """Protocol misuse: bad insert, unpin without pin, nested overflow."""


class _Entry:
    __slots__ = ("vertex", "pins")

    def __init__(self, vertex=None, pins=0):
        self.vertex = vertex
        self.pins = pins

    @property
    def filled(self):
        return self.vertex is not None


class VertexCache:
    """Bounded LRU map id -> pulled Vertex, with pin counts.

    Safe under one writer (the pull-response path) and one reader (the
    compute path) interleaving; all map mutations happen under a lock.
    Metrics: hits/misses are counted at reservation and ad-hoc lookup
    time, a miss meaning "slot reserved, vertex must be fetched".
    """

    def __init__(self, capacity, is_local=None, trace=None):
        if capacity < 1:
            raise ValueError("cache capacity must be >= 1")
        self.capacity = capacity
        self._base_capacity = capacity
        self._is_local = is_local or (lambda vid: False)
        self._entries = OrderedDict()
        self._lock = threading.Lock()
        self._overflow = False
        self.trace = trace
        self.hits = 0
        self.misses = 0
        self.evictions = 0
        self.peak_residency = 0

    # -- introspection ----------------------------------------------------

    @property
    def resident(self):
        return len(self._entries)

    @property
    def in_overflow(self):
        return self._overflow

    def has_data(self, vid):
        e = self._entries.get(vid)
        return e is not None and e.filled

    def pins_of(self, vid):
        e = self._entries.get(vid)
        return e.pins if e else 0

    def total_pins(self):
        return sum(e.pins for e in self._entries.values())

    # -- core ops ----------------------------------------------------------

    def get(self, vid, count=True):
        """Cached vertex or None; a filled hit refreshes recency."""
        with self._lock:
            e = self._entries.get(vid)
            if e is None or not e.filled:
                if count:
                    self.misses += 1
                return None
            self._entries.move_to_end(vid)
            if count:
                self.hits += 1
            return e.vertex

    def reserve(self, ids):
        """All-or-nothing reservation of every id in `ids`.

        Cached ids are pinned where they sit; missing ids get a pinned
        placeholder slot each, evicting unpinned entries (LRU first) to
        make room.  Returns the set of reserved ids -- equal to `ids` on
        success, empty on rejection (in which case nothing was touched).
        """
        ids = set(ids)
        for vid in ids:
            if self._is_local(vid):
                raise CacheError(f"reserve of locally-owned vertex {vid}")
        with self._lock:
            new = [vid for vid in ids if vid not in self._entries]
            free = self.capacity - len(self._entries)
            if len(new) > free:
                # Resident members of `ids` must not be counted as victims:
                # evicting one would force a second slot for it right below.
                evictable = sum(
                    1
                    for vid, e in self._entries.items()
                    if e.pins == 0 and e.filled and vid not in ids
                )
                if len(new) > free + evictable:
                    return set()
                self._evict_locked(len(new) - free, protect=ids)
            for vid in ids:
                e = self._entries.get(vid)
                if e is not None:
                    e.pins += 1
                    self._entries.move_to_end(vid)
                    self.hits += 1
                else:
                    self._entries[vid] = _Entry(vertex=None, pins=1)
                    self.misses += 1
                    if self.trace:
                        self.trace(("cache_slot", vid))
            self._note_peak()
            return ids

    def insert_pulled(self, v):
        """Fill the reserved slot for v.id with the pulled vertex.

        Double insert of the same id is an idempotent no-op.  Inserting
        without a reservation, or inserting a locally-owned id, is a
        protocol error.
        """
        if self._is_local(v.id):
            raise CacheError(f"insert of locally-owned vertex {v.id}")
        with self._lock:
            e = self._entries.get(v.id)
            if e is None:
                raise CacheError(f"insert of unreserved vertex {v.id}")
            if e.filled:
                return
            e.vertex = v
            self._entries.move_to_end(v.id)
            if self.trace:
                self.trace(("cache_fill", v.id))

    def unpin_batch(self, ids):
        with self._lock:
            for vid in set(ids):
                e = self._entries.get(vid)
                if e is None or e.pins <= 0:
                    raise CacheError(f"unpin of unpinned vertex {vid}")
                e.pins -= 1

    # -- overflow episodes ---------------------------------------------------

    def enter_overflow(self, extra):
        """Temporarily raise capacity by `extra` for one oversized task."""
        if extra < 0:
            raise ValueError("extra must be >= 0")
        with self._lock:
            if self._overflow:
                raise CacheError("nested overflow episode")
            self._overflow = True
            self.capacity = self._base_capacity + extra
            if self.trace:
                self.trace(("overflow_enter", extra))

    def exit_overflow(self):
        """Restore capacity, evicting unpinned LRU entries to fit."""
        with self._lock:
            if not self._overflow:
                raise CacheError("exit_overflow outside an episode")
            self.capacity = self._base_capacity
            over = len(self._entries) - self.capacity
            if over > 0:
                try:
                    self._evict_locked(over)
                except CacheError:
                    raise CacheError(
                        "cannot restore capacity: pinned residue "
                        f"{len(self._entries)} > {self.capacity}"
                    ) from None
            self._overflow = False
            if self.trace:
                self.trace(("overflow_exit",))

    # -- internals -----------------------------------------------------------

    def _evict_locked(self, count, protect=()):
        victims = []
        for vid, e in self._entries.items():
            if count <= 0:
                break
            if e.pins == 0 and e.filled and vid not in protect:
                victims.append(vid)
                count -= 1
        if count > 0:
            raise CacheError("not enough evictable entries")
        for vid in victims:
            del self._entries[vid]
            self.evictions += 1
            if self.trace:
                self.trace(("cache_evict", vid))

    def _note_peak(self):
        if len(self._entries) > self.peak_residency:
            self.peak_residency = len(self._entries)

    def assert_quiescent(self):
        """End-of-job check: no pins, no unfilled slots, within capacity."""
        with self._lock:
            for vid, e in self._entries.items():
                if e.pins:
                    raise CacheError(f"leftover pin on vertex {vid}")
                if not e.filled:
                    raise CacheError(f"leftover unfilled slot for vertex {vid}")
            if self._overflow:
                raise CacheError("job ended inside an overflow episode")
            if len(self._entries) > self.capacity:
                raise CacheError("residency above capacity at job end")

    def metrics(self):
        return {
            "cache_hits": self.hits,
            "cache_misses": self.misses,
            "cache_evictions": self.evictions,
            "cache_peak_residency": self.peak_residency,
        }


class VertexStore:
    """A worker's view of vertex data: local table first, then cache."""

    def __init__(self, local_table, cache):
        self.local = local_table
        self.cache = cache

    def lookup(self, vid, count=True):
        """Vertex by id or None; cache hits refresh recency."""
        v = self.local.get(vid)
        if v is not None:
            return v
        return self.cache.get(vid, count=count)

    def resolve(self, vid):
        """Like lookup but a miss is a hard error (used for frontiers,
        whose ids are guaranteed resident by reservation)."""
        v = self.local.get(vid)
        if v is not None:
            return v
        v = self.cache.get(vid, count=False)
        if v is None:
            raise CacheError(f"frontier vertex {vid} not resident")
        return v

    def is_local(self, vid):
        return vid in self.local
