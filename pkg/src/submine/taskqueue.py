"""Disk-spilling task queues.

Both queue kinds buffer tasks in memory and spill to files holding on the
order of `file_capacity` (C) tasks, so disk traffic happens in C-task
units rather than per task:

* StreamTaskQueue -- plain FIFO.  Overflowing tasks spill to files of
  exactly C tasks, consumed oldest-first (head reads, tail appends only).

* LshTaskQueue -- tasks are kept sorted by their minhash TaskKey.  Spill
  files each hold between ceil(C/2) and C tasks and own disjoint key
  ranges, tracked by an in-memory range index ordered ascending.  An
  overflowing input buffer is sorted and bulk-merged into the chain
  b-tree style: only files whose range absorbs incoming keys are read,
  merged, and rewritten, splitting into balanced chunks on overflow.

Fetching refills the C-sized output buffer from the first (lowest-range)
file if one exists, else from the in-memory input buffer; consumed files
are deleted.  io counters track file-granularity reads and writes for
both kinds and always match what an external filesystem observer sees.
"""

import heapq
import os
from bisect import bisect_right
from collections import deque
from typing import NamedTuple

from .minhash import TaskKey
from .serialize import decode_file, encode_file


class QueueInvariantError(RuntimeError):
    pass


class TaskRecord(NamedTuple):
    key: TaskKey
    payload: bytes


class FileMeta(NamedTuple):
    name: str
    count: int
    key_lo: TaskKey
    key_hi: TaskKey


class QueueStorage:
    """File IO for spill files, counting file-granularity reads/writes.

    Diagnostic reads (invariant scans) pass count=False so the counters
    keep matching the real consume/spill traffic.
    """

    def __init__(self, dirpath):
        self.dir = dirpath
        os.makedirs(dirpath, exist_ok=True)
        self.files_read = 0
        self.files_written = 0

    def write(self, name, data):
        with open(os.path.join(self.dir, name), "wb") as fh:
            fh.write(data)
        self.files_written += 1

    def read(self, name, count=True):
        with open(os.path.join(self.dir, name), "rb") as fh:
            data = fh.read()
        if count:
            self.files_read += 1
        return data

    def delete(self, name):
        os.unlink(os.path.join(self.dir, name))

    def listdir(self):
        return sorted(os.listdir(self.dir))


def _rkey(rec):
    return rec.key


class _TaskQueueBase:
    kind = "?"

    def __init__(self, dirpath, file_capacity=100, buffer_capacity=1000,
                 ell=4, storage=None):
        if file_capacity < 2:
            raise ValueError("file_capacity must be >= 2")
        if buffer_capacity < 1:
            raise ValueError("buffer_capacity must be >= 1")
        self.file_capacity = file_capacity
        self.buffer_capacity = buffer_capacity
        self.ell = ell
        self.storage = storage or QueueStorage(dirpath)
        self.enqueued_total = 0
        self.fetched_total = 0
        self.spill_count = 0
        self._file_seq = 0

    def io_counters(self):
        return (self.storage.files_read, self.storage.files_written)

    def _next_name(self):
        self._file_seq += 1
        return f"f{self._file_seq:08d}.tasks"

    def _write_records(self, records):
        name = self._next_name()
        self.storage.write(name, encode_file(self.file_capacity, self.ell, records))
        return FileMeta(name, len(records), records[0].key, records[-1].key)

    def _load(self, meta, count=True, delete=True):
        data = self.storage.read(meta.name, count=count)
        _, _, raw = decode_file(data)
        if len(raw) != meta.count:
            raise QueueInvariantError(
                f"{meta.name}: holds {len(raw)} records, index says {meta.count}"
            )
        if delete:
            self.storage.delete(meta.name)
        return [TaskRecord(k, p) for k, p in raw]

    def metrics(self):
        r, w = self.io_counters()
        return {
            "queue_enqueued": self.enqueued_total,
            "queue_fetched": self.fetched_total,
            "queue_spills": self.spill_count,
            "queue_file_reads": r,
            "queue_file_writes": w,
        }


class StreamTaskQueue(_TaskQueueBase):
    """FIFO task queue: head reads, tail appends, files of exactly C."""

    kind = "stream"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._head = deque()
        self._files = deque()
        self._tail = deque()

    def __len__(self):
        return (
            len(self._head)
            + sum(m.count for m in self._files)
            + len(self._tail)
        )

    def enqueue(self, rec: TaskRecord):
        self._tail.append(rec)
        self.enqueued_total += 1
        if len(self._tail) >= self.buffer_capacity:
            self._spill_tail()

    def seed_bulk(self, records):
        """Initial seeding: plain FIFO appends in the given order."""
        for rec in records:
            self.enqueue(rec)

    def fetch(self):
        if not self._head:
            if self._files:
                self._head.extend(self._load(self._files.popleft()))
            elif self._tail:
                for _ in range(min(self.file_capacity, len(self._tail))):
                    self._head.append(self._tail.popleft())
        if not self._head:
            return None
        self.fetched_total += 1
        return self._head.popleft()

    def _spill_tail(self):
        while len(self._tail) >= self.file_capacity:
            chunk = [self._tail.popleft() for _ in range(self.file_capacity)]
            self._files.append(self._write_records(chunk))
            self.spill_count += 1

    def check_invariants(self, deep=False):
        if len(self._tail) > self.buffer_capacity:
            raise QueueInvariantError("tail buffer over capacity")
        if len(self._head) > max(self.file_capacity, self.buffer_capacity):
            raise QueueInvariantError("head buffer over capacity")
        for m in self._files:
            if m.count != self.file_capacity:
                raise QueueInvariantError(f"{m.name}: stream file not full")
        if deep:
            for m in self._files:
                recs = self._load(m, count=False, delete=False)
                if len(recs) != m.count:
                    raise QueueInvariantError(f"{m.name}: bad count on disk")
        if self.enqueued_total != self.fetched_total + len(self):
            raise QueueInvariantError("conservation violated")
        return True


class LshTaskQueue(_TaskQueueBase):
    """Key-sorted task queue with a b-tree-ish file chain."""

    kind = "lsh"

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._bq_in = []
        self._bq_out = deque()
        self._index = []  # FileMeta, ascending disjoint key ranges

    def __len__(self):
        return (
            len(self._bq_in)
            + len(self._bq_out)
            + sum(m.count for m in self._index)
        )

    @property
    def index(self):
        return list(self._index)

    def enqueue(self, rec: TaskRecord):
        self._bq_in.append(rec)
        self.enqueued_total += 1
        if len(self._bq_in) >= self.buffer_capacity:
            self.merge_spill()

    def seed_bulk(self, records):
        """Bulk-load seed tasks: sort once, then either keep them in the
        input buffer (small jobs never touch disk) or write them directly
        as the initial file chain."""
        records = sorted(records, key=_rkey)
        self.enqueued_total += len(records)
        if len(records) <= self.buffer_capacity:
            self._bq_in.extend(records)
        else:
            self._index = self._write_chain(records)
            self.spill_count += 1

    def fetch(self):
        if not self._bq_out:
            if self._index:
                self._bq_out.extend(self._load(self._index.pop(0)))
            elif self._bq_in:
                self._bq_in.sort(key=_rkey)
                take = self._bq_in[:self.file_capacity]
                del self._bq_in[:self.file_capacity]
                self._bq_out.extend(take)
        if not self._bq_out:
            return None
        self.fetched_total += 1
        return self._bq_out.popleft()

    def merge_spill(self):
        """Sort the input buffer and bulk-merge it into the file chain."""
        batch = sorted(self._bq_in, key=_rkey)
        self._bq_in = []
        if not batch:
            return
        self.spill_count += 1
        if not self._index:
            self._index = self._write_chain(batch)
            return
        los = [m.key_lo for m in self._index]
        groups = {}
        for rec in batch:
            i = bisect_right(los, rec.key) - 1
            if i < 0:
                i = 0
            groups.setdefault(i, []).append(rec)
        new_index = []
        prev = 0
        for i in sorted(groups):
            new_index.extend(self._index[prev:i])
            existing = self._load(self._index[i])
            merged = list(heapq.merge(existing, groups[i], key=_rkey))
            new_index.extend(self._write_chain(merged))
            prev = i + 1
        new_index.extend(self._index[prev:])
        self._index = new_index

    def _write_chain(self, records):
        """Write sorted records as balanced files of at most C tasks.

        With k = ceil(n / C) files the balanced sizes stay >= ceil(C/2)
        whenever k > 1, so splits never create underfull files; a single
        file may be underfull only when the records themselves number
        fewer than ceil(C/2).
        """
        n = len(records)
        k = -(-n // self.file_capacity)
        metas = []
        base, extra = divmod(n, k)
        off = 0
        for j in range(k):
            size = base + (1 if j < extra else 0)
            metas.append(self._write_records(records[off:off + size]))
            off += size
        return metas

    def check_invariants(self, deep=False):
        if len(self._bq_in) > self.buffer_capacity:
            raise QueueInvariantError("input buffer over capacity")
        if len(self._bq_out) > self.file_capacity:
            raise QueueInvariantError("output buffer over capacity")
        half = -(-self.file_capacity // 2)
        for pos, m in enumerate(self._index):
            if m.count > self.file_capacity:
                raise QueueInvariantError(f"{m.name}: overfull ({m.count})")
            if m.count < half and len(self._index) > 1:
                raise QueueInvariantError(f"{m.name}: underfull ({m.count})")
            if m.key_lo > m.key_hi:
                raise QueueInvariantError(f"{m.name}: inverted key range")
            if pos > 0 and self._index[pos - 1].key_hi > m.key_lo:
                raise QueueInvariantError(
                    f"{m.name}: range overlaps previous file"
                )
        if deep:
            for m in self._index:
                recs = self._load(m, count=False, delete=False)
                keys = [r.key for r in recs]
                if len(recs) != m.count:
                    raise QueueInvariantError(f"{m.name}: bad count on disk")
                if keys != sorted(keys):
                    raise QueueInvariantError(f"{m.name}: records unsorted")
                if keys[0] != m.key_lo or keys[-1] != m.key_hi:
                    raise QueueInvariantError(f"{m.name}: stale key range")
        if self.enqueued_total != self.fetched_total + len(self):
            raise QueueInvariantError("conservation violated")
        return True


QUEUE_KINDS = {"stream": StreamTaskQueue, "lsh": LshTaskQueue}


def make_queue(kind, dirpath, file_capacity=100, buffer_capacity=1000,
               ell=4, storage=None):
    try:
        cls = QUEUE_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown queue kind {kind!r}") from None
    return cls(dirpath, file_capacity=file_capacity,
               buffer_capacity=buffer_capacity, ell=ell, storage=storage)
