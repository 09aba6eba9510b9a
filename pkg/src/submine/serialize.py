"""Flat little-endian binary encodings for vertices, subgraphs, task
payloads, and queue spill files.

Encodings are canonical: collections are written in sorted order, so
encode(decode(b)) == b byte-for-byte.  Every file begins with a magic and
a format version; strings are utf-8 with a u32 length prefix (0xFFFFFFFF
encodes None).
"""

import struct
from typing import NamedTuple

from .graph import AdjItem, Subgraph, Vertex
from .minhash import TaskKey

MAGIC = b"SMQ1"
FORMAT_VERSION = 1

_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_NONE_LEN = 0xFFFFFFFF


class CorruptData(ValueError):
    pass


def put_u16(buf, x):
    buf += _U16.pack(x)


def put_u32(buf, x):
    buf += _U32.pack(x)


def put_u64(buf, x):
    buf += _U64.pack(x)


def put_opt_str(buf, s):
    if s is None:
        buf += _U32.pack(_NONE_LEN)
    else:
        raw = s.encode("utf-8")
        buf += _U32.pack(len(raw))
        buf += raw


def put_bytes(buf, b):
    buf += _U32.pack(len(b))
    buf += b


class Reader:
    """Sequential reader over a bytes buffer with bounds checks."""

    __slots__ = ("data", "off")

    def __init__(self, data, off=0):
        self.data = data
        self.off = off

    def _take(self, n):
        if self.off + n > len(self.data):
            raise CorruptData("truncated record")
        out = self.data[self.off:self.off + n]
        self.off += n
        return out

    def u16(self):
        return _U16.unpack(self._take(2))[0]

    def u32(self):
        return _U32.unpack(self._take(4))[0]

    def u64(self):
        return _U64.unpack(self._take(8))[0]

    def opt_str(self):
        n = self.u32()
        if n == _NONE_LEN:
            return None
        return self._take(n).decode("utf-8")

    def bytes(self):
        return bytes(self._take(self.u32()))

    def done(self):
        return self.off >= len(self.data)


def encode_vertex(v: Vertex) -> bytes:
    buf = bytearray()
    put_u64(buf, v.id)
    put_opt_str(buf, v.label)
    put_u32(buf, len(v.adj))
    for a in v.adj:
        put_u64(buf, a.nb)
        put_opt_str(buf, a.attr)
    return bytes(buf)


def decode_vertex(r: Reader) -> Vertex:
    vid = r.u64()
    label = r.opt_str()
    n = r.u32()
    adj = []
    for _ in range(n):
        nb = r.u64()
        attr = r.opt_str()
        adj.append(AdjItem(nb, attr))
    return Vertex(vid, label, adj)


def vertex_from_bytes(data: bytes) -> Vertex:
    return decode_vertex(Reader(data))


def encode_subgraph(sg: Subgraph) -> bytes:
    buf = bytearray()
    put_u32(buf, len(sg.labels))
    for vid in sorted(sg.labels):
        put_u64(buf, vid)
        put_opt_str(buf, sg.labels[vid])
        nbrs = sg.adj[vid]
        put_u32(buf, len(nbrs))
        for nb in sorted(nbrs):
            put_u64(buf, nb)
            put_opt_str(buf, nbrs[nb])
    return bytes(buf)


def decode_subgraph(r: Reader) -> Subgraph:
    sg = Subgraph()
    n = r.u32()
    for _ in range(n):
        vid = r.u64()
        label = r.opt_str()
        sg.labels[vid] = label
        deg = r.u32()
        nbrs = {}
        for _ in range(deg):
            nb = r.u64()
            nbrs[nb] = r.opt_str()
        sg.adj[vid] = nbrs
    return sg


class TaskWire(NamedTuple):
    """Task state as it crosses the disk/queue boundary."""

    seed_id: int
    iteration: int
    requested: tuple
    pending: frozenset
    context: bytes
    subgraph: Subgraph


def encode_task(w: TaskWire) -> bytes:
    buf = bytearray()
    put_u64(buf, w.seed_id)
    put_u32(buf, w.iteration)
    put_u32(buf, len(w.requested))
    for i in w.requested:
        put_u64(buf, i)
    put_u32(buf, len(w.pending))
    for i in sorted(w.pending):
        put_u64(buf, i)
    put_bytes(buf, w.context)
    buf += encode_subgraph(w.subgraph)
    return bytes(buf)


def decode_task(data: bytes) -> TaskWire:
    r = Reader(data)
    seed_id = r.u64()
    iteration = r.u32()
    requested = tuple(r.u64() for _ in range(r.u32()))
    pending = frozenset(r.u64() for _ in range(r.u32()))
    context = r.bytes()
    subgraph = decode_subgraph(r)
    return TaskWire(seed_id, iteration, requested, pending, context, subgraph)


def encode_record(key: TaskKey, payload: bytes) -> bytes:
    buf = bytearray()
    put_u16(buf, len(key.sigs))
    for s in key.sigs:
        put_u64(buf, s)
    put_u64(buf, key.tiebreak)
    put_bytes(buf, payload)
    return bytes(buf)


def decode_record(r: Reader):
    ell = r.u16()
    sigs = tuple(r.u64() for _ in range(ell))
    tiebreak = r.u64()
    payload = r.bytes()
    return TaskKey(sigs, tiebreak), payload


def encode_file(file_capacity, ell, records) -> bytes:
    """A spill file: header (magic, version, capacity, ell, count) then
    the records in key order."""
    buf = bytearray()
    buf += MAGIC
    put_u16(buf, FORMAT_VERSION)
    put_u32(buf, file_capacity)
    put_u16(buf, ell)
    put_u32(buf, len(records))
    for key, payload in records:
        buf += encode_record(key, payload)
    return bytes(buf)


def decode_file(data: bytes):
    r = Reader(data)
    if r._take(4) != MAGIC:
        raise CorruptData("bad magic")
    version = r.u16()
    if version != FORMAT_VERSION:
        raise CorruptData(f"unsupported format version {version}")
    file_capacity = r.u32()
    ell = r.u16()
    count = r.u32()
    records = [decode_record(r) for _ in range(count)]
    if not r.done():
        raise CorruptData("trailing bytes after records")
    return file_capacity, ell, records
