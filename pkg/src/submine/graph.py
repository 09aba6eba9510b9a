"""Graph data model: vertices with sorted adjacency lists, the text input
format, and deterministic hash partitioning of vertices across workers.

The canonical input format is one vertex per line, three tab-separated
fields:

    vid <TAB> label <TAB> nb1[:attr1] nb2[:attr2] ...

The label field may be empty.  Neighbor attributes are short opaque
strings; by convention in labeled graphs the first character of an
attribute is the neighbor's vertex label (apps that match on labels rely
on this).  Adjacency lists are sorted by neighbor id at load; duplicate
neighbors and self-loops are rejected.
"""

import hashlib
from bisect import bisect_right, insort
from dataclasses import dataclass
from typing import NamedTuple, Optional

MASK64 = (1 << 64) - 1


class GraphParseError(ValueError):
    """Malformed input text (bad field, bad neighbor token, duplicate)."""


class GraphDataError(ValueError):
    """Structurally invalid graph (dangling edge, asymmetry, self-loop)."""


def mix64(x: int) -> int:
    """64-bit avalanche hash (splitmix64 finalizer).

    Pure integer arithmetic, so the value is identical across processes
    and platforms -- required for stable vertex partitioning and minhash
    signatures.
    """
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


class AdjItem(NamedTuple):
    nb: int
    attr: Optional[str] = None


class Vertex:
    """A vertex with a sorted adjacency list.

    Treated as immutable once a graph is loaded; workers may share Vertex
    objects freely between tasks.  Responders may build pruned copies
    (shorter adjacency) to answer pull requests, so code receiving a
    pulled vertex must not assume its list is the full neighborhood.
    """

    __slots__ = ("id", "label", "adj", "_nb_ids")

    def __init__(self, vid, label=None, adj=None):
        self.id = vid
        self.label = label
        self.adj = list(adj) if adj else []
        self._nb_ids = None

    def neighbor_ids(self):
        """Neighbor ids in ascending order (cached list)."""
        if self._nb_ids is None:
            self._nb_ids = [a.nb for a in self.adj]
        return self._nb_ids

    @property
    def degree(self):
        return len(self.adj)

    def __eq__(self, other):
        return (
            isinstance(other, Vertex)
            and self.id == other.id
            and self.label == other.label
            and self.adj == other.adj
        )

    def __repr__(self):
        lab = f" {self.label!r}" if self.label else ""
        return f"<Vertex {self.id}{lab} deg={len(self.adj)}>"


def larger_neighbors(v: Vertex) -> list:
    """The suffix of v's adjacency with neighbor id > v.id.

    Because adjacency is sorted this is a contiguous slice.  It is the
    candidate set a seed task expands: restricting expansion to larger
    ids is what makes every subgraph get mined exactly once, by the task
    seeded at its minimum vertex.
    """
    ids = v.neighbor_ids()
    return v.adj[bisect_right(ids, v.id):]


def max_neighbor_id(v: Vertex) -> Optional[int]:
    """Largest neighbor id, or None for an isolated vertex."""
    if not v.adj:
        return None
    return v.adj[-1].nb


def partition_owner(vid: int, num_workers: int) -> int:
    """Worker that owns vertex `vid` (deterministic multiplicative hash)."""
    return mix64(vid) % num_workers


def parse_vertex_line(line: str, lineno=None) -> Vertex:
    """Parse one canonical text line into a Vertex.

    Raises GraphParseError naming the line number (when given) for any
    malformed field, duplicate neighbor, or self-loop.
    """

    def fail(msg):
        where = f"line {lineno}: " if lineno is not None else ""
        raise GraphParseError(f"{where}{msg}")

    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3:
        fail(f"expected 3 tab-separated fields, got {len(parts)}")
    try:
        vid = int(parts[0])
    except ValueError:
        fail(f"bad vertex id {parts[0]!r}")
    if vid < 0:
        fail(f"negative vertex id {vid}")
    label = parts[1] or None
    adj = []
    seen = set()
    for tok in parts[2].split():
        nb_s, _, attr = tok.partition(":")
        try:
            nb = int(nb_s)
        except ValueError:
            fail(f"bad neighbor token {tok!r}")
        if nb < 0:
            fail(f"negative neighbor id {nb}")
        if nb == vid:
            fail(f"self-loop on vertex {vid}")
        if nb in seen:
            fail(f"duplicate neighbor {nb} of vertex {vid}")
        seen.add(nb)
        adj.append(AdjItem(nb, attr or None))
    adj.sort()
    return Vertex(vid, label, adj)


def format_vertex_line(v: Vertex) -> str:
    toks = []
    for a in v.adj:
        toks.append(f"{a.nb}:{a.attr}" if a.attr is not None else str(a.nb))
    return f"{v.id}\t{v.label or ''}\t{' '.join(toks)}"


class Graph:
    """An in-memory vertex table plus derived stats."""

    def __init__(self, vertices=None):
        self.vertices = dict(vertices) if vertices else {}

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def avg_degree(self):
        if not self.vertices:
            return 0.0
        return sum(v.degree for v in self.vertices.values()) / len(self.vertices)

    def add(self, v: Vertex):
        if v.id in self.vertices:
            raise GraphDataError(f"duplicate vertex id {v.id}")
        self.vertices[v.id] = v

    def ids(self):
        return sorted(self.vertices)

    def __contains__(self, vid):
        return vid in self.vertices

    def __getitem__(self, vid):
        return self.vertices[vid]

    def __iter__(self):
        return iter(self.vertices.values())

    def __len__(self):
        return len(self.vertices)


def read_graph(path, validate_refs=True) -> Graph:
    """Load a graph from canonical text.

    Duplicate vertex ids across lines are an error.  With validate_refs,
    every neighbor id must itself appear as a vertex line (dangling
    references would otherwise surface later as protocol errors between
    workers).
    """
    g = Graph()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            v = parse_vertex_line(line, lineno=lineno)
            if v.id in g.vertices:
                raise GraphParseError(f"line {lineno}: duplicate vertex id {v.id}")
            g.vertices[v.id] = v
    if validate_refs:
        for v in g:
            for a in v.adj:
                if a.nb not in g.vertices:
                    raise GraphDataError(
                        f"vertex {v.id} references missing vertex {a.nb}"
                    )
    return g


def write_graph(g: Graph, path):
    with open(path, "w", encoding="utf-8") as fh:
        for vid in g.ids():
            fh.write(format_vertex_line(g[vid]))
            fh.write("\n")


def graph_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def check_undirected(g: Graph):
    """Verify adjacency symmetry (self-loops/parallels already rejected)."""
    for v in g:
        for a in v.adj:
            w = g.vertices.get(a.nb)
            if w is None:
                raise GraphDataError(f"vertex {v.id} references missing {a.nb}")
            ids = w.neighbor_ids()
            k = bisect_right(ids, v.id) - 1
            if k < 0 or ids[k] != v.id:
                raise GraphDataError(
                    f"edge ({v.id},{a.nb}) is not symmetric"
                )


@dataclass
class GraphConfig:
    """Input/partitioning description filled in by load_graph."""

    num_workers: int
    input_path: Optional[str] = None
    num_vertices: int = 0
    avg_degree: float = 0.0

    def __post_init__(self):
        if self.num_workers < 1:
            raise ValueError("num_workers must be >= 1")


def partition_graph(g: Graph, num_workers: int):
    """Split the vertex table into per-worker local tables by owner hash."""
    tables = [dict() for _ in range(num_workers)]
    for vid, v in g.vertices.items():
        tables[partition_owner(vid, num_workers)][vid] = v
    return tables


def load_graph(cfg: GraphConfig):
    """Read cfg.input_path and return per-worker local vertex tables.

    Populates cfg.num_vertices and cfg.avg_degree as a side effect.
    """
    g = read_graph(cfg.input_path)
    cfg.num_vertices = g.num_vertices
    cfg.avg_degree = g.avg_degree
    return partition_graph(g, cfg.num_workers)


class Subgraph:
    """A growable task-local subgraph.

    Adjacency here may be a filtered subset of the global graph's (tasks
    record only the edges they have witnessed), so membership checks are
    one-sided: an absent edge means "not recorded", not "not in G".
    """

    __slots__ = ("labels", "adj")

    def __init__(self):
        self.labels = {}
        self.adj = {}

    def add_vertex(self, vid, label=None):
        if vid not in self.labels:
            self.labels[vid] = label
            self.adj[vid] = {}
        elif label is not None and self.labels[vid] is None:
            self.labels[vid] = label

    def add_edge(self, a, b, attr_a=None, attr_b=None):
        """Record undirected edge (a, b); both endpoints must exist."""
        self.adj[a][b] = attr_b if attr_b is not None else self.adj[a].get(b)
        self.adj[b][a] = attr_a if attr_a is not None else self.adj[b].get(a)

    def has_edge(self, a, b):
        return a in self.adj and b in self.adj[a]

    def neighbors(self, vid):
        return self.adj.get(vid, {})

    def vertices_sorted(self):
        return sorted(self.labels)

    def __contains__(self, vid):
        return vid in self.labels

    def __len__(self):
        return len(self.labels)
