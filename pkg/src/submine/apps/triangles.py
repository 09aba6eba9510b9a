"""Exact triangle counting.

Every triangle {v1, v2, v3} with v1 < v2 < v3 is counted exactly once,
by the task seeded at v1: the seed pulls its larger neighbors except the
largest, and the single compute iteration checks, for each pulled v2 and
each candidate v3 > v2 among v1's larger neighbors, whether v3 appears
in v2's adjacency.  Responders send only larger-neighbor suffixes by
default, which is all the membership test ever looks at.
"""

import struct
from bisect import bisect_left

from ..engine import AggregatorSpec, AppSpec, Task
from ..graph import Vertex, larger_neighbors
from ..kernels import count_closing_pairs

_CTX = struct.Struct("<QQ")  # (largest candidate id, running count)


def _encode_ctx(ctx):
    return _CTX.pack(*ctx)


def _decode_ctx(data):
    return _CTX.unpack(data)


def _respond_gt(v):
    return Vertex(v.id, v.label, larger_neighbors(v))


def triangle_app(pruned=True, emit_triangles=False) -> AppSpec:
    """Build the triangle-counting app.

    pruned: responders send just the larger-neighbor suffix (sound here,
    and the default; the full-response mode exists to cross-check that).
    emit_triangles: also emit one "v1 v2 v3" line per triangle, for
    attribution tests; counting alone never materializes triangles.
    """

    def seed(v):
        gt = larger_neighbors(v)
        if len(gt) < 2:
            return []
        ids = [a.nb for a in gt]
        return [Task(v.id, context=(ids[-1], 0), pulls=ids[:-1])]

    def compute(task, frontier):
        largest, count = task.context
        ids = [f.id for f in frontier]
        ids.append(largest)
        adj = [f.neighbor_ids() for f in frontier]
        adj.append(())
        found = count_closing_pairs(ids, adj)
        if emit_triangles:
            for i, f in enumerate(frontier):
                nbs = f.neighbor_ids()
                for j in range(i + 1, len(ids)):
                    k = bisect_left(nbs, ids[j])
                    if k < len(nbs) and nbs[k] == ids[j]:
                        task.emit(f"{task.seed_id} {ids[i]} {ids[j]}")
        task.aggregate(count + found)
        return False

    return AppSpec(
        name="triangle",
        seed=seed,
        compute=compute,
        encode_context=_encode_ctx,
        decode_context=_decode_ctx,
        respond=_respond_gt if pruned else None,
        aggregator=AggregatorSpec(zero=int, merge=lambda a, b: a + b),
    )
