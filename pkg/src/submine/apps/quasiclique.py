"""Gamma-quasi-clique enumeration.

A vertex set S is a gamma-quasi-clique when every member has at least
ceil(gamma * (|S| - 1)) neighbors inside S.  For gamma >= 1/2 any such
set is connected with diameter at most 2, so every qualifying set whose
minimum vertex is v lies inside v's 2-hop neighborhood restricted to ids
greater than v.  The task seeded at v therefore pulls its larger
neighbors, then the still-missing 2-hop vertices (again only ids > v),
and enumerates over that little ego network; the union over all seeds is
exactly the qualifying sets of size >= min_size, each found once.

Thresholds are computed in exact integer arithmetic from a Fraction, so
gamma = 0.6 means 3/5, not a float approximation.
"""

from fractions import Fraction

from ..engine import AggregatorSpec, AppSpec, Task
from ..graph import larger_neighbors


def _as_fraction(gamma):
    if isinstance(gamma, float):
        # treat the literal the way the user wrote it, not its binary blur
        gamma = str(gamma)
    return Fraction(gamma)


def _no_ctx_encode(_ctx):
    return b""


def _no_ctx_decode(_data):
    return None


def quasi_clique_app(gamma, min_size) -> AppSpec:
    gamma = _as_fraction(gamma)
    if not Fraction(1, 2) <= gamma <= 1:
        raise ValueError(f"gamma must be in [1/2, 1], got {gamma}")
    min_size = int(min_size)
    if min_size < 1:
        raise ValueError("min_size must be >= 1")
    num, den = gamma.numerator, gamma.denominator

    def threshold(k):
        # ceil(gamma * (k - 1)), exactly
        return (num * (k - 1) + den - 1) // den

    def seed(v):
        gt = [a.nb for a in larger_neighbors(v)]
        if not gt and min_size > 1:
            # any qualifying set around v needs a larger neighbor of v
            return []
        return [Task(v.id, pulls=gt)]

    def compute(task, frontier):
        g = task.subgraph
        v = task.seed_id
        if task.iteration == 0:
            g.add_vertex(v)
            for f in frontier:
                g.add_vertex(f.id)
                g.add_edge(v, f.id)
            hop2 = set()
            for f in frontier:
                for w in f.neighbor_ids():
                    if w <= v:
                        continue
                    if w not in g:
                        g.add_vertex(w)
                        hop2.add(w)
                    g.add_edge(f.id, w)
            if hop2:
                for w in sorted(hop2):
                    task.pull(w)
                return True
        else:
            for f in frontier:
                for w in f.neighbor_ids():
                    if w in g:
                        g.add_edge(f.id, w)
        _enumerate(task, threshold)
        return False

    def _enumerate(task, threshold):
        g = task.subgraph
        universe = g.vertices_sorted()  # seed first: everything else is larger
        n = len(universe)
        idx = {u: i for i, u in enumerate(universe)}
        rows = [0] * n
        for u, nbrs in g.adj.items():
            i = idx[u]
            for w in nbrs:
                rows[i] |= 1 << idx[w]
        found = 0

        def dfs(s_idxs, s_mask, cand):
            nonlocal found
            # Degree-based filtering: a candidate (or committed member)
            # whose degree even into S union C cannot reach the threshold
            # of the smallest possible final size will never qualify.
            c_mask = 0
            for c in cand:
                c_mask |= 1 << c
            k = len(s_idxs)
            need_c = threshold(max(min_size, k + 1))
            while True:
                keep = []
                kept_mask = 0
                for c in cand:
                    if ((rows[c] & (s_mask | c_mask)).bit_count()) >= need_c:
                        keep.append(c)
                        kept_mask |= 1 << c
                if len(keep) == len(cand):
                    break
                cand, c_mask = keep, kept_mask
            need_s = threshold(max(min_size, k))
            for s in s_idxs:
                if (rows[s] & (s_mask | c_mask)).bit_count() < need_s:
                    return
            if k >= min_size:
                t = threshold(k)
                if all((rows[s] & s_mask).bit_count() >= t for s in s_idxs):
                    found += 1
                    task.emit(" ".join(str(universe[i]) for i in s_idxs))
            for pos, c in enumerate(cand):
                dfs(s_idxs + [c], s_mask | (1 << c), cand[pos + 1:])

        dfs([0], 1, list(range(1, n)))
        task.aggregate(found)

    return AppSpec(
        name="quasiclique",
        seed=seed,
        compute=compute,
        encode_context=_no_ctx_encode,
        decode_context=_no_ctx_decode,
        respond=None,
        aggregator=AggregatorSpec(zero=int, merge=lambda a, b: a + b),
    )
