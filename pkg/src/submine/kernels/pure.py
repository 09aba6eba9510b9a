"""Pure-python reference implementations of the hot search kernels.

These are the import-time fallback when the compiled extension is not
available.  Both backends implement the exact same algorithms with the
same tie-breaking, so their outputs are bit-identical; the test suite
checks the two against each other on random inputs.

Small dense neighborhoods are represented as bitmasks: `rows[i]` is an
int whose bit j is set iff vertices i and j are adjacent.  Python ints
make this reasonably quick even without the extension.
"""

from bisect import bisect_left


def contains_sorted(lst, x):
    """Membership test in a sorted list via binary search."""
    k = bisect_left(lst, x)
    return k < len(lst) and lst[k] == x


def count_closing_pairs(ids, adj_lists):
    """Count pairs i < j with ids[j] present in adj_lists[i].

    `ids` is an ascending id list; `adj_lists[i]` is the sorted neighbor
    list of ids[i] and may be shorter than len(ids) - 1 entries.  Used by
    triangle counting: each hit closes one triangle.
    """
    total = 0
    n = len(ids)
    for i, adj in enumerate(adj_lists):
        if not adj:
            continue
        for j in range(i + 1, n):
            x = ids[j]
            k = bisect_left(adj, x)
            if k < len(adj) and adj[k] == x:
                total += 1
    return total


def _color_order(pmask, rows):
    # Greedy coloring of the candidate set: repeatedly peel an independent
    # set (one color class), taking vertices in ascending index order.
    # Returns vertices ordered by color class and their (1-based) colors;
    # color is an upper bound on the largest clique inside the prefix.
    order = []
    colors = []
    rest = pmask
    c = 0
    while rest:
        c += 1
        avail = rest
        while avail:
            bit = avail & -avail
            v = bit.bit_length() - 1
            order.append(v)
            colors.append(c)
            rest ^= bit
            avail &= ~(rows[v] | bit)
    return order, colors


def max_clique(n, rows, lower_bound=0):
    """Branch-and-bound maximum clique with greedy-coloring bounds.

    Returns (size, mask) for the best clique found with size strictly
    greater than lower_bound, else (0, 0).  Fully deterministic: vertices
    are explored in the reverse of the greedy color order and ties are
    never broken randomly.
    """
    best_size = lower_bound
    best_mask = 0
    found = False

    def expand(rmask, rsize, pmask):
        nonlocal best_size, best_mask, found
        order, colors = _color_order(pmask, rows)
        pcur = pmask
        for i in range(len(order) - 1, -1, -1):
            if rsize + colors[i] <= best_size:
                return
            v = order[i]
            bit = 1 << v
            child = pcur & rows[v]
            if child:
                expand(rmask | bit, rsize + 1, child)
            elif rsize + 1 > best_size:
                best_size = rsize + 1
                best_mask = rmask | bit
                found = True
            pcur &= ~bit

    if n > 0:
        full = (1 << n) - 1
        expand(0, 0, full)
    return (best_size, best_mask) if found else (0, 0)


def maximal_cliques(n, rows, p_mask, x_mask):
    """Enumerate maximal cliques extendable from candidate set P.

    Pivoting backtracking: a reported mask R is a clique over P-members
    only, with no extender left in P or X.  Callers seed X with vertices
    that would make a clique non-maximal (e.g. smaller neighbors of an
    anchor vertex).  Pivot choice: most P-neighbors, lowest index on ties.
    Output order is deterministic.
    """
    out = []

    def bk(rmask, pmask, xmask):
        if pmask == 0 and xmask == 0:
            out.append(rmask)
            return
        cand = pmask | xmask
        best_u = -1
        best_cnt = -1
        while cand:
            bit = cand & -cand
            u = bit.bit_length() - 1
            cnt = (pmask & rows[u]).bit_count()
            if cnt > best_cnt:
                best_cnt = cnt
                best_u = u
            cand ^= bit
        ext = pmask & ~rows[best_u]
        p = pmask
        x = xmask
        while ext:
            bit = ext & -ext
            v = bit.bit_length() - 1
            bk(rmask | bit, p & rows[v], x & rows[v])
            p &= ~bit
            x |= bit
            ext ^= bit

    bk(0, p_mask, x_mask)
    return out
