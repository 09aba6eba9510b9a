# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the pure-python kernels (submine.kernels.pure).

Same algorithms, same visit order, same tie-breaking -- just C loops over
raw uint64 bitset words instead of python ints.  Masks cross the boundary
as python ints and are converted via little-endian byte buffers, so this
module assumes a little-endian platform (checked at import).
"""

import sys

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy, memset

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

if sys.byteorder != "little":
    raise ImportError("fastpath kernels require a little-endian platform")


def count_closing_pairs(ids, adj_lists):
    """See kernels.pure.count_closing_pairs."""
    cdef Py_ssize_t n = len(ids)
    cdef Py_ssize_t m = len(adj_lists)
    if n == 0 or m == 0:
        return 0
    cdef int64_t* cids = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t* arr = NULL
    cdef Py_ssize_t cap = 0
    cdef Py_ssize_t i, j, alen, lo, hi, mid
    cdef int64_t x
    cdef long long total = 0
    if cids == NULL:
        raise MemoryError()
    for i in range(n):
        cids[i] = ids[i]
    try:
        for i in range(m):
            lst = adj_lists[i]
            alen = len(lst)
            if alen == 0:
                continue
            if alen > cap:
                free(arr)
                arr = <int64_t*> malloc(alen * sizeof(int64_t))
                if arr == NULL:
                    raise MemoryError()
                cap = alen
            for j in range(alen):
                arr[j] = lst[j]
            for j in range(i + 1, n):
                x = cids[j]
                lo = 0
                hi = alen
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if arr[mid] < x:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < alen and arr[lo] == x:
                    total += 1
    finally:
        free(arr)
        free(cids)
    return total


cdef uint64_t* _masks_to_words(rows, Py_ssize_t n, Py_ssize_t nw) except NULL:
    cdef uint64_t* out = <uint64_t*> malloc(n * nw * sizeof(uint64_t))
    cdef Py_ssize_t i
    cdef bytes b
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        b = rows[i].to_bytes(nw * 8, "little")
        memcpy(out + i * nw, PyBytes_AS_STRING(b), nw * 8)
    return out


cdef object _words_to_int(uint64_t* words, Py_ssize_t nw):
    cdef bytes b = PyBytes_FromStringAndSize(<char*> words, nw * 8)
    return int.from_bytes(b, "little")


cdef inline int _lowest_bit(uint64_t* mask, Py_ssize_t nw) nogil:
    cdef Py_ssize_t w
    for w in range(nw):
        if mask[w]:
            return <int> (w * 64 + __builtin_ctzll(mask[w]))
    return -1


cdef inline bint _is_empty(uint64_t* mask, Py_ssize_t nw) nogil:
    cdef Py_ssize_t w
    for w in range(nw):
        if mask[w]:
            return 0
    return 1


cdef inline void _clear_bit(uint64_t* mask, int v) nogil:
    mask[v >> 6] &= ~((<uint64_t> 1) << (v & 63))


cdef inline void _set_bit(uint64_t* mask, int v) nogil:
    mask[v >> 6] |= (<uint64_t> 1) << (v & 63)


cdef struct MCState:
    uint64_t* rows
    Py_ssize_t n
    Py_ssize_t nw
    long best_size
    uint64_t* best
    bint found


cdef int _mc_expand(MCState* st, uint64_t* rmask, long rsize,
                    uint64_t* pmask) except -1:
    cdef Py_ssize_t nw = st.nw
    cdef Py_ssize_t pc = 0, w, wi
    cdef uint64_t* row
    cdef uint64_t nonempty
    cdef int v, c
    cdef Py_ssize_t k, i
    for w in range(nw):
        pc += __builtin_popcountll(pmask[w])
    if pc == 0:
        return 0
    cdef int* order = <int*> malloc(pc * sizeof(int))
    cdef int* colors = <int*> malloc(pc * sizeof(int))
    cdef uint64_t* buf = <uint64_t*> malloc(5 * nw * sizeof(uint64_t))
    if order == NULL or colors == NULL or buf == NULL:
        free(order); free(colors); free(buf)
        raise MemoryError()
    cdef uint64_t* rest = buf
    cdef uint64_t* avail = buf + nw
    cdef uint64_t* pcur = buf + 2 * nw
    cdef uint64_t* child = buf + 3 * nw
    cdef uint64_t* rchild = buf + 4 * nw
    try:
        # greedy coloring, identical order to the pure backend
        memcpy(rest, pmask, nw * 8)
        k = 0
        c = 0
        while k < pc:
            c += 1
            memcpy(avail, rest, nw * 8)
            while True:
                v = _lowest_bit(avail, nw)
                if v < 0:
                    break
                order[k] = v
                colors[k] = c
                k += 1
                _clear_bit(rest, v)
                row = st.rows + v * nw
                for wi in range(nw):
                    avail[wi] &= ~row[wi]
                _clear_bit(avail, v)
        # expand in reverse color order
        memcpy(pcur, pmask, nw * 8)
        for i in range(pc - 1, -1, -1):
            if rsize + colors[i] <= st.best_size:
                return 0
            v = order[i]
            row = st.rows + v * nw
            nonempty = 0
            for wi in range(nw):
                child[wi] = pcur[wi] & row[wi]
                nonempty |= child[wi]
            if nonempty:
                memcpy(rchild, rmask, nw * 8)
                _set_bit(rchild, v)
                _mc_expand(st, rchild, rsize + 1, child)
            elif rsize + 1 > st.best_size:
                st.best_size = rsize + 1
                memcpy(st.best, rmask, nw * 8)
                _set_bit(st.best, v)
                st.found = 1
        return 0
    finally:
        free(order)
        free(colors)
        free(buf)


def max_clique(n, rows, lower_bound=0):
    """See kernels.pure.max_clique."""
    cdef Py_ssize_t cn = n
    if cn <= 0:
        return (0, 0)
    cdef Py_ssize_t nw = (cn + 63) >> 6
    cdef MCState st
    st.rows = _masks_to_words(rows, cn, nw)
    st.n = cn
    st.nw = nw
    st.best_size = lower_bound
    st.found = 0
    st.best = <uint64_t*> malloc(nw * sizeof(uint64_t))
    cdef uint64_t* full = <uint64_t*> malloc(nw * sizeof(uint64_t))
    cdef uint64_t* rroot = <uint64_t*> malloc(nw * sizeof(uint64_t))
    if st.best == NULL or full == NULL or rroot == NULL:
        free(st.rows); free(st.best); free(full); free(rroot)
        raise MemoryError()
    cdef Py_ssize_t w
    try:
        memset(st.best, 0, nw * 8)
        memset(rroot, 0, nw * 8)
        for w in range(nw):
            full[w] = <uint64_t> 0xFFFFFFFFFFFFFFFF
        if cn & 63:
            full[nw - 1] = ((<uint64_t> 1) << (cn & 63)) - 1
        _mc_expand(&st, rroot, 0, full)
        if st.found:
            return (st.best_size, _words_to_int(st.best, nw))
        return (0, 0)
    finally:
        free(st.rows)
        free(st.best)
        free(full)
        free(rroot)


cdef int _bk(uint64_t* rows, Py_ssize_t nw, uint64_t* rmask, uint64_t* pmask,
             uint64_t* xmask, list out) except -1:
    cdef Py_ssize_t wi
    cdef uint64_t* row
    cdef int u, v, best_u
    cdef int cnt, best_cnt
    cdef uint64_t cw
    cdef Py_ssize_t w
    if _is_empty(pmask, nw) and _is_empty(xmask, nw):
        out.append(_words_to_int(rmask, nw))
        return 0
    # pivot: most P-neighbors over P|X, lowest index wins ties
    best_u = -1
    best_cnt = -1
    for w in range(nw):
        cw = pmask[w] | xmask[w]
        while cw:
            u = <int> (w * 64 + __builtin_ctzll(cw))
            cw &= cw - 1
            row = rows + u * nw
            cnt = 0
            for wi in range(nw):
                cnt += __builtin_popcountll(pmask[wi] & row[wi])
            if cnt > best_cnt:
                best_cnt = cnt
                best_u = u
    cdef uint64_t* buf = <uint64_t*> malloc(6 * nw * sizeof(uint64_t))
    if buf == NULL:
        raise MemoryError()
    cdef uint64_t* ext = buf
    cdef uint64_t* p = buf + nw
    cdef uint64_t* x = buf + 2 * nw
    cdef uint64_t* rchild = buf + 3 * nw
    cdef uint64_t* pchild = buf + 4 * nw
    cdef uint64_t* xchild = buf + 5 * nw
    try:
        row = rows + best_u * nw
        for wi in range(nw):
            ext[wi] = pmask[wi] & ~row[wi]
        memcpy(p, pmask, nw * 8)
        memcpy(x, xmask, nw * 8)
        while True:
            v = _lowest_bit(ext, nw)
            if v < 0:
                break
            row = rows + v * nw
            memcpy(rchild, rmask, nw * 8)
            _set_bit(rchild, v)
            for wi in range(nw):
                pchild[wi] = p[wi] & row[wi]
                xchild[wi] = x[wi] & row[wi]
            _bk(rows, nw, rchild, pchild, xchild, out)
            _clear_bit(p, v)
            _set_bit(x, v)
            _clear_bit(ext, v)
        return 0
    finally:
        free(buf)


def maximal_cliques(n, rows, p_mask, x_mask):
    """See kernels.pure.maximal_cliques."""
    cdef Py_ssize_t cn = n if n > 0 else 1
    cdef Py_ssize_t nw = (cn + 63) >> 6
    cdef uint64_t* crows = _masks_to_words(rows, len(rows), nw) if len(rows) else NULL
    cdef uint64_t* buf = <uint64_t*> malloc(3 * nw * sizeof(uint64_t))
    cdef bytes pb = p_mask.to_bytes(nw * 8, "little")
    cdef bytes xb = x_mask.to_bytes(nw * 8, "little")
    if buf == NULL:
        free(crows)
        raise MemoryError()
    cdef uint64_t* rroot = buf
    cdef uint64_t* proot = buf + nw
    cdef uint64_t* xroot = buf + 2 * nw
    out = []
    try:
        memset(rroot, 0, nw * 8)
        memcpy(proot, PyBytes_AS_STRING(pb), nw * 8)
        memcpy(xroot, PyBytes_AS_STRING(xb), nw * 8)
        _bk(crows, nw, rroot, proot, xroot, out)
        return out
    finally:
        free(buf)
        free(crows)
