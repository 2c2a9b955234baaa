# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitset kernels; same contract as ``ktfactor._pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline cnp.ndarray _words_of(object mask_int, Py_ssize_t nw):
    return np.frombuffer(mask_int.to_bytes(nw * 8, "little"), dtype="<u8")


cdef inline int _popand(const uint64_t* a, const uint64_t* b, Py_ssize_t nw) noexcept nogil:
    cdef int total = 0
    cdef Py_ssize_t w
    for w in range(nw):
        total += __builtin_popcountll(a[w] & b[w])
    return total


def masked_degrees(g, target):
    cdef const uint64_t[:, ::1] rows = g.words
    cdef Py_ssize_t n = rows.shape[0], nw = rows.shape[1]
    cdef const uint64_t[::1] t = _words_of(target, nw)
    cdef cnp.ndarray[int64_t, ndim=1] out = np.zeros(n, dtype=np.int64)
    cdef Py_ssize_t v
    with nogil:
        for v in range(n):
            out[v] = _popand(&rows[v, 0], &t[0], nw)
    return out


def edge_count_between(g, a, b):
    cdef const uint64_t[:, ::1] rows = g.words
    cdef Py_ssize_t nw = rows.shape[1]
    cdef const uint64_t[::1] aw = _words_of(a, nw)
    cdef const uint64_t[::1] bw = _words_of(b, nw)
    cdef long long total = 0
    cdef Py_ssize_t w, v
    cdef uint64_t word
    with nogil:
        for w in range(nw):
            word = aw[w]
            while word:
                v = w * 64 + __builtin_ctzll(word)
                word &= word - 1
                total += _popand(&rows[v, 0], &bw[0], nw)
    return total


def best_vertex(g, cand):
    cdef const uint64_t[:, ::1] rows = g.words
    cdef Py_ssize_t nw = rows.shape[1]
    cdef const uint64_t[::1] cw = _words_of(cand, nw)
    cdef Py_ssize_t w, v, best_v = -1
    cdef int d, best_d = -1
    cdef uint64_t word
    with nogil:
        for w in range(nw):
            word = cw[w]
            while word:
                v = w * 64 + __builtin_ctzll(word)
                word &= word - 1
                d = _popand(&rows[v, 0], &cw[0], nw)
                if d > best_d:
                    best_d = d
                    best_v = v
    return int(best_v), int(best_d)


cdef int _cliques_rec(const uint64_t[:, ::1] rows, Py_ssize_t nw, uint64_t* buf,
                      int depth, int k, Py_ssize_t* stack, list out, Py_ssize_t limit) except -1:
    # buf holds k candidate vectors of nw words each; level ``depth`` is current
    cdef uint64_t* cand = buf + depth * nw
    cdef uint64_t* nxt
    cdef Py_ssize_t w, w2, v
    cdef int need = k - depth, remaining
    cdef uint64_t low
    for w in range(nw):
        while cand[w]:
            remaining = 0
            for w2 in range(w, nw):
                remaining += __builtin_popcountll(cand[w2])
            if remaining < need:
                return 0
            low = cand[w] & (~cand[w] + 1)
            v = w * 64 + __builtin_ctzll(cand[w])
            cand[w] ^= low
            stack[depth] = v
            if need == 1:
                out.append(tuple([stack[i] for i in range(k)]))
                if len(out) >= limit:
                    return 1
                continue
            nxt = buf + (depth + 1) * nw
            for w2 in range(nw):
                nxt[w2] = cand[w2] & rows[v, w2]
            if _cliques_rec(rows, nw, buf, depth + 1, k, stack, out, limit):
                return 1
    return 0


def cliques_in(g, s, int k, Py_ssize_t limit):
    out = []
    if k <= 0 or limit <= 0:
        return out
    cdef const uint64_t[:, ::1] rows = g.words
    cdef Py_ssize_t nw = rows.shape[1]
    cdef const uint64_t[::1] sw = _words_of(s, nw)
    cdef uint64_t* buf = <uint64_t*> malloc(k * nw * sizeof(uint64_t))
    cdef Py_ssize_t* stack = <Py_ssize_t*> malloc(k * sizeof(Py_ssize_t))
    cdef Py_ssize_t w
    if buf == NULL or stack == NULL:
        free(buf)
        free(stack)
        raise MemoryError()
    try:
        for w in range(nw):
            buf[w] = sw[w]
        _cliques_rec(rows, nw, buf, 0, k, stack, out, limit)
    finally:
        free(buf)
        free(stack)
    return out
