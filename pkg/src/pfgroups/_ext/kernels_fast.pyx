# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same contracts as ``kernels_slow``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def closure(const int[:, ::1] cols, int identity):
    cdef Py_ssize_t m = cols.shape[0]
    cdef Py_ssize_t n = cols.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] seen_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] queue_arr = np.empty(n, dtype=np.int32)
    cdef unsigned char[::1] seen = seen_arr
    cdef int[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 1, j
    cdef int a, b
    queue[0] = identity
    seen[identity] = 1
    while head < tail:
        a = queue[head]
        head += 1
        for j in range(m):
            b = cols[j, a]
            if not seen[b]:
                seen[b] = 1
                queue[tail] = b
                tail += 1
    return np.flatnonzero(seen_arr).astype(np.int32)


def cayley_bfs(const int[:, ::1] cols, int identity):
    cdef Py_ssize_t m = cols.shape[0]
    cdef Py_ssize_t n = cols.shape[1]
    cdef cnp.ndarray[cnp.int32_t, ndim=1] label_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] elems_arr = np.empty(n, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] graph_arr = np.empty((n, m), dtype=np.int32)
    cdef int[::1] label = label_arr
    cdef int[::1] elems = elems_arr
    cdef int[:, ::1] graph = graph_arr
    cdef Py_ssize_t head = 0, tail = 1, j
    cdef int a, b
    elems[0] = identity
    label[identity] = 0
    while head < tail:
        a = elems[head]
        for j in range(m):
            b = cols[j, a]
            if label[b] < 0:
                label[b] = <int>tail
                elems[tail] = b
                tail += 1
            graph[head, j] = label[b]
        head += 1
    return elems_arr[:tail].copy(), graph_arr[:tail].copy()


def pair_closure(const int[:, ::1] cols1, int id1, const int[:, ::1] cols2, int id2,
                 bint functional):
    cdef Py_ssize_t m = cols1.shape[0]
    cdef Py_ssize_t n1 = cols1.shape[1]
    cdef Py_ssize_t n2 = cols2.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] seen_arr = np.zeros(n1 * n2, dtype=np.uint8)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] first_arr = np.full(n1, -1, dtype=np.int32)
    cdef unsigned char[::1] seen = seen_arr
    cdef int[::1] first = first_arr
    cdef list chunks = []
    cdef Py_ssize_t cap = 1024
    cdef cnp.ndarray[cnp.int32_t, ndim=2] out_arr = np.empty((cap, 2), dtype=np.int32)
    cdef int[:, ::1] out = out_arr
    cdef Py_ssize_t head = 0, tail = 1, j
    cdef int a, b, c, d
    out[0, 0] = id1
    out[0, 1] = id2
    seen[id1 * n2 + id2] = 1
    first[id1] = id2
    while head < tail:
        a = out[head, 0]
        b = out[head, 1]
        head += 1
        for j in range(m):
            c = cols1[j, a]
            d = cols2[j, b]
            if seen[c * n2 + d]:
                continue
            if functional:
                if first[c] >= 0 and first[c] != d:
                    return None
                first[c] = d
            seen[c * n2 + d] = 1
            if tail == cap:
                cap *= 2
                out_arr = np.resize(out_arr, (cap, 2))
                out = out_arr
            out[tail, 0] = c
            out[tail, 1] = d
            tail += 1
    return out_arr[:tail].copy()


cdef long _inv_mod(long a, long p):
    cdef long r = 1, e = p - 2
    a %= p
    while e > 0:
        if e & 1:
            r = (r * a) % p
        a = (a * a) % p
        e >>= 1
    return r


cdef Py_ssize_t _rref_inplace(long[:, ::1] m, Py_ssize_t rows, Py_ssize_t cols, long p):
    cdef Py_ssize_t rank = 0, c, r, piv, k
    cdef long inv, f, tmp
    for c in range(cols):
        if rank == rows:
            break
        piv = -1
        for r in range(rank, rows):
            if m[r, c] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(cols):
                tmp = m[rank, k]
                m[rank, k] = m[piv, k]
                m[piv, k] = tmp
        inv = _inv_mod(m[rank, c], p)
        for k in range(cols):
            m[rank, k] = (m[rank, k] * inv) % p
        for r in range(rows):
            if r != rank and m[r, c] != 0:
                f = m[r, c]
                for k in range(cols):
                    m[r, k] = ((m[r, k] - f * m[rank, k]) % p + p) % p
        rank += 1
    return rank


def rref_mod_p(mat, long p):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] work = np.ascontiguousarray(
        np.asarray(mat, dtype=np.int64) % p)
    cdef long[:, ::1] m = work
    cdef Py_ssize_t rank = _rref_inplace(m, work.shape[0], work.shape[1], p)
    return work, int(rank)


def centralizer_keys(alphas, nonedges, long p):
    cdef cnp.ndarray[cnp.int64_t, ndim=2] al_arr = np.ascontiguousarray(alphas, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] ne_arr = np.ascontiguousarray(
        np.asarray(nonedges, dtype=np.int64).reshape(-1, 2))
    cdef long[:, ::1] al = al_arr
    cdef long[:, ::1] ne = ne_arr
    cdef Py_ssize_t count = al_arr.shape[0], n = al_arr.shape[1], e = ne_arr.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=3] keys_arr = np.zeros((count, n, n), dtype=np.uint8)
    cdef unsigned char[:, :, ::1] keys = keys_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=2] work_arr = np.zeros((max(e, 1), n), dtype=np.int64)
    cdef long[:, ::1] work = work_arr
    cdef Py_ssize_t i, k, rows, rank, r, s, c
    cdef long ar, as_
    for i in range(count):
        rows = 0
        for k in range(e):
            r = ne[k, 0]
            s = ne[k, 1]
            ar = al[i, r]
            as_ = al[i, s]
            if ar == 0 and as_ == 0:
                continue
            for c in range(n):
                work[rows, c] = 0
            work[rows, r] = ((-as_) % p + p) % p
            work[rows, s] = ar % p
            rows += 1
        if rows == 0:
            continue
        rank = _rref_inplace(work, rows, n, p)
        for r in range(rank):
            for c in range(n):
                keys[i, r, c] = <unsigned char>work[r, c]
    return keys_arr
