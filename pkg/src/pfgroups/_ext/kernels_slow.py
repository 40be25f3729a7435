"""Pure-Python implementations of the hot kernels.

Every function here has a drop-in twin in ``kernels_fast.pyx`` with the same
signature and bit-identical output.

Groups enter the search kernels through *generator columns*: an ``(m, n)``
int32 array ``cols`` with ``cols[j, a] = a * g_j``. For a tabulated group this
is ``table[:, gens].T``; direct products build it componentwise without ever
materialising a table.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "closure",
    "cayley_bfs",
    "pair_closure",
    "rref_mod_p",
    "centralizer_keys",
]


def closure(cols, identity):
    """Members of the subgroup generated by the column generators, sorted."""
    m = cols.shape[0]
    seen = {int(identity)}
    frontier = [int(identity)]
    while frontier:
        nxt = []
        for a in frontier:
            for j in range(m):
                b = int(cols[j, a])
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return np.array(sorted(seen), dtype=np.int32)


def cayley_bfs(cols, identity):
    """Breadth-first labelling of the generated subgroup.

    Returns ``(elements, graph)``: ``elements[k]`` is the k-th element reached
    (identity first) and ``graph[k, j]`` is the label of ``elements[k] * g_j``.
    """
    m = cols.shape[0]
    label = {int(identity): 0}
    elements = [int(identity)]
    rows = []
    k = 0
    while k < len(elements):
        a = elements[k]
        out = []
        for j in range(m):
            b = int(cols[j, a])
            lb = label.get(b)
            if lb is None:
                lb = len(elements)
                label[b] = lb
                elements.append(b)
            out.append(lb)
        rows.append(out)
        k += 1
    graph = np.array(rows, dtype=np.int32).reshape(len(elements), m)
    return np.array(elements, dtype=np.int32), graph


def pair_closure(cols1, id1, cols2, id2, functional):
    """Subgroup of G1 x G2 generated by the paired column generators.

    Returns a ``(k, 2)`` int32 array of pairs in BFS order. With ``functional``
    set, returns ``None`` as soon as two pairs share a first coordinate (the
    closure is then not the graph of a map G1 -> G2).
    """
    m = cols1.shape[0]
    n2 = cols2.shape[1]
    start = (int(id1), int(id2))
    seen = {start[0] * n2 + start[1]}
    first = {start[0]: start[1]}
    out = [start]
    k = 0
    while k < len(out):
        a, b = out[k]
        for j in range(m):
            c = int(cols1[j, a])
            d = int(cols2[j, b])
            key = c * n2 + d
            if key in seen:
                continue
            if functional:
                prev = first.get(c)
                if prev is not None and prev != d:
                    return None
                first[c] = d
            seen.add(key)
            out.append((c, d))
        k += 1
    return np.array(out, dtype=np.int32).reshape(len(out), 2)


def rref_mod_p(mat, p):
    """Reduced row echelon form over F_p. Returns ``(rref, rank)``."""
    mat = np.asarray(mat)
    rows, cols = mat.shape
    m = [[int(x) % p for x in row] for row in mat]
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        piv = None
        for r in range(rank, rows):
            if m[r][c]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [(x * inv) % p for x in m[rank]]
        for r in range(rows):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    out = np.zeros((rows, cols), dtype=np.int64)
    if rows:
        out[:, :] = m
    return out, rank


def centralizer_keys(alphas, nonedges, p):
    """Row-reduced centralizer matrices for a batch of exponent vectors.

    For each row ``a`` of ``alphas`` the centralizer matrix has one row per
    non-edge ``(r, s)``: ``-a[s]`` in column ``r`` and ``a[r]`` in column ``s``.
    ``keys[i]`` holds the top ``n`` rows of its RREF (``n`` columns bound the
    rank), as uint8.
    """
    alphas = np.asarray(alphas)
    count, n = alphas.shape
    keys = np.zeros((count, n, n), dtype=np.uint8)
    for i in range(count):
        a = [int(x) for x in alphas[i]]
        mat = []
        for r, s in nonedges:
            r, s = int(r), int(s)
            if a[r] == 0 and a[s] == 0:
                continue
            row = [0] * n
            row[r] = (-a[s]) % p
            row[s] = a[r] % p
            mat.append(row)
        if not mat:
            continue
        red, rank = rref_mod_p(np.array(mat, dtype=np.int64), p)
        keys[i, :rank, :] = red[:rank]
    return keys
