"""Nil-2 exponent-p groups attached to graphs.

For a graph ``A`` on vertices ``0..n-1`` and an odd prime ``p``, ``G(A)`` is
the free nil-2 exponent-p group on ``x_0, ..., x_{n-1}`` with ``[x_r, x_s] = 1``
for every edge. Every element has a unique normal form ``c * v`` with
``v = x_0^{a_0} ... x_{n-1}^{a_{n-1}}`` (ascending) and ``c`` a product of the
central ``x_{r,s} = [x_r, x_s]`` over non-edges ``r < s``. Commutators follow
``[g, h] = g^-1 h^-1 g h``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from pfgroups._ext import kernels
from pfgroups.errors import (
    BadPrime,
    CentralInput,
    LevelTooLarge,
    MixedContext,
    NotNice,
)
from pfgroups.finite import TABLE_LIMIT, FiniteGroup

__all__ = [
    "Graph",
    "cycle_graph",
    "petersen_graph",
    "NicenessReport",
    "is_nice",
    "MeklerElement",
    "identity",
    "generator",
    "central",
    "multiply",
    "inverse",
    "power",
    "commutator_formula",
    "commutator_oracle",
    "rewrite_normal_form",
    "centralizer_matrix",
    "centralizer_kernel",
    "same_class",
    "CaseTag",
    "case_classify",
    "class_size",
    "alpha_vectors",
    "all_alpha_vectors",
    "CentralizerClasses",
    "centralizer_classes",
    "Gamma2Result",
    "gamma2",
    "level_group",
    "rn_chain",
    "project_to_level",
    "is_prime",
]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


# -- graphs ---------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Finite simple graph on ``0..n-1``; edges stored as ``(r, s)``, ``r < s``."""

    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        norm = set()
        for r, s in self.edges:
            r, s = int(r), int(s)
            if r == s:
                raise ValueError(f"loop at vertex {r}: graphs are irreflexive")
            if not (0 <= r < self.n and 0 <= s < self.n):
                raise ValueError(f"edge ({r}, {s}) out of range for {self.n} vertices")
            norm.add((min(r, s), max(r, s)))
        object.__setattr__(self, "edges", frozenset(norm))

    def adjacent(self, r: int, s: int) -> bool:
        return (min(r, s), max(r, s)) in self.edges

    @cached_property
    def neighbours(self) -> tuple[frozenset, ...]:
        nb = [set() for _ in range(self.n)]
        for r, s in self.edges:
            nb[r].add(s)
            nb[s].add(r)
        return tuple(frozenset(x) for x in nb)

    @cached_property
    def nonedges(self) -> tuple[tuple[int, int], ...]:
        """Non-adjacent pairs ``r < s`` in lexicographic order."""
        return tuple((r, s) for r in range(self.n) for s in range(r + 1, self.n)
                     if (r, s) not in self.edges)

    @cached_property
    def nonedge_index(self) -> dict:
        return {pair: k for k, pair in enumerate(self.nonedges)}

    def induced(self, k: int) -> "Graph":
        """Subgraph on the first ``k`` vertices."""
        return Graph(k, frozenset((r, s) for r, s in self.edges if s < k))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def cycle_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, (i + 1) % n) for i in range(n)))


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, frozenset(outer + spokes + inner))


@dataclass(frozen=True)
class NicenessReport:
    nice: bool
    reason: str = ""
    witness: tuple = ()

    def __bool__(self):
        return self.nice


def is_nice(A: Graph) -> NicenessReport:
    """No triangles, no 4-cycles, and every ordered pair ``x != y`` has a
    ``z`` (distinct from both) joined to ``x`` and not to ``y``."""
    nb = A.neighbours
    for r, s in A.sorted_edges():
        common = sorted(nb[r] & nb[s])
        if common:
            return NicenessReport(False, "triangle", (r, s, common[0]))
    for a in range(A.n):
        for c in range(a + 1, A.n):
            common = sorted(nb[a] & nb[c])
            if len(common) >= 2:
                return NicenessReport(False, "square", (a, common[0], c, common[1]))
    for x in range(A.n):
        for y in range(A.n):
            if x == y:
                continue
            if not any(z != y and z not in nb[y] for z in nb[x]):
                return NicenessReport(False, "inseparable", (x, y))
    return NicenessReport(True)


# -- normal-form arithmetic -----------------------------------------------------------

@dataclass(frozen=True)
class MeklerElement:
    """Normal form ``c * v``: ``alpha`` indexed by vertices, ``beta`` by
    ``graph.nonedges``; all entries reduced mod ``p``."""

    p: int
    graph: Graph = field(repr=False)
    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        if len(self.alpha) != self.graph.n or len(self.beta) != len(self.graph.nonedges):
            raise ValueError("exponent vectors do not match the graph")
        object.__setattr__(self, "alpha", tuple(int(a) % self.p for a in self.alpha))
        object.__setattr__(self, "beta", tuple(int(b) % self.p for b in self.beta))

    def is_identity(self) -> bool:
        return not any(self.alpha) and not any(self.beta)

    def is_central(self) -> bool:
        return not np.any(centralizer_matrix(self))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.alpha) if a)

    def beta_at(self, r: int, s: int) -> int:
        k = self.graph.nonedge_index.get((r, s))
        return 0 if k is None else self.beta[k]

    def __mul__(self, other):
        return multiply(self, other)

    def __str__(self):
        from pfgroups.parsing import render_element

        return render_element(self)


def identity(p: int, A: Graph) -> MeklerElement:
    return MeklerElement(p, A, (0,) * A.n, (0,) * len(A.nonedges))


def generator(p: int, A: Graph, i: int, e: int = 1) -> MeklerElement:
    alpha = [0] * A.n
    alpha[i] = e
    return MeklerElement(p, A, tuple(alpha), (0,) * len(A.nonedges))


def central(p: int, A: Graph, r: int, s: int, e: int = 1) -> MeklerElement:
    """``x_{r,s}^e`` for a non-edge ``r < s``."""
    beta = [0] * len(A.nonedges)
    beta[A.nonedge_index[(r, s)]] = e
    return MeklerElement(p, A, (0,) * A.n, tuple(beta))


def _same_context(u: MeklerElement, w: MeklerElement):
    if u.p != w.p or u.graph != w.graph:
        raise MixedContext("elements live in different groups")


def multiply(u: MeklerElement, w: MeklerElement) -> MeklerElement:
    """Normal form of ``u * w``.

    Moving ``x_r^{b}`` of ``w`` left past ``x_s^{a}`` of ``u`` (``s > r``)
    uses ``x_s^a x_r^b = x_r^b x_s^a [x_s, x_r]^{ab}`` and
    ``[x_s, x_r] = x_{r,s}^{-1}``.
    """
    _same_context(u, w)
    alpha = tuple(a + b for a, b in zip(u.alpha, w.alpha))
    beta = tuple(cu + cw - u.alpha[s] * w.alpha[r]
                 for (r, s), cu, cw in zip(u.graph.nonedges, u.beta, w.beta))
    return MeklerElement(u.p, u.graph, alpha, beta)


def inverse(u: MeklerElement) -> MeklerElement:
    alpha = tuple(-a for a in u.alpha)
    beta = tuple(-c - u.alpha[r] * u.alpha[s] for (r, s), c in zip(u.graph.nonedges, u.beta))
    return MeklerElement(u.p, u.graph, alpha, beta)


def power(u: MeklerElement, k: int) -> MeklerElement:
    if k < 0:
        u, k = inverse(u), -k
    result = identity(u.p, u.graph)
    for _ in range(k % u.p if k >= u.p else k):
        result = multiply(result, u)
    return result


def commutator_formula(u: MeklerElement, w: MeklerElement) -> MeklerElement:
    """``[u, w]`` read off the exponents: ``a_r b_s - a_s b_r`` at each non-edge."""
    _same_context(u, w)
    a, b = u.alpha, w.alpha
    beta = tuple(a[r] * b[s] - a[s] * b[r] for r, s in u.graph.nonedges)
    return MeklerElement(u.p, u.graph, (0,) * u.graph.n, beta)


# -- rewriting oracle ---------------------------------------------------------------

def _letters(u: MeklerElement) -> list[tuple]:
    out: list[tuple] = []
    for (r, s), c in zip(u.graph.nonedges, u.beta):
        out.extend([("c", r, s)] * c)
    for i, a in enumerate(u.alpha):
        out.extend([("x", i)] * a)
    return out


def _inverse_letters(u: MeklerElement) -> list[tuple]:
    p = u.p
    out: list[tuple] = []
    for i in reversed(range(u.graph.n)):
        out.extend([("x", i)] * ((p - u.alpha[i]) % p))
    for (r, s), c in zip(u.graph.nonedges, u.beta):
        out.extend([("c", r, s)] * ((p - c) % p))
    return out


def rewrite_normal_form(letters: Sequence[tuple], p: int, A: Graph) -> MeklerElement:
    """Normal form of a positive word by string rewriting.

    Letters are ``("x", i)`` or ``("c", r, s)`` with ``r < s``. Rules: central
    letters commute with everything and ``x_{r,s} -> 1`` on edges; adjacent
    ``x_s x_r`` with ``s > r`` becomes ``x_r x_s x_{r,s}^{-1}``; exponents
    reduce mod ``p``.
    """
    centre: dict[tuple[int, int], int] = {}
    xs: list[int] = []
    for letter in letters:
        if letter[0] == "c":
            _, r, s = letter
            if not A.adjacent(r, s):
                centre[(r, s)] = centre.get((r, s), 0) + 1
        else:
            xs.append(letter[1])
    # bubble sort, one adjacent transposition per rewrite
    changed = True
    while changed:
        changed = False
        for k in range(len(xs) - 1):
            s, r = xs[k], xs[k + 1]
            if s > r:
                xs[k], xs[k + 1] = r, s
                if not A.adjacent(r, s):
                    centre[(r, s)] = centre.get((r, s), 0) - 1
                changed = True
    alpha = [0] * A.n
    for i in xs:
        alpha[i] += 1
    beta = [centre.get(pair, 0) for pair in A.nonedges]
    return MeklerElement(p, A, tuple(alpha), tuple(beta))


def commutator_oracle(u: MeklerElement, w: MeklerElement) -> MeklerElement:
    """``u^-1 w^-1 u w`` computed by rewriting the concatenated word."""
    _same_context(u, w)
    word = _inverse_letters(u) + _inverse_letters(w) + _letters(u) + _letters(w)
    return rewrite_normal_form(word, u.p, u.graph)


# -- centralizers ------------------------------------------------------------------

def centralizer_matrix(v: MeklerElement) -> np.ndarray:
    """Rows indexed by non-edges ``(r, s)``: ``w`` centralises ``v`` iff
    ``M @ w.alpha == 0 (mod p)``."""
    A = v.graph
    M = np.zeros((len(A.nonedges), A.n), dtype=np.int64)
    for k, (r, s) in enumerate(A.nonedges):
        M[k, r] = (-v.alpha[s]) % v.p
        M[k, s] = v.alpha[r] % v.p
    return M


def _nullspace(M: np.ndarray, p: int) -> np.ndarray:
    rows, n = M.shape
    if rows == 0:
        return np.eye(n, dtype=np.int64)
    red, rank = kernels.rref_mod_p(M, p)
    pivots = []
    r = 0
    for c in range(n):
        if r < rank and red[r, c] != 0:
            pivots.append(c)
            r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-red[i, f]) % p
    return basis


def centralizer_kernel(v: MeklerElement) -> np.ndarray:
    """Basis (rows) of the vertex-exponent vectors commuting with ``v``."""
    return _nullspace(centralizer_matrix(v), v.p)


def _span_contains(basis: np.ndarray, vectors: np.ndarray, p: int) -> bool:
    if len(vectors) == 0:
        return True
    if len(basis) == 0:
        return not np.any(vectors % p)
    _, r1 = kernels.rref_mod_p(basis, p)
    _, r2 = kernels.rref_mod_p(np.vstack([basis, vectors]), p)
    return r1 == r2


def same_class(v: MeklerElement, w: MeklerElement) -> bool:
    """``C(v) = C(w)``, by mutual containment of the centralizer kernels."""
    _same_context(v, w)
    if v.is_central() or w.is_central():
        raise CentralInput("centralizer classes are defined for noncentral elements")
    kv, kw = centralizer_kernel(v), centralizer_kernel(w)
    return _span_contains(kv, kw, v.p) and _span_contains(kw, kv, v.p)


# -- the case split ---------------------------------------------------------------------

@dataclass(frozen=True)
class CaseTag:
    case: int
    witness: tuple[int, ...] = ()

    def __str__(self):
        return f"Case{self.case}({','.join(map(str, self.witness))})"


def case_classify(v: MeklerElement) -> CaseTag:
    """Which of the four cases the support ``D`` of ``v`` falls into."""
    if v.is_central():
        raise CentralInput("case analysis needs a noncentral element")
    A = v.graph
    D = v.support
    if len(D) == 1:
        return CaseTag(1, (D[0],))
    if len(D) == 2 and A.adjacent(*D):
        return CaseTag(2, D)
    # ell may itself lie in D: its exponent is free within the class
    for ell in range(A.n):
        if all(A.adjacent(i, ell) for i in D if i != ell):
            return CaseTag(3, (ell,))
    return CaseTag(4)


def class_size(v: MeklerElement) -> int:
    """Size of the centralizer class of ``v`` modulo the centre, per case."""
    p = v.p
    case = case_classify(v).case
    return {1: p - 1, 2: (p - 1) ** 2, 3: p * (p - 1), 4: p - 1}[case]


# -- the interpretation Gamma_2 ----------------------------------------------------------

def _check_prime(p: int):
    if p < 3 or not is_prime(p):
        raise BadPrime(f"p must be an odd prime, got {p}")


def alpha_vectors(n: int, p: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Vectors ``start..stop-1`` of ``F_p^n`` in lexicographic order (vector
    ``k`` is ``k`` written in base ``p``, most significant digit first)."""
    stop = p**n if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), n), dtype=np.int64)
    for j in reversed(range(n)):
        out[:, j] = idx % p
        idx //= p
    return out


def all_alpha_vectors(n: int, p: int) -> np.ndarray:
    return alpha_vectors(n, p)


def _alpha_index(vec, p: int) -> int:
    k = 0
    for a in vec:
        k = k * p + int(a) % p
    return k


@dataclass
class CentralizerClasses:
    """All of ``F_p^n`` grouped by centralizer.

    ``labels[k]`` is the class of vector ``k`` (classes numbered by first
    appearance), ``sizes[c]`` and ``ranks[c]`` the size of class ``c`` and the
    rank of its centralizer matrix, ``reps[c]`` its least vector index and
    ``central`` the label of the central vectors.
    """

    n: int
    p: int
    labels: np.ndarray
    sizes: np.ndarray
    ranks: np.ndarray
    reps: np.ndarray
    central: int

    def vector(self, k: int) -> tuple[int, ...]:
        return tuple(int(a) for a in alpha_vectors(self.n, self.p, k, k + 1)[0])


def centralizer_classes(A: Graph, p: int, chunk: int = 1 << 16) -> CentralizerClasses:
    """Group every vertex-exponent vector by the row space of its centralizer
    matrix (equivalently, by its centralizer). Vectors are generated and
    reduced one chunk at a time."""
    n = A.n
    total = p**n
    ne = np.array(A.nonedges, dtype=np.int64).reshape(-1, 2)
    labels = np.empty(total, dtype=np.int32 if total < 2**31 else np.int64)
    known: dict[bytes, int] = {}
    ranks: list[int] = []
    reps: list[int] = []
    for start in range(0, total, chunk):
        block = alpha_vectors(n, p, start, min(total, start + chunk))
        keys = kernels.centralizer_keys(block, ne, p)
        flat = np.ascontiguousarray(keys.reshape(len(block), -1))
        view = flat.view(np.dtype((np.void, flat.shape[1]))).reshape(-1)
        uniq, first, inv = np.unique(view, return_index=True, return_inverse=True)
        local = np.empty(len(uniq), dtype=np.int64)
        # visit keys in order of first appearance so numbering is stable
        for u in np.argsort(first, kind="stable"):
            key = uniq[u].tobytes()
            lab = known.get(key)
            if lab is None:
                lab = known[key] = len(known)
                ranks.append(int(keys[first[u]].any(axis=1).sum()))
                reps.append(start + int(first[u]))
            local[u] = lab
        labels[start:start + len(block)] = local[inv.reshape(-1)]
    sizes = np.bincount(labels, minlength=len(known))
    return CentralizerClasses(n, p, labels, sizes, np.array(ranks), np.array(reps), int(labels[0]))


@dataclass
class Gamma2Result:
    classes: list[tuple[int, ...]]  # a representative alpha vector per vertex class
    edges: set                      # pairs of indices into ``classes``
    vertex_map: list[int | None]    # class index -> i when it is the class of x_i
    graph: Graph | None             # the interpreted graph, relabelled by vertex_map

    def isomorphic_to(self, A: Graph) -> bool:
        return self.graph is not None and self.graph == A


def gamma2(A: Graph, p: int) -> Gamma2Result:
    """Recover a nice graph from its group.

    Vertices are the centralizer classes (of noncentral cosets) of size
    ``p - 1`` that commute with some other noncentral class; edges join
    distinct such classes whose representatives commute.

    A class ``[v]`` and the central vectors all lie in the centralizer
    ``C(v)``, a subspace of dimension ``n - rank``; so ``C(v)`` meets another
    noncentral class exactly when ``p^(n - rank) > |[v]| + |centre|``.
    """
    _check_prime(p)
    report = is_nice(A)
    if not report:
        raise NotNice(f"graph is not nice: {report.reason} {report.witness}")
    cc = centralizer_classes(A, p)
    n_central = int(cc.sizes[cc.central])
    room = np.array([p ** (A.n - int(r)) for r in cc.ranks], dtype=object)
    keep = (cc.sizes == p - 1) & (room > cc.sizes + n_central).astype(bool)
    keep[cc.central] = False
    chosen = [int(c) for c in np.flatnonzero(keep)]

    classes = [cc.vector(int(cc.reps[c])) for c in chosen]
    zero_beta = (0,) * len(A.nonedges)
    elems = [MeklerElement(p, A, c, zero_beta) for c in classes]
    edges = set()
    for i, j in itertools.combinations(range(len(elems)), 2):
        if commutator_formula(elems[i], elems[j]).is_identity():
            edges.add((i, j))

    label_to_pos = {lab: k for k, lab in enumerate(chosen)}
    vertex_map: list[int | None] = [None] * len(chosen)
    for i in range(A.n):
        e = [0] * A.n
        e[i] = 1
        lab = int(cc.labels[_alpha_index(e, p)])
        if lab in label_to_pos and vertex_map[label_to_pos[lab]] is None:
            vertex_map[label_to_pos[lab]] = i

    graph = None
    if len(chosen) == A.n and sorted(m for m in vertex_map if m is not None) == list(range(A.n)):
        graph = Graph(A.n, frozenset((vertex_map[i], vertex_map[j]) for i, j in edges))
    return Gamma2Result(classes, edges, vertex_map, graph)


# -- finite quotients G(A)/R_n -------------------------------------------------------------

def level_order(A: Graph, p: int, n: int) -> int:
    k = min(n, A.n)
    return p ** (k + len(A.induced(k).nonedges))


def level_group(A: Graph, p: int, n: int) -> tuple[FiniteGroup, list[int]]:
    """``G(A)/R_n`` as a table, with the images of ``x_0..x_{n-1}``.

    Elements are truncated normal forms (``alpha`` on vertices below ``n``,
    ``beta`` on non-edges below ``n``), indexed in base ``p`` with the alpha
    digits most significant.
    """
    k = min(n, A.n)
    sub = A.induced(k)
    ne = sub.nonedges
    d = k + len(ne)
    order = p**d
    if order > TABLE_LIMIT:
        raise LevelTooLarge(f"level {n} has order {order} > {TABLE_LIMIT}")
    digits = all_alpha_vectors(d, p) if d else np.zeros((1, 0), dtype=np.int64)
    al = digits[:, :k]
    be = digits[:, k:]
    weights = p ** np.arange(d - 1, -1, -1, dtype=np.int64)
    table = np.empty((order, order), dtype=np.int32)
    rs = np.array(ne, dtype=np.int64).reshape(-1, 2)
    chunk = max(1, 2**20 // max(order, 1))
    for start in range(0, order, chunk):
        stop = min(order, start + chunk)
        a1 = al[start:stop, None, :]
        a2 = al[None, :, :]
        new_a = (a1 + a2) % p
        corr = a1[:, :, rs[:, 1]] * a2[:, :, rs[:, 0]] if len(rs) else 0
        new_b = (be[start:stop, None, :] + be[None, :, :] - corr) % p
        full = np.concatenate([np.broadcast_to(new_a, new_a.shape[:2] + (k,)), new_b], axis=2)
        table[start:stop] = (full @ weights).astype(np.int32)
    group = FiniteGroup(table, identity=0, name=f"G(A)/R_{n}")
    gens = [int(weights[i]) for i in range(k)] + [0] * (n - k)
    return group, gens


def rn_chain(A: Graph, p: int):
    """The chain ``chain(n) = R_n`` of normal subgroups with finite quotients
    ``G(A)/R_n``, as a filter chain on the free profinite group."""
    from pfgroups.filters import FilterChain
    from pfgroups.lattice import LatticeElement

    _check_prime(p)

    def level(n: int):
        g, gens = level_group(A, p, n)
        return LatticeElement.from_images(g, gens)

    return FilterChain(extender=level, name=f"R_n(p={p})")


def project_to_level(u: MeklerElement, n: int) -> MeklerElement:
    """Image in ``G(A)/R_n``: drop ``x_i`` for ``i >= n`` and every central
    factor touching such an index."""
    alpha = tuple(a if i < n else 0 for i, a in enumerate(u.alpha))
    beta = tuple(c if s < n else 0 for (r, s), c in zip(u.graph.nonedges, u.beta))
    return MeklerElement(u.p, u.graph, alpha, beta)
